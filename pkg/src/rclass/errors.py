"""Exception types raised by the classifier core and the harness."""


class RClassError(Exception):
    """Base class for all library errors."""


class EmptyModelError(RClassError):
    """Prediction requested from a model with no rules."""


class DegenerateOutputsError(RClassError):
    """All class outputs are zero after shifting; no conflict ratio exists."""


class SingularCovarianceError(RClassError):
    """A rule covariance (or its inverse) is numerically singular."""


class ZeroWithinScatterError(RClassError):
    """Feature-weighting cost denominator underflowed."""


class BadRowError(RClassError):
    """A dataset row failed to parse or carried an unmapped label code."""

    def __init__(self, row: int, reason: str):
        super().__init__(f"row {row}: {reason}")
        self.row = row
        self.reason = reason


class SnapshotError(RClassError):
    """Base class for snapshot container problems."""


class VersionMismatchError(SnapshotError):
    """Snapshot was written by an incompatible container version."""


class CorruptSnapshotError(SnapshotError):
    """Snapshot failed checksum or structural validation."""


class OracleTimeoutError(RClassError):
    """Interactive label oracle did not answer before the deadline."""
