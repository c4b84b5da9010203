"""Dataset schema, CSV ingestion, and train-prefix normalization.

The default schema mirrors the machining stream: twelve sensor features
followed by three binary wear flags (flank, nose, chipped).  Only four flag
codes map to classes; rows with any other code are rejected with their row
number.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import BadRowError
from .model import StreamSample

DEFAULT_FEATURES = [
    "Cutting speed", "Feed-rate", "Depth of cut",
    "Static Force X", "Static Force Y", "Static Force Z",
    "Dynamic Force X", "Dynamic Force Y", "Dynamic Force Z",
    "Acceleration X", "Acceleration Y", "Acceleration Z",
]
LABEL_COLUMNS = ["Flank", "Nose", "Chipped"]
CLASS_MAP = {"000": 0, "100": 1, "110": 2, "111": 3}
CLASS_NAMES = ["sharp", "flank", "flank+nose", "flank+chipped"]


@dataclass
class DatasetSchema:
    """Column layout of a stream CSV."""

    feature_columns: list[str] = field(default_factory=lambda: list(DEFAULT_FEATURES))
    label_columns: list[str] = field(default_factory=lambda: list(LABEL_COLUMNS))
    class_map: dict[str, int] = field(default_factory=lambda: dict(CLASS_MAP))
    class_names: list[str] = field(default_factory=lambda: list(CLASS_NAMES))

    @property
    def n_features(self) -> int:
        return len(self.feature_columns)

    @property
    def n_classes(self) -> int:
        return len(set(self.class_map.values()))

    @classmethod
    def infer(cls, header: list[str]) -> "DatasetSchema":
        """Schema from a CSV header: the trailing flag columns mark the labels."""
        lowered = [h.strip().lower() for h in header]
        expected = [c.lower() for c in LABEL_COLUMNS]
        if len(header) < 4 or lowered[-3:] != expected:
            raise BadRowError(0, "header must end with Flank,Nose,Chipped")
        return cls(feature_columns=[h.strip() for h in header[:-3]])


def load_dataset(path: str, schema: DatasetSchema | None = None) -> tuple[list[StreamSample], DatasetSchema]:
    """Parse a CSV into stream samples; labels come from the flag triple."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise BadRowError(0, "empty file") from None
        if schema is None:
            schema = DatasetSchema.infer(header)
        n_cols = schema.n_features + len(schema.label_columns)
        if len(header) != n_cols:
            raise BadRowError(0, f"expected {n_cols} columns, found {len(header)}")
        samples = []
        for row_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != n_cols:
                raise BadRowError(row_no, f"expected {n_cols} fields, found {len(row)}")
            try:
                x = np.array([float(v) for v in row[:schema.n_features]])
            except ValueError as exc:
                raise BadRowError(row_no, f"non-numeric feature: {exc}") from None
            code = "".join(_flag(row_no, v) for v in row[schema.n_features:])
            if code not in schema.class_map:
                raise BadRowError(row_no, f"unmapped label code {code}")
            samples.append(StreamSample(x, schema.class_map[code], len(samples)))
    return samples, schema


def _flag(row_no: int, value: str) -> str:
    value = value.strip()
    if value not in ("0", "1"):
        raise BadRowError(row_no, f"label flag must be 0 or 1, got {value!r}")
    return value


@dataclass
class Normalizer:
    """Per-feature min-max map fitted on the training prefix only.

    Data already inside [0, 1] passes through untouched; otherwise test
    samples are mapped with the training extrema and clipped, so nothing
    leaks from the test phase.
    """

    lo: np.ndarray
    span: np.ndarray
    identity: bool

    @classmethod
    def fit(cls, samples: list[StreamSample]) -> "Normalizer":
        xs = np.stack([s.x for s in samples])
        if xs.min() >= 0.0 and xs.max() <= 1.0:
            return cls(np.zeros(xs.shape[1]), np.ones(xs.shape[1]), True)
        lo = xs.min(axis=0)
        span = xs.max(axis=0) - lo
        span[span <= 0.0] = 1.0
        return cls(lo, span, False)

    def apply(self, sample: StreamSample) -> StreamSample:
        if self.identity:
            return sample
        x = np.clip((sample.x - self.lo) / self.span, 0.0, 1.0)
        return StreamSample(x, sample.label, sample.index)
