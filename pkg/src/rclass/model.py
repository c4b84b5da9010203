"""Rule and model state types plus the recurrent fuzzy inference pipeline.

A rule is an ellipsoidal cluster (centroid + inverse covariance) with one
polynomial consequent and one recurrent weight per class.  Inference expands
the input with Chebyshev terms up to second order, fires each rule spatially
through a multivariate Gaussian, blends the firing with the rule's previous
activation (local recurrence), and emits one output per class as the
firing-normalized mix of the local consequents.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import HyperParams
from .errors import EmptyModelError, SingularCovarianceError

DENOM_GUARD = 1e-12  # per-class firing-sum floor before the nearest-rule fallback


@dataclass
class StreamSample:
    """One observation from the stream: features, optional label, position."""

    x: np.ndarray
    label: Optional[int] = None
    index: int = 0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)


@dataclass
class RunningStats:
    """Streaming mean / standard deviation with exponential forgetting.

    Significance series are non-stationary: volume shares step whenever
    the rule count changes, so an all-time band would hold mature rules
    below it forever.  The statistics forget at rate EWMA_ALPHA (effective
    window of about a hundred observations) once enough history exists;
    below_streak counts consecutive observations under mean - std, so
    pruning keys on a sustained breach rather than a single dip.
    """

    EWMA_ALPHA = 0.02

    mean: float = 0.0
    var: float = 0.0
    n_obs: int = 0
    below_streak: int = 0

    @property
    def std(self) -> float:
        if self.n_obs <= 1:
            return 0.0
        return float(np.sqrt(max(self.var, 0.0)))

    def update(self, value: float) -> None:
        value = float(value)
        self.n_obs += 1
        below = self.n_obs > 1 and value < self.mean - self.std
        alpha = max(1.0 / self.n_obs, self.EWMA_ALPHA)
        diff = value - self.mean
        incr = alpha * diff
        self.mean += incr
        self.var = (1.0 - alpha) * (self.var + diff * incr)
        self.below_streak = self.below_streak + 1 if below else 0


@dataclass
class PPlusStats:
    """Recursive rule-relevance value with its own history statistics.

    The value starts at 1: the printed recursion has 0 as an absorbing
    state, so a zero start would freeze the rule's relevance forever.
    prune_value records the relevance at the moment the rule was archived;
    recall requires recovery above it (the rule must be valid *again*).
    """

    value: float = 1.0
    prev_value: float = 1.0
    history: RunningStats = field(default_factory=RunningStats)
    n_obs: int = 1
    prune_value: float = 0.0


class Rule:
    """One fuzzy rule: Gaussian premise, per-class consequents and recurrence.

    Rule geometry (centroid, inverse covariance) lives in raw feature
    space; the premise weights shade it only inside the spatial firing, so
    a weight refresh never moves or orphans a rule.
    """

    __slots__ = (
        "centroid", "_inv_cov", "_logdet_inv", "out_weights",
        "rec_weights", "out_cov", "support", "class_support", "prev_temporal",
        "pplus", "ers",
    )

    def __init__(self, centroid, inv_cov, out_weights, rec_weights, out_cov,
                 support, class_support, prev_temporal=None,
                 pplus=None, ers=None):
        self.centroid = np.asarray(centroid, dtype=float)
        self.out_weights = np.asarray(out_weights, dtype=float)   # (C, 2u+1)
        self.rec_weights = np.asarray(rec_weights, dtype=float)   # (C,)
        self.out_cov = np.asarray(out_cov, dtype=float)           # (2u+1, 2u+1)
        self.support = float(support)
        self.class_support = np.asarray(class_support, dtype=float)  # (C,)
        n_classes = self.rec_weights.shape[0]
        if prev_temporal is None:
            prev_temporal = np.zeros(n_classes)
        self.prev_temporal = np.asarray(prev_temporal, dtype=float)
        self.pplus = pplus if pplus is not None else PPlusStats()
        self.ers = ers if ers is not None else RunningStats()
        self.set_inv_cov(np.asarray(inv_cov, dtype=float))

    def set_inv_cov(self, inv_cov: np.ndarray) -> None:
        """Install a new inverse covariance, keeping its log-det cached."""
        inv_cov = 0.5 * (inv_cov + inv_cov.T)
        try:
            chol = np.linalg.cholesky(inv_cov)
        except np.linalg.LinAlgError as exc:
            raise SingularCovarianceError(
                "inverse covariance is not positive definite") from exc
        logdet = 2.0 * float(np.log(np.diag(chol)).sum())
        if not np.isfinite(logdet):
            raise SingularCovarianceError("inverse covariance log-det overflow")
        self._inv_cov = inv_cov
        self._logdet_inv = logdet

    @property
    def inv_cov(self) -> np.ndarray:
        return self._inv_cov

    @property
    def logdet_inv(self) -> float:
        return self._logdet_inv

    @property
    def n_features(self) -> int:
        return self.centroid.shape[0]

    def mahalanobis_sq(self, z: np.ndarray) -> float:
        d = z - self.centroid
        return float(d @ self._inv_cov @ d)

    def clone(self) -> "Rule":
        return Rule(
            self.centroid.copy(), self._inv_cov.copy(), self.out_weights.copy(),
            self.rec_weights.copy(), self.out_cov.copy(), self.support,
            self.class_support.copy(), self.prev_temporal.copy(),
            copy.deepcopy(self.pplus), copy.deepcopy(self.ers),
        )


def chebyshev_expand(x: np.ndarray) -> np.ndarray:
    """Extend x to [1, T1(x1), T2(x1), ..., T1(xu), T2(xu)].

    T1(v) = v and T2(v) = 2 v^2 - 1; output length is 2u + 1.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(2 * x.shape[0] + 1)
    out[0] = 1.0
    out[1::2] = x
    out[2::2] = 2.0 * x * x - 1.0
    return out


def spatial_firing(rule: Rule, x: np.ndarray, weights: np.ndarray) -> float:
    """Gaussian membership of the feature-weighted input in the rule's ellipsoid.

    The rule's centroid enters in the same weighted view as the input
    (weights * centroid), so down-weighted axes fade from the distance
    instead of displacing the rule.
    """
    d = weights * x - weights * rule.centroid
    value = float(np.exp(-(d @ rule.inv_cov @ d)))
    if not np.isfinite(value):
        raise SingularCovarianceError("non-finite spatial firing; rule state corrupted")
    return value


def temporal_firing(gamma: float, spatial: float, prev: float) -> float:
    """Blend the current membership with the rule's previous activation."""
    return gamma * spatial + (1.0 - gamma) * prev


@dataclass
class PredictionDetail:
    """Everything one forward pass produces, kept for the learning stages."""

    y: np.ndarray              # (C,) class outputs
    spatial: np.ndarray        # (M,) per-rule Gaussian firing
    temporal: np.ndarray       # (M, C) spatio-temporal firing
    prev_temporal: np.ndarray  # (M, C) recurrent state the pass consumed
    local_out: np.ndarray      # (M, C) per-rule consequent outputs
    firing_sum: np.ndarray     # (C,) temporal firing sums
    winner: int                # index of the highest-firing rule
    x_e: np.ndarray            # (2u+1,) extended input
    z: np.ndarray              # (u,) feature-weighted input


class ModelState:
    """Ordered rule base plus every per-stream learning accumulator."""

    def __init__(self, n_features: int, n_classes: int,
                 config: Optional[HyperParams] = None):
        from .selection import SelectionState
        from .structure import ClassPotentialState, DQState
        from .features import FeatureWeightState
        from .params import ZedmState

        if n_classes < 2:
            raise ValueError("need at least two classes")
        self.n_features = n_features
        self.n_classes = n_classes
        self.config = config if config is not None else HyperParams()
        self.rules: list[Rule] = []
        self.archive: list[Rule] = []
        self.selection = SelectionState.fresh(n_classes, self.config)
        self.fweights = FeatureWeightState.fresh(n_features, n_classes)
        self.zedm = ZedmState(eta=self.config.zedm_eta_init)
        self.dq = DQState.fresh(n_features)
        self.class_potential = ClassPotentialState.fresh(n_features, n_classes)
        self.n_seen = 0

    @property
    def n_rules(self) -> int:
        return len(self.rules)

    @property
    def weights(self) -> np.ndarray:
        """Current per-feature premise weights (from the weighting stage)."""
        return self.fweights.weights

    def clone(self) -> "ModelState":
        return copy.deepcopy(self)


def predict_detail(model: ModelState, x: np.ndarray) -> PredictionDetail:
    """Forward pass without side effects; temporal states are read, not written."""
    if not model.rules:
        raise EmptyModelError("model has no rules")
    x = np.asarray(x, dtype=float)
    w = model.weights
    z = w * x
    x_e = chebyshev_expand(x)
    m, c = model.n_rules, model.n_classes

    spatial = np.empty(m)
    temporal = np.empty((m, c))
    prev_temporal = np.empty((m, c))
    local_out = np.empty((m, c))
    for i, rule in enumerate(model.rules):
        d = z - w * rule.centroid
        spatial[i] = np.exp(-(d @ rule.inv_cov @ d))
        prev_temporal[i] = rule.prev_temporal
        temporal[i] = rule.rec_weights * spatial[i] \
            + (1.0 - rule.rec_weights) * rule.prev_temporal
        local_out[i] = rule.out_weights @ x_e
    if not np.all(np.isfinite(spatial)):
        raise SingularCovarianceError("non-finite spatial firing; rule state corrupted")

    winner = int(np.argmax(spatial))
    firing_sum = temporal.sum(axis=0)
    y = np.empty(c)
    ok = firing_sum >= DENOM_GUARD
    if np.any(ok):
        y[ok] = (temporal[:, ok] * local_out[:, ok]).sum(axis=0) / firing_sum[ok]
    # Vanishing temporal mass (small recurrent weights early in a stream):
    # fall back to the nearest rule's consequent with weight one.
    y[~ok] = local_out[winner, ~ok]
    return PredictionDetail(y, spatial, temporal, prev_temporal, local_out,
                            firing_sum, winner, x_e, z)


def firing_distance(rule: Rule, x: np.ndarray, weights: np.ndarray) -> float:
    """Weighted-view squared Mahalanobis distance used for winner selection."""
    d = weights * (x - rule.centroid)
    return float(d @ rule.inv_cov @ d)


def commit_temporal(model: ModelState, detail: PredictionDetail) -> None:
    """Write the spatio-temporal activations back into the rules.

    Called once per learned sample; prediction-only paths never commit, so
    replay and snapshot testing see a pure inference function.
    """
    for i, rule in enumerate(model.rules):
        rule.prev_temporal = detail.temporal[i].copy()


def predict_outputs(model: ModelState, x: np.ndarray) -> np.ndarray:
    """Class outputs for x (pure)."""
    return predict_detail(model, x).y


def classify(model: ModelState, x: np.ndarray) -> int:
    """Predicted class: argmax of the outputs, ties resolved to the lowest index."""
    return int(np.argmax(predict_outputs(model, x)))
