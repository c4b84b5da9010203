"""Online per-feature premise weighting.

A projection vector is tuned by gradient ascent on an L1 discriminant
ratio (between-class mean separation over a within-class scatter
surrogate), both maintained recursively.  Feature weights come from
leave-one-feature-out scoring of that ratio: masking an important feature
collapses the ratio, so it earns weight one; masking a useless feature
inflates it, earning weight zero.  The weights shade the rule premise only;
they never remove a feature outright.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroWithinScatterError

DEGENERATE_EPS = 1e-12
_PERTURB_SEED = 929  # fixed: keeps runs reproducible irrespective of stream seed


@dataclass
class FeatureWeightState:
    """Recursive class means, scatter accumulators, and the projection."""

    omega: np.ndarray
    class_means: np.ndarray       # (C, u)
    global_mean: np.ndarray       # (u,)
    scatter: np.ndarray           # (C, u) accumulated |x - mean|
    class_counts: np.ndarray      # (C,)
    total: int
    weights: np.ndarray           # (u,) current premise weights, in [0, 1]
    use_class_mean: bool = True
    rng: np.random.Generator = field(
        default_factory=lambda: np.random.default_rng(_PERTURB_SEED))

    @classmethod
    def fresh(cls, n_features: int, n_classes: int,
              use_class_mean: bool = True) -> "FeatureWeightState":
        omega = np.ones(n_features) / np.sqrt(n_features)
        return cls(
            omega=omega,
            class_means=np.zeros((n_classes, n_features)),
            global_mean=np.zeros(n_features),
            scatter=np.zeros((n_classes, n_features)),
            class_counts=np.zeros(n_classes, dtype=int),
            total=0,
            weights=np.ones(n_features),
            use_class_mean=use_class_mean,
        )

    @property
    def n_classes_seen(self) -> int:
        return int((self.class_counts > 0).sum())


def fda_ingest(state: FeatureWeightState, x: np.ndarray, cls_idx: int) -> None:
    """Fold one labeled sample into the recursive means and scatter."""
    x = np.asarray(x, dtype=float)
    state.total += 1
    state.class_counts[cls_idx] += 1
    n_o = state.class_counts[cls_idx]
    n = state.total
    state.class_means[cls_idx] = ((n_o - 1) / n_o) * state.class_means[cls_idx] + x / n_o
    state.global_mean = ((n - 1) / n) * state.global_mean + x / n
    subtrahend = state.class_means[cls_idx] if state.use_class_mean else state.global_mean
    state.scatter[cls_idx] += np.abs(x - subtrahend)


def _cost_terms(state: FeatureWeightState, omega: np.ndarray):
    active = np.nonzero(state.class_counts > 0)[0]
    between = 0.0
    within = 0.0
    for o in active:
        diff = state.class_means[o] - state.global_mean
        between += state.class_counts[o] * abs(float(omega @ diff))
        within += abs(float(omega @ state.scatter[o]))
    return between, within


def fda_cost(state: FeatureWeightState, omega: np.ndarray) -> float:
    """Discriminant ratio of omega; invariant to positive rescaling."""
    between, within = _cost_terms(state, omega)
    if within < DEGENERATE_EPS:
        raise ZeroWithinScatterError("within-class scatter surrogate underflowed")
    return between / within


def fda_gradient(state: FeatureWeightState, omega: np.ndarray) -> np.ndarray:
    """Exact gradient of the ratio away from the absolute-value kinks."""
    between, within = _cost_terms(state, omega)
    if within < DEGENERATE_EPS:
        raise ZeroWithinScatterError("within-class scatter surrogate underflowed")
    active = np.nonzero(state.class_counts > 0)[0]
    d_between = np.zeros_like(omega)
    d_within = np.zeros_like(omega)
    for o in active:
        diff = state.class_means[o] - state.global_mean
        d_between += np.sign(float(omega @ diff)) * state.class_counts[o] * diff
        d_within += np.sign(float(omega @ state.scatter[o])) * state.scatter[o]
    return (d_between * within - between * d_within) / (within ** 2)


def fda_step(state: FeatureWeightState, rate: float) -> None:
    """One ascent step on the projection; degenerate terms trigger the
    perturb-and-renormalize remedy instead."""
    if state.n_classes_seen < 2:
        return
    between, within = _cost_terms(state, state.omega)
    if between < DEGENERATE_EPS or within < DEGENERATE_EPS:
        nudged = state.omega + 1e-3 * state.rng.standard_normal(state.omega.shape[0])
        state.omega = nudged / np.linalg.norm(nudged)
        return
    state.omega = state.omega + rate * fda_gradient(state, state.omega)


def lofo_weights(state: FeatureWeightState) -> np.ndarray:
    """Leave-one-feature-out weights in [0, 1]; all-equal scores give ones."""
    u = state.omega.shape[0]
    scores = np.empty(u)
    for j in range(u):
        masked = state.omega.copy()
        masked[j] = 0.0
        between, within = _cost_terms(state, masked)
        scores[j] = between / within if within >= DEGENERATE_EPS else 0.0
    lo, hi = float(scores.min()), float(scores.max())
    if hi - lo <= 0.0:
        return np.ones(u)
    return 1.0 - (scores - lo) / (hi - lo)
