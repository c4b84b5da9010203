"""Budgeted active sample selection (the what-to-learn stage).

A sample's label is requested only when the model is genuinely conflicted
about it, in both the output space (ratio of the two dominant outputs) and
the input space (Bayesian posterior over rules), subject to a windowed
annotation budget.  A minority-class override can force queries for samples
that both spaces place in an under-represented class.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import HyperParams
from .errors import DegenerateOutputsError, EmptyModelError

LOG2PI = float(np.log(2.0 * np.pi))


@dataclass
class SelectionState:
    """Adaptive conflict threshold plus the windowed annotation budget.

    Attributes
    ----------
    theta : float
        Conflict threshold, clamped to [1/C, 1].
    budget : float
        Maximum long-run labeled fraction.
    annot_window : float
        Exponentially windowed count of annotations (Z).
    spent : float
        Current labeled fraction estimate b = Z / window.
    class_counts : ndarray
        Labeled samples per class, drives the imbalance override.
    n_queried : int
        Samples offered to the selector so far.
    """

    theta: float
    budget: float
    window: int
    step: float
    n_classes: int
    annot_window: float = 0.0
    spent: float = 0.0
    class_counts: np.ndarray = field(default_factory=lambda: np.zeros(0))
    n_queried: int = 0

    @classmethod
    def fresh(cls, n_classes: int, config: HyperParams) -> "SelectionState":
        return cls(
            theta=init_threshold(n_classes, config.budget),
            budget=config.budget,
            window=config.window,
            step=config.threshold_step,
            n_classes=n_classes,
            class_counts=np.zeros(n_classes),
        )


def init_threshold(n_classes: int, budget: float) -> float:
    """Initial conflict threshold 1/C + B(1 - 1/C).

    Derived from a uniform confidence distribution on [1/C, 1]: querying
    everything below this threshold spends exactly the budget B.
    """
    if n_classes < 2:
        raise ValueError("need at least two classes")
    if not 0.0 <= budget <= 1.0:
        raise ValueError("budget must be in [0, 1]")
    inv_c = 1.0 / n_classes
    return inv_c + budget * (1.0 - inv_c)


def output_conflict(y: np.ndarray) -> float:
    """Confidence ratio y1 / (y1 + y2) of the two dominant outputs, in [0, 1].

    Outputs are shifted to be nonnegative before the ratio so the value
    stays in [0.5, 1]; low values mean the sample sits near the decision
    boundary.
    """
    y = np.asarray(y, dtype=float)
    if y.shape[0] < 2:
        raise ValueError("need at least two class outputs")
    shifted = y - min(0.0, float(y.min()))
    top2 = np.sort(shifted)[-2:]
    y2, y1 = float(top2[0]), float(top2[1])
    if y1 + y2 <= 0.0:
        raise DegenerateOutputsError("all shifted outputs are zero")
    return min(max(y1 / (y1 + y2), 0.0), 1.0)


def rule_class_prior(class_support: np.ndarray) -> np.ndarray:
    """Log-softened share of a rule's support per class.

    A rule with no class evidence yields the uniform prior instead of NaN.
    """
    logs = np.log(class_support + 1.0)
    total = logs.sum()
    if total <= 0.0:
        return np.full(class_support.shape[0], 1.0 / class_support.shape[0])
    return logs / total


def input_conflict(model, x: np.ndarray) -> np.ndarray:
    """Posterior class probabilities of x under the rule mixture.

    Mixes, over rules, the log-softened class share of each rule, the
    Gaussian likelihood of x under the rule's ellipsoid, and the
    log-softened rule prior; the result is normalized over classes.
    """
    if not model.rules:
        raise EmptyModelError("model has no rules")
    x = np.asarray(x, dtype=float)
    u = model.n_features
    rules = model.rules

    rule_logs = np.array([np.log(r.support + 1.0) for r in rules])
    rule_prior_total = rule_logs.sum()
    if rule_prior_total <= 0.0:
        rule_prior = np.full(len(rules), 1.0 / len(rules))
    else:
        rule_prior = rule_logs / rule_prior_total

    # Likelihood exponents are shifted by their maximum before exp();
    # the common factor cancels in the normalization.
    exponents = np.array([
        0.5 * r.logdet_inv - r.mahalanobis_sq(x) - 0.5 * u * LOG2PI
        for r in rules
    ])
    lik = np.exp(exponents - exponents.max())

    posterior = np.zeros(model.n_classes)
    for i, rule in enumerate(rules):
        posterior += rule_class_prior(rule.class_support) * lik[i] * rule_prior[i]
    total = posterior.sum()
    if total <= 0.0 or not np.isfinite(total):
        return np.full(model.n_classes, 1.0 / model.n_classes)
    return posterior / total


def update_budget(state: SelectionState, labeled: bool) -> None:
    """Advance the windowed annotation estimate by one sample."""
    decay = (state.window - 1.0) / state.window
    state.annot_window = state.annot_window * decay + (1.0 if labeled else 0.0)
    state.spent = state.annot_window / state.window
    state.n_queried += 1


def update_threshold(state: SelectionState, accepted: bool) -> None:
    """Shrink the threshold on accepts, grow it on rejects; clamp to [1/C, 1]."""
    factor = (1.0 - state.step) if accepted else (1.0 + state.step)
    state.theta = min(1.0, max(1.0 / state.n_classes, state.theta * factor))


def imbalance_factor(class_counts: np.ndarray, total: float) -> float:
    """1 - (C / N) * min_o N_o; zero when balanced, one with an empty class."""
    if total <= 0:
        raise ValueError("total count must be positive")
    c = class_counts.shape[0]
    return 1.0 - (c / total) * float(class_counts.min())


def minority_override(state: SelectionState, posterior: np.ndarray,
                      y: np.ndarray, gate: float) -> bool:
    """True when both spaces agree the sample belongs to a minority class.

    Arms only once the labeled stream is imbalanced (factor >= gate) and the
    agreed class holds less than 30% of its balanced share.
    """
    total = float(state.class_counts.sum())
    if total <= 0:
        return False
    if imbalance_factor(state.class_counts, total) < gate:
        return False
    cls_in = int(np.argmax(posterior))
    cls_out = int(np.argmax(y))
    if cls_in != cls_out:
        return False
    share = total / state.n_classes
    return float(state.class_counts[cls_in]) < 0.3 * share


@dataclass
class Decision:
    """Outcome of the selection stage for one sample."""

    query: bool
    budget_blocked: bool
    out_conf: float
    posterior: np.ndarray
    override: bool
    conflicted: bool = False


def decide(model, detail_y: np.ndarray | None, posterior: np.ndarray | None,
           state: SelectionState, gate: float,
           override_enabled: bool = True) -> Decision:
    """Decide whether to request a label for the current sample.

    With an empty model the conflict is maximal and the sample is queried
    (budget permitting).  The caller applies the threshold and budget
    transitions once the oracle outcome is known.
    """
    c = state.n_classes
    if detail_y is None or posterior is None:
        # Empty model: maximal conflict in both spaces, same admission test.
        out_conf = 0.5
        posterior = np.full(c, 1.0 / c)
        conflicted = out_conf <= state.theta and float(posterior.max()) <= state.theta
        override = False
    else:
        y = detail_y
        try:
            out_conf = output_conflict(y)
        except DegenerateOutputsError:
            out_conf = 0.5
        # Boundary-inclusive: skip only when strictly MORE confident than
        # theta.  A lone single-class rule pins the posterior at exactly 1,
        # and theta clamps at 1, so a strict test would block queries, and
        # with them all growth, forever.
        conflicted = out_conf <= state.theta and float(posterior.max()) <= state.theta
        override = override_enabled and minority_override(state, posterior, y, gate)

    # A zero budget forbids annotation outright; otherwise the windowed
    # estimate must not have overrun the budget.
    if state.budget <= 0.0 or state.spent > state.budget:
        return Decision(False, True, out_conf, posterior, override, conflicted)
    return Decision(conflicted or override, False, out_conf, posterior, override,
                    conflicted)


def commit_decision(state: SelectionState, decision: Decision,
                    labeled: bool, label: int | None) -> None:
    """Apply the per-sample threshold and budget transitions.

    The threshold adapts only for samples that passed the budget gate, and
    by the conflict outcome alone: a minority-override query is out of
    band and must not drive the threshold down.  The windowed annotation
    count decays every sample and counts the label only when one was
    actually obtained.
    """
    if not decision.budget_blocked:
        update_threshold(state, accepted=decision.conflicted)
    update_budget(state, labeled=labeled)
    if labeled and label is not None:
        state.class_counts[label] += 1
