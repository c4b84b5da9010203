"""Consequent and recurrent-weight learning.

Consequents train per rule with a firing-weighted recursive least-squares
update carrying a per-rule forgetting factor and a quadratic weight-decay
correction.  Recurrent weights train by gradient descent on the squared
error, scaled by a Parzen estimate of the error density at zero, with a
stability-bounded adaptive learning rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DENOM_GUARD, ModelState, PredictionDetail, Rule

SQRT_2PI = math.sqrt(2.0 * math.pi)


def psi_init_scale(init_cov_scale: float, weight_decay: float) -> float:
    """Initial output-covariance magnitude, ridge-consistent with the decay.

    The decay correction -wd * Psi * W only contracts while wd * Psi stays
    below identity; an initial scale above 1/wd makes the recursion diverge
    in directions the data has not excited yet.
    """
    if weight_decay > 0.0:
        return min(init_cov_scale, 1.0 / weight_decay)
    return init_cov_scale


def fwgrls_update(rule: Rule, x_e: np.ndarray, firing: float,
                  targets: np.ndarray, lam: float, weight_decay: float,
                  psi_cap: float | None = None) -> None:
    """One firing-weighted RLS step on this rule's consequents.

    With unit firing, no forgetting and zero decay this is the classical
    RLS recursion.  The gain denominator carries lam / firing; the weight
    update subtracts weight_decay * Psi * W before adding the innovation.
    Only this rule's (W, Psi) are touched (local learning).
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError("forgetting factor must be in (0, 1]")
    if not 0.0 < firing <= 1.0:
        raise ValueError("firing must be in (0, 1]")
    psi = rule.out_cov
    px = psi @ x_e
    gain = px / (lam / firing + float(x_e @ px))
    psi_new = (psi - np.outer(gain, px)) / lam
    psi_new = 0.5 * (psi_new + psi_new.T)
    if psi_cap is not None:
        # Forgetting below one inflates unexcited directions (covariance
        # wind-up); rescale uniformly back under the initial magnitude.
        top = float(np.max(np.diag(psi_new)))
        if top > psi_cap:
            psi_new *= psi_cap / top
    try:
        np.linalg.cholesky(psi_new)
    except np.linalg.LinAlgError:
        eigvals, eigvecs = np.linalg.eigh(psi_new)
        eigvals = np.maximum(eigvals, 1e-12)
        psi_new = (eigvecs * eigvals) @ eigvecs.T
    innovation = targets - rule.out_weights @ x_e
    weights = rule.out_weights
    if weight_decay > 0.0:
        # The shrinkage carries the same firing weight as the innovation
        # (local learning): a barely-firing rule neither learns nor decays.
        weights = weights - weight_decay * firing * (psi_new @ weights.T).T
    rule.out_weights = weights + np.outer(innovation, gain)
    rule.out_cov = psi_new


@dataclass
class ZedmState:
    """Error-density accumulators for recurrent-weight learning."""

    eta: float
    a_acc: float = 0.0      # accumulated Parzen kernels, nondecreasing
    f0_prev: float = 0.0
    n: int = 0              # learned samples consumed
    terms: int = 0          # pooled kernel count (one per class per sample)


def parzen_f0(a_acc: float, terms: int, bandwidth: float) -> float:
    """Parzen estimate of the error density at zero."""
    if terms <= 0:
        return 0.0
    return a_acc / (terms * bandwidth * SQRT_2PI)


def lyapunov_eta_bound(n: int, m: int, a_acc: float) -> float:
    """Stability ceiling 2 N sqrt(pi) / (P_max^2 A) with P_max ~ 1/M."""
    if a_acc <= 0.0 or n < 1:
        raise ValueError("need positive accumulator and at least one sample")
    return 2.0 * n * math.sqrt(math.pi) * (m ** 2) / a_acc


def adapt_eta(state: ZedmState, f0_now: float, lr_up: float, lr_down: float,
              bound: float) -> float:
    """Raise the rate while the density climbs, lower it otherwise; clamp."""
    state.eta *= lr_up if f0_now >= state.f0_prev else lr_down
    state.eta = min(state.eta, bound)
    state.f0_prev = f0_now
    return state.eta


def zedm_gradient(detail: PredictionDetail, winner_idx: int,
                  targets: np.ndarray) -> np.ndarray:
    """Analytic error gradient w.r.t. the winner's recurrent weights.

    Per class: (y - t) * (R - phi_prev) * (local_out - y) / firing_sum.
    Classes whose firing sum hit the inference fallback get a zero gradient
    (the fallback output does not depend on the recurrent weight).
    """
    c = targets.shape[0]
    grad = np.zeros(c)
    for o in range(c):
        denom = detail.firing_sum[o]
        if denom < DENOM_GUARD:
            continue
        grad[o] = (detail.y[o] - targets[o]) \
            * (detail.spatial[winner_idx] - detail.prev_temporal[winner_idx, o]) \
            * (detail.local_out[winner_idx, o] - detail.y[o]) / denom
    return grad


def zedm_update(model: ModelState, detail: PredictionDetail, rule: Rule,
                winner_idx: int, targets: np.ndarray) -> None:
    """Accumulate the error density and step the winner's recurrent weights."""
    cfg = model.config
    state = model.zedm
    h = cfg.parzen_bandwidth
    errors = detail.y - targets
    state.n += 1
    state.terms += errors.shape[0]
    state.a_acc += float(np.exp(-(errors ** 2) / (2.0 * h * h)).sum())

    f0 = parzen_f0(state.a_acc, state.terms, h)
    # The stability ceiling scales with N * M^2 and soon stops binding;
    # a recurrent weight lives in [0,1], so steps beyond O(1) only slam
    # it into a clamp (gamma = 0 freezes the rule's memory).
    bound = min(lyapunov_eta_bound(state.n, max(model.n_rules, 1), state.a_acc),
                1.0)
    eta = adapt_eta(state, f0, cfg.lr_up, cfg.lr_down, bound)

    coeff = state.a_acc / (state.terms * math.sqrt(2.0 * h))
    grad = zedm_gradient(detail, winner_idx, targets)
    rule.rec_weights = np.clip(rule.rec_weights - eta * coeff * grad, 0.0, 1.0)
