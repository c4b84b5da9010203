"""Structural rule-base evolution: grow, adapt, prune, recall, split, merge.

Growth is gated by two complementary tests: a volume test (the hypothetical
rule at the sample must out-cover every existing rule) and a recursive
density test (the sample must be either the densest or the remotest point
relative to the rule centroids).  Pruning tracks each rule's significance
history and archives decliners; archived rules stay live for recall when
an old concept returns.  Oversized winners split along their principal
axis; overlapping neighbors merge.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.stats import chi2

from .config import HyperParams
from .errors import SingularCovarianceError
from .model import ModelState, Rule


# ---------------------------------------------------------------------------
# volumes

@lru_cache(maxsize=None)
def unit_ball_volume(u: int) -> float:
    return math.pi ** (u / 2.0) / math.gamma(u / 2.0 + 1.0)


def rule_volume(rule: Rule) -> float:
    """Ellipsoid volume: unit-ball volume times sqrt(det covariance)."""
    return unit_ball_volume(rule.n_features) * math.exp(-0.5 * rule.logdet_inv)


def spread_volume(spread: np.ndarray) -> float:
    """Volume of an axis-aligned ellipsoid with the given per-axis radii."""
    return unit_ball_volume(spread.shape[0]) * float(np.prod(np.abs(spread)))


@lru_cache(maxsize=None)
def overlap_threshold(u: int, alpha: float) -> float:
    """Firing level below which a sample counts as outside every rule.

    exp(-q) with q the upper critical value of the chi-square distribution
    with u degrees of freedom at significance alpha.
    """
    return float(np.exp(-chi2.ppf(1.0 - alpha, df=u)))


# ---------------------------------------------------------------------------
# recursive stream density

@dataclass
class DQEvaluator:
    """Frozen view of one density step, evaluable at arbitrary points."""

    u_acc: float
    alpha_acc: np.ndarray
    c_acc: float
    dq_prev: float
    inv_cov: np.ndarray

    def at(self, point: np.ndarray) -> float:
        a = float(point @ self.inv_cov @ point)
        b = self.dq_prev * float(point @ self.alpha_acc)
        denom = self.u_acc * (1.0 + a) - 2.0 * b + self.c_acc
        if denom <= 0.0:
            return 0.0
        return math.sqrt(self.u_acc / denom)


@dataclass
class DQState:
    """Accumulators of the recursive density over the learned stream."""

    u_acc: float
    alpha_acc: np.ndarray
    c_acc: float
    prev_dq: float
    prev_x: Optional[np.ndarray]
    n: int = 0
    clipped: bool = False  # set when a non-positive radicand was clamped

    @classmethod
    def fresh(cls, n_features: int) -> "DQState":
        return cls(0.0, np.zeros(n_features), 0.0, 1.0, None)

    def commit(self, z: np.ndarray, inv_cov: np.ndarray) -> tuple[float, DQEvaluator]:
        """Advance the recursion with the current sample; returns its density.

        The same accumulators evaluated at a rule centroid (via the returned
        evaluator) yield that rule's density under the current hypothetical
        covariance.
        """
        self.n += 1
        dq_prev = self.prev_dq
        self.u_acc += dq_prev
        if self.n > 1:
            self.alpha_acc = self.alpha_acc + inv_cov @ self.prev_x
            self.c_acc += dq_prev * float(self.prev_x @ inv_cov @ self.prev_x)
        evaluator = DQEvaluator(self.u_acc, self.alpha_acc.copy(), self.c_acc,
                                dq_prev, inv_cov)
        if self.n == 1:
            dq = 1.0
        else:
            dq = evaluator.at(z)
            if dq == 0.0:
                self.clipped = True
        self.prev_x = np.asarray(z, dtype=float).copy()
        self.prev_dq = dq
        return dq, evaluator


# ---------------------------------------------------------------------------
# per-class potential

@dataclass
class ClassPotentialState:
    """Inverse-multiquadratic density of a point against each class's history."""

    sq_norms: np.ndarray            # accumulated squared norms per class
    sums: np.ndarray                # accumulated sample sums per class
    counts: np.ndarray              # past samples per class

    @classmethod
    def fresh(cls, n_features: int, n_classes: int) -> "ClassPotentialState":
        return cls(np.zeros(n_classes), np.zeros((n_classes, n_features)),
                   np.zeros(n_classes, dtype=int))

    def potential(self, z: np.ndarray, cls_idx: int) -> float:
        n = int(self.counts[cls_idx])
        if n < 1:
            return 0.0
        # denominator = n + sum of squared distances to past class samples
        denom = n * (float(z @ z) + 1.0) + float(self.sq_norms[cls_idx]) \
            - 2.0 * float(z @ self.sums[cls_idx])
        return math.sqrt(n / denom)

    def potentials(self, z: np.ndarray) -> np.ndarray:
        return np.array([self.potential(z, o) for o in range(self.counts.shape[0])])

    def ingest(self, z: np.ndarray, cls_idx: int) -> None:
        self.sq_norms[cls_idx] += float(z @ z)
        self.sums[cls_idx] += z
        self.counts[cls_idx] += 1


# ---------------------------------------------------------------------------
# new-rule placement

@dataclass
class Placement:
    """Centroid and per-axis spread planned for a hypothetical new rule."""

    centroid: np.ndarray
    spread: np.ndarray
    kind: str   # first | non_overlap | class_overlap | rule_overlap
    volume: float = field(init=False)

    def __post_init__(self):
        self.volume = spread_volume(self.spread)

    def inv_cov(self) -> np.ndarray:
        return np.diag(1.0 / (self.spread ** 2))


def dominant_class(rule: Rule) -> int:
    return int(np.argmax(rule.class_support))


def plan_new_rule(model: ModelState, x: np.ndarray, true_class: int) -> Placement:
    """Derive where a rule born at x would sit and how wide it would reach.

    Three regimes: far from every rule the sample keeps its own position
    with a spread taken from the nearest same-class rule; overlapping a
    region where another class dominates, the centroid retreats from the
    hostile neighbor and the spread shrinks by the neighbor-distance ratio;
    overlapping its own class, the centroid slides off the sibling rule.
    All geometry is raw-space; the premise weights shade only the firing
    gate that separates the overlap regimes.
    """
    from .model import firing_distance

    cfg = model.config
    u = model.n_features
    if not model.rules:
        spread = _clamp_spread(np.full(u, cfg.init_radius), cfg)
        return Placement(x.copy(), spread, "first")

    intra_idx, intra_dist = _nearest_of_class(model, x, true_class, same=True)
    inter_idx, inter_dist = _nearest_of_class(model, x, true_class, same=False)
    if intra_idx is not None and inter_idx is not None and inter_dist > 0.0:
        fac = intra_dist / inter_dist
    else:
        fac = cfg.overlap_factor_default

    if intra_idx is None:
        # First rule of this class: anchor the spread on the nearest rule.
        nearest = min(model.rules, key=lambda r: float(np.linalg.norm(x - r.centroid)))
        spread = cfg.overlap_factor_default * (x - nearest.centroid)
        return Placement(x.copy(), _clamp_spread(spread, cfg), "non_overlap")

    firing = max(math.exp(-firing_distance(r, x, model.weights)) for r in model.rules)
    c_intra = model.rules[intra_idx].centroid
    if firing < overlap_threshold(u, cfg.chi2_alpha) or inter_idx is None:
        spread = fac * (x - c_intra)
        return Placement(x.copy(), _clamp_spread(spread, cfg), "non_overlap")

    c_inter = model.rules[inter_idx].centroid
    zeta = model.class_potential.potentials(x)
    closest_is_true = zeta.max() <= 0.0 or int(np.argmax(zeta)) == true_class
    if not closest_is_true:
        centroid = x - 0.1 * (c_inter - x)
        kind = "class_overlap"
    else:
        centroid = x - 0.1 * (c_intra - c_inter)
        kind = "rule_overlap"
    spread = fac * (centroid - c_inter)
    return Placement(centroid, _clamp_spread(spread, cfg), kind)


def _nearest_of_class(model: ModelState, x: np.ndarray, true_class: int,
                      same: bool) -> tuple[Optional[int], float]:
    best, best_dist = None, math.inf
    for i, rule in enumerate(model.rules):
        if (dominant_class(rule) == true_class) != same:
            continue
        dist = float(np.linalg.norm(x - rule.centroid))
        if dist < best_dist:
            best, best_dist = i, dist
    return best, best_dist


def _clamp_spread(spread: np.ndarray, cfg: HyperParams) -> np.ndarray:
    # A fresh rule never reaches beyond the configured radius on any axis:
    # an uncapped cross-space spread would set a volume bar no later
    # hypothetical could beat, freezing both growth and adaptation.
    spread = np.abs(np.asarray(spread, dtype=float))
    return np.clip(spread, cfg.dist_floor, max(cfg.init_radius, cfg.dist_floor))


# ---------------------------------------------------------------------------
# growth decision

GROW, ADAPT, RESERVE = "grow", "adapt", "reserve"


def ds_check(model: ModelState, candidate_volume: float) -> bool:
    """Volume test: the hypothetical rule must out-cover every existing rule.

    Inclusive comparison with a relative tolerance: equal volumes arise
    routinely (clamped spreads against freshly born rules) and the two
    sides travel different float paths to the same exact value.
    """
    if not model.rules:
        return True
    return candidate_volume >= (1.0 - 1e-9) * max(rule_volume(r) for r in model.rules)


def grow_decision(model: ModelState, candidate_volume: float, dq_new: float,
                  dq_rules: np.ndarray, covered: bool = True) -> str:
    """Combine the volume and density tests into grow / adapt / reserve.

    Premise refinement presumes the sample sits within the coverage of an
    existing rule: refining a winner that fires at essentially zero drags
    it across the feature space.  A significant but uncovered sample whose
    density reads as interior is deferred instead.
    """
    if not model.rules:
        return GROW
    if not ds_check(model, candidate_volume):
        return RESERVE
    if dq_new >= float(dq_rules.max()) or dq_new <= float(dq_rules.min()):
        return GROW
    return ADAPT if covered else RESERVE


def init_new_rule(model: ModelState, placement: Placement,
                  true_class: int) -> Rule:
    """Materialize a rule at the planned placement.

    Consequents start from the winning rule (the most compatible concept),
    output covariance starts large so consequent learning converges to the
    batch solution, and the recurrent weight is the average of the existing
    ones.
    """
    from .params import psi_init_scale

    cfg = model.config
    c, k = model.n_classes, 2 * model.n_features + 1
    if model.rules:
        winner = max(model.rules, key=lambda r: math.exp(-r.mahalanobis_sq(placement.centroid)))
        out_weights = winner.out_weights.copy()
        rec = np.mean([r.rec_weights for r in model.rules], axis=0)
    else:
        out_weights = np.zeros((c, k))
        rec = np.full(c, cfg.recurrent_init)
    class_support = np.zeros(c)
    class_support[true_class] = 1.0
    return Rule(
        centroid=placement.centroid.copy(),
        inv_cov=placement.inv_cov(),
        out_weights=out_weights,
        rec_weights=np.clip(rec, 0.0, 1.0),
        out_cov=psi_init_scale(cfg.init_cov_scale, cfg.weight_decay) * np.eye(k),
        support=1.0,
        class_support=class_support,
    )


# ---------------------------------------------------------------------------
# winner premise adaptation

def adapt_winner(rule: Rule, x: np.ndarray, label: int) -> None:
    """Sequential maximum-likelihood update of the winner's ellipsoid.

    The centroid takes the running-mean step; the inverse covariance is
    updated directly by a rank-one (Sherman-Morrison) formula so no matrix
    inversion ever runs.  A failed positive-definiteness check rejects the
    covariance update and regularizes instead.
    """
    n = rule.support
    alpha = 1.0 / (n + 1.0)
    rule.centroid = rule.centroid + (x - rule.centroid) * alpha
    v = x - rule.centroid
    s = rule.inv_cov
    sv = s @ v
    vsv = float(v @ sv)
    candidate = s / (1.0 - alpha) \
        - (alpha / (1.0 - alpha)) * np.outer(sv, sv) / (1.0 + alpha * vsv)
    try:
        rule.set_inv_cov(candidate)
    except SingularCovarianceError:
        rule.set_inv_cov(0.5 * (s + s.T) + 1e-8 * np.eye(s.shape[0]))
    rule.support = n + 1.0
    rule.class_support[label] += 1.0


# ---------------------------------------------------------------------------
# significance pruning

# Below-history pruning needs a settled history: every rule's relevance
# starts at its init value and declines toward equilibrium, so with a
# shorter record the mean - std band would prune every young rule.
MIN_PRUNE_HISTORY = 10
# ... and a sustained breach: volume shares step at every structural event,
# so a single sample under the band is jitter, not decline.
PRUNE_STREAK = 12
# Effective sample-counter ceiling of the relevance recursion.
PPLUS_WINDOW = 100


def rule_significance(rule: Rule, volume_share: float) -> float:
    """Consequent mass weighted by the rule's share of the total volume.

    Absolute values keep positive and negative consequent entries from
    cancelling into false insignificance.
    """
    return float(np.abs(rule.out_weights).sum()) * volume_share


def ers_update_and_prune(model: ModelState) -> list[int]:
    """Update every rule's significance history; archive the decliners."""
    if not model.rules:
        return []
    volumes = np.array([rule_volume(r) for r in model.rules])
    total = float(volumes.sum())
    values = []
    for rule, vol in zip(model.rules, volumes):
        value = rule_significance(rule, vol / total if total > 0 else 0.0)
        rule.ers.update(value)
        values.append(value)
    if model.n_rules < 2:
        return []
    doomed = [i for i, rule in enumerate(model.rules)
              if rule.ers.n_obs >= MIN_PRUNE_HISTORY
              and rule.ers.below_streak >= PRUNE_STREAK]
    return _archive_rules(model, doomed, values)


def _archive_rules(model: ModelState, doomed: list[int],
                   scores: list[float]) -> list[int]:
    if not doomed:
        return []
    if len(doomed) >= model.n_rules:   # never empty the rule base
        keep = max(doomed, key=lambda i: scores[i])
        doomed = [i for i in doomed if i != keep]
    for i in sorted(doomed, reverse=True):
        rule = model.rules.pop(i)
        # the below-band episode concluded in this prune
        rule.ers.below_streak = 0
        rule.pplus.history.below_streak = 0
        rule.pplus.prune_value = rule.pplus.value
        model.archive.append(rule)
    return doomed


# ---------------------------------------------------------------------------
# recursive relevance (pruning, recall, forgetting)

def pplus_update(rule: Rule, x: np.ndarray) -> float:
    """Advance the rule's recursive relevance with the current sample.

    Relevance climbs toward 1 for samples at the centroid and collapses as
    the Mahalanobis distance (the root, not the quadratic form) grows;
    zero is absorbing, hence the init at 1.
    """
    d = math.sqrt(rule.mahalanobis_sq(x))
    stats = rule.pplus
    stats.n_obs += 1
    # Effective counter capped at a window: the recursion's step is ~1/n,
    # so an unbounded counter would freeze mature rules' relevance and
    # blind both pruning and recall to drift.
    n = min(stats.n_obs, PPLUS_WINDOW)
    p = stats.value ** 2
    denom = (n - 1.0) * p + (n - 2.0) * (1.0 - p) + p * d
    value = math.sqrt(((n - 1.0) * p) / denom) if denom > 0.0 else 0.0
    stats.prev_value = stats.value
    stats.value = value
    stats.history.update(value)
    return value


def pplus_prune(model: ModelState) -> list[int]:
    """Archive rules whose relevance dropped below their own history band."""
    if model.n_rules < 2:
        return []
    scores = [r.pplus.value for r in model.rules]
    doomed = [i for i, rule in enumerate(model.rules)
              if rule.pplus.history.n_obs >= MIN_PRUNE_HISTORY
              and rule.pplus.history.below_streak >= PRUNE_STREAK]
    return _archive_rules(model, doomed, scores)


def recall_check(model: ModelState, dq_new: float,
                 dq_rules: np.ndarray) -> Optional[int]:
    """Reinstate an archived rule that became relevant again.

    The candidate's relevance must beat every live density (hypothetical
    included) and must have recovered above its value at prune time, so a
    freshly pruned rule cannot bounce straight back.  A candidate whose
    centroid already sits inside a live rule's confidence ellipsoid stays
    archived: recall exists to restore uncovered concepts, not duplicates.
    """
    if not model.archive:
        return None
    gate = -math.log(overlap_threshold(model.n_features, model.config.chi2_alpha))
    live_max = dq_new if dq_rules.size == 0 else max(dq_new, float(dq_rules.max()))
    best, best_value = None, live_max
    for i, rule in enumerate(model.archive):
        value = rule.pplus.value
        if value <= best_value or value <= rule.pplus.prune_value:
            continue
        if any(live.mahalanobis_sq(rule.centroid) <= gate for live in model.rules):
            continue
        best, best_value = i, value
    return best


def recall_rule(model: ModelState, archive_idx: int) -> Rule:
    rule = model.archive.pop(archive_idx)
    model.rules.append(rule)
    return rule


def forgetting_update(rule: Rule) -> tuple[float, float]:
    """Per-rule forgetting driven by the relevance change rate.

    Returns (lam, lam_trans): lam feeds the consequent learner as its
    forgetting factor; lam_trans (clamped to [0, 0.99] so support can only
    decay) scales down the rule's population.
    """
    lam = 1.0 - 0.1 * (rule.pplus.value - rule.pplus.prev_value)
    lam_trans = min(max(-9.9 * lam + 9.9, 0.0), 0.99)
    if lam_trans > 0.0:
        factor = 1.0 - lam_trans
        rule.support *= factor
        rule.class_support *= factor
    return lam, lam_trans


# ---------------------------------------------------------------------------
# splitting

def split_check_and_split(model: ModelState, winner_idx: int) -> bool:
    """Split an oversized winner into two children along its principal axis.

    Requires either a developed rule base (M >= 2) or a well-supported
    winner, so a lone fresh rule is not split immediately.
    """
    cfg = model.config
    rule = model.rules[winner_idx]
    u = model.n_features
    if model.n_rules < 2 and rule.support < 2.0 * u:
        return False
    total = sum(rule_volume(r) for r in model.rules)
    if rule_volume(rule) <= cfg.split_tolerance * total:
        return False

    cov = np.linalg.inv(rule.inv_cov)
    eigvals, eigvecs = np.linalg.eigh(0.5 * (cov + cov.T))
    a_max = float(eigvals[-1])
    g_max = eigvecs[:, -1]
    offset = cfg.split_offset * math.sqrt(a_max) * g_max

    # Deflation as a pseudo-inverse of the rank-one principal component;
    # it zeroes the principal eigenvalue, so the PD fallback (variance
    # quartered along the axis) is the usual path.
    deflated = rule.inv_cov - np.outer(g_max, g_max) / a_max
    try:
        np.linalg.cholesky(0.5 * (deflated + deflated.T))
        children_inv = deflated
    except np.linalg.LinAlgError:
        children_inv = rule.inv_cov + (3.0 / a_max) * np.outer(g_max, g_max)

    def child(center: np.ndarray) -> Rule:
        return Rule(
            centroid=center,
            inv_cov=children_inv.copy(),
            out_weights=rule.out_weights.copy(),
            rec_weights=rule.rec_weights.copy(),
            out_cov=rule.out_cov.copy(),
            support=rule.support / 2.0,
            class_support=rule.class_support / 2.0,
            prev_temporal=rule.prev_temporal.copy(),
            pplus=copy.deepcopy(rule.pplus),
            ers=copy.deepcopy(rule.ers),
        )

    model.rules[winner_idx] = child(rule.centroid + offset)
    model.rules.append(child(rule.centroid - offset))
    return True


# ---------------------------------------------------------------------------
# merging

def bhattacharyya_overlap(a: Rule, b: Rule) -> float:
    """Printed overlap score: positive means the clusters overlap.

    Uses the combined inverse covariance both in the quadratic term and in
    the (sqrt-free) log-determinant ratio; with identical unit-determinant
    ellipsoids at one centroid the score is exactly zero (touching).
    """
    comb = 0.5 * (a.inv_cov + b.inv_cov)
    sign, logdet_comb = np.linalg.slogdet(comb)
    if sign <= 0:
        raise SingularCovarianceError("combined inverse covariance not PD")
    dc = a.centroid - b.centroid
    quad = float(dc @ comb @ dc) / 8.0
    return quad + 0.5 * (logdet_comb - a.logdet_inv - b.logdet_inv)


def merged_volume_hypothesis(a: Rule, b: Rule) -> float:
    """Volume of the moment-matched merger of two rules.

    Includes the between-centroid spread, so distant rules produce a merged
    ellipsoid whose volume explodes and fails the blow-up check.
    """
    na, nb = a.support, b.support
    total = na + nb
    cm = (na * a.centroid + nb * b.centroid) / total
    cov_a = np.linalg.inv(a.inv_cov)
    cov_b = np.linalg.inv(b.inv_cov)
    da, db = a.centroid - cm, b.centroid - cm
    cov = (na * (cov_a + np.outer(da, da)) + nb * (cov_b + np.outer(db, db))) / total
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        raise SingularCovarianceError("hypothetical merged covariance not PD")
    return unit_ball_volume(a.n_features) * math.exp(0.5 * logdet)


def merge_check(model: ModelState, i: int, j: int) -> tuple[bool, float]:
    """Overlap score positive, merged volume bounded, clusters touching.

    The printed score grows with centroid distance once cluster scales
    leave unit magnitude, flagging distant pairs as "overlapping"; the
    touching precondition (each centroid inside the other's confidence
    ellipsoid) restores the intended geometry before the printed checks.
    """
    a, b = model.rules[i], model.rules[j]
    gate = -math.log(overlap_threshold(model.n_features, model.config.chi2_alpha))
    if a.mahalanobis_sq(b.centroid) > gate or b.mahalanobis_sq(a.centroid) > gate:
        return False, 0.0
    score = bhattacharyya_overlap(a, b)
    if score <= 0.0:
        return False, score
    bound = model.n_features * (rule_volume(a) + rule_volume(b))
    return merged_volume_hypothesis(a, b) <= bound, score


def _linear_terms(weights: np.ndarray) -> np.ndarray:
    """Bias plus first-order entries of one class's consequent vector."""
    u = (weights.shape[0] - 1) // 2
    idx = np.concatenate(([0], np.arange(1, 2 * u + 1, 2)))
    return weights[idx]


def consequent_angle(a: Rule, b: Rule) -> float:
    """Largest per-class angle between the rules' linear consequent parts."""
    worst = 0.0
    for o in range(a.out_weights.shape[0]):
        va = _linear_terms(a.out_weights[o])
        vb = _linear_terms(b.out_weights[o])
        na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
        if na < 1e-15 or nb < 1e-15:
            continue
        cosang = float(np.clip(va @ vb / (na * nb), -1.0, 1.0))
        worst = max(worst, math.acos(cosang))
    return worst


def consequent_similarity(angle: float) -> float:
    """Piecewise angle score: 1 at 0 or pi, 0 at pi/2."""
    if angle <= math.pi / 2.0:
        return 1.0 - (2.0 / math.pi) * angle
    return (2.0 / math.pi) * (angle - math.pi / 2.0)


def merge_rules(model: ModelState, i: int, j: int, overlap_score: float) -> int:
    """Coalesce two rules; returns the surviving rule index.

    Premise parts merge by support weighting.  The consequent follows the
    participatory scheme: it stays at the dominant rule's weights unless the
    consequents agree more than the antecedents do, in which case the
    dominant weights are pushed along their difference.
    """
    a, b = model.rules[i], model.rules[j]
    dom, sub = (a, b) if a.support >= b.support else (b, a)
    total = a.support + b.support
    centroid = (a.centroid * a.support + b.centroid * b.support) / total
    inv_cov = (a.inv_cov * a.support + b.inv_cov * b.support) / total

    angle = consequent_angle(a, b)
    sim_out = consequent_similarity(angle)
    delta = 1.0 if sim_out >= overlap_score else 0.0
    share = dom.support / total
    out_weights = dom.out_weights + share * delta * (dom.out_weights - sub.out_weights)

    merged = Rule(
        centroid=centroid,
        inv_cov=inv_cov,
        out_weights=out_weights,
        rec_weights=dom.rec_weights.copy(),
        out_cov=dom.out_cov.copy(),
        support=total,
        class_support=a.class_support + b.class_support,
        prev_temporal=dom.prev_temporal.copy(),
        pplus=copy.deepcopy(dom.pplus),
        ers=copy.deepcopy(dom.ers),
    )
    keep, drop = (i, j) if i < j else (j, i)
    model.rules[keep] = merged
    del model.rules[drop]
    return keep
