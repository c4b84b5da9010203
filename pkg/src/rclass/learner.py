"""Per-sample orchestration of selection, structure and parameter learning.

Each stream sample is first predicted (test-then-train), then offered to
the selection stage.  Once a label is granted the sample runs the learning
pipeline: feature-weighting statistics, temporal commit, the grow / adapt /
reserve decision, relevance and forgetting updates, consequent and
recurrent-weight learning on the winner, pruning, recall, and merging.
Reserved samples stop after the decision and wait for replay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import HyperParams
from .features import fda_ingest, fda_step, lofo_weights
from .model import (ModelState, PredictionDetail, StreamSample,
                    commit_temporal, firing_distance, predict_detail)
from .params import fwgrls_update, psi_init_scale, zedm_update
from .reserve import ReservedBuffer
from .selection import commit_decision, decide, input_conflict
from .structure import (ADAPT, GROW, adapt_winner, ers_update_and_prune,
                        overlap_threshold,
                        forgetting_update, grow_decision, init_new_rule,
                        plan_new_rule, pplus_prune, pplus_update, recall_check,
                        recall_rule, merge_check, merge_rules,
                        split_check_and_split)


@dataclass
class StepOutcome:
    """What happened to one stream sample."""

    index: int
    predicted: Optional[int]
    queried: bool
    labeled: bool
    label: Optional[int] = None
    decision: Optional[str] = None
    out_conf: float = 0.5


@dataclass
class OnlineLearner:
    """Single-pass learner owning the model and the deferred buffer."""

    n_features: int
    n_classes: int
    config: HyperParams = field(default_factory=HyperParams)
    model: ModelState = field(init=False)
    buffer: ReservedBuffer = field(init=False)
    events: list[dict] = field(default_factory=list)
    oracle_calls: int = 0
    labeled_count: int = 0
    learned_count: int = 0

    def __post_init__(self):
        self.model = ModelState(self.n_features, self.n_classes, self.config)
        self.buffer = ReservedBuffer(self.config.reserve_capacity)

    # -- streaming ---------------------------------------------------------

    def process(self, sample: StreamSample, oracle) -> StepOutcome:
        """Test-then-train step for one stream sample."""
        model = self.model
        detail: Optional[PredictionDetail] = None
        posterior = None
        if model.rules:
            detail = predict_detail(model, sample.x)
            posterior = input_conflict(model, sample.x)
        decision = decide(
            model,
            detail.y if detail is not None else None,
            posterior,
            model.selection,
            self.config.imbalance_gate,
            self.config.enable_minority_override,
        )
        label = None
        if decision.query:
            self.oracle_calls += 1
            label = oracle.query(sample, decision)
        commit_decision(model.selection, decision, labeled=label is not None,
                        label=label)
        outcome = StepOutcome(
            index=sample.index,
            predicted=int(np.argmax(detail.y)) if detail is not None else None,
            queried=decision.query,
            labeled=label is not None,
            label=label,
            out_conf=decision.out_conf,
        )
        if label is not None:
            self.labeled_count += 1
            outcome.decision = self.learn(sample, label, detail=detail)
        model.n_seen += 1
        return outcome

    # -- learning pipeline ---------------------------------------------------

    def learn(self, sample: StreamSample, label: int,
              detail: Optional[PredictionDetail] = None,
              allow_reserve: bool = True) -> str:
        """Run the admitted-sample pipeline; returns the structural decision."""
        model, cfg = self.model, self.config
        x = np.asarray(sample.x, dtype=float)

        fda_ingest(model.fweights, x, label)
        fda_step(model.fweights, cfg.fda_rate)

        if model.rules and detail is None:
            detail = predict_detail(model, x)
        if detail is not None:
            commit_temporal(model, detail)
            winner_rule = model.rules[detail.winner]
        else:
            winner_rule = None

        placement = plan_new_rule(model, x, label)
        dq_new, evaluator = model.dq.commit(x, placement.inv_cov())
        dq_rules = np.array([evaluator.at(r.centroid) for r in model.rules])
        covered = bool(model.rules) and (
            max(math.exp(-firing_distance(r, x, model.weights))
                for r in model.rules)
            >= overlap_threshold(model.n_features, cfg.chi2_alpha))
        decision = grow_decision(model, placement.volume, dq_new, dq_rules,
                                 covered=covered)
        model.class_potential.ingest(x, label)

        newborn = None
        if decision == GROW:
            newborn = init_new_rule(model, placement, label)
            model.rules.append(newborn)
            self._event(sample.index, "grow", kind=placement.kind)
        elif decision == ADAPT:
            winner_idx = self._winner_index(x)
            adapt_winner(model.rules[winner_idx], x, label)
            if split_check_and_split(model, winner_idx):
                self._event(sample.index, "split")
        elif allow_reserve:
            self.buffer.reserve(sample, stored_at=model.n_seen)

        for rule in model.rules:
            pplus_update(rule, x)
        for rule in model.archive:
            pplus_update(rule, x)

        lams = {}
        for rule in model.rules:
            lams[id(rule)], _ = forgetting_update(rule)

        # Consequent and recurrent-weight learning on the winning rule.  A
        # just-born rule keeps its initial parameters for this step.
        w_idx = self._winner_index(x)
        rule = model.rules[w_idx]
        if rule is not newborn and detail is not None:
            targets = np.zeros(model.n_classes)
            targets[label] = 1.0
            firing = min(1.0, math.exp(-firing_distance(rule, x, model.weights)))
            lam = min(1.0, lams.get(id(rule), 1.0))
            fwgrls_update(rule, detail.x_e, max(firing, 1e-12), targets, lam,
                          cfg.weight_decay,
                          psi_cap=psi_init_scale(cfg.init_cov_scale,
                                                 cfg.weight_decay))
            if winner_rule is not None and winner_rule in model.rules:
                zedm_update(model, detail, winner_rule, detail.winner, targets)

        for idx in ers_update_and_prune(model):
            self._event(sample.index, "prune", method="significance", rule=idx)
        for idx in pplus_prune(model):
            self._event(sample.index, "prune", method="relevance", rule=idx)

        dq_rules_now = np.array([evaluator.at(r.centroid) for r in model.rules])
        recalled = recall_check(model, dq_new, dq_rules_now)
        if recalled is not None:
            recall_rule(model, recalled)
            self._event(sample.index, "recall")

        if model.n_rules >= 2:
            w_idx = self._winner_index(x)
            center = model.rules[w_idx].centroid
            others = [(i, float(np.linalg.norm(r.centroid - center)))
                      for i, r in enumerate(model.rules) if i != w_idx]
            nearest = min(others, key=lambda t: t[1])[0]
            ok, score = merge_check(model, w_idx, nearest)
            if ok:
                merge_rules(model, w_idx, nearest, score)
                self._event(sample.index, "merge")

        self._finish_step()
        return decision

    def _winner_index(self, x: np.ndarray) -> int:
        w = self.model.weights
        return int(np.argmax([-firing_distance(r, x, w)
                              for r in self.model.rules]))

    def replay(self) -> int:
        """Learn every reserved sample once; repeat reserves are dropped."""
        drained = self.buffer.drain()
        for item in drained:
            self.learn(item.sample, int(item.sample.label), detail=None,
                       allow_reserve=False)
        return len(drained)

    # -- helpers -------------------------------------------------------------

    def _finish_step(self) -> None:
        self.learned_count += 1
        if self.learned_count % self.config.window == 0:
            self.model.fweights.weights = lofo_weights(self.model.fweights)

    def _event(self, index: int, etype: str, **extra) -> None:
        event = {"index": index, "type": etype, "rules": self.model.n_rules}
        event.update(extra)
        self.events.append(event)
