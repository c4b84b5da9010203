"""Prequential (test-then-train) stream evaluation.

The training phase predicts each sample first, then offers it to the
selection stage; granted labels feed the learning pipeline.  At the end of
training the reserved buffer replays.  The test phase only classifies and
never mutates the model.  With a file oracle the whole run is deterministic
given (stream, config, seed).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from .config import HyperParams
from .dataset import Normalizer
from .learner import OnlineLearner
from .model import StreamSample, predict_outputs
from .selection import Decision


class LabelOracle(Protocol):
    def query(self, sample: StreamSample, decision: Decision) -> Optional[int]:
        """Return the sample's class, or None when no label can be provided."""


class FileOracle:
    """Answers queries from the ground truth carried by the stream itself."""

    def query(self, sample: StreamSample, decision: Decision) -> Optional[int]:
        return None if sample.label is None else int(sample.label)


@dataclass
class RunReport:
    """Prequential metrics and traces of one run."""

    classification_rate: float
    runtime_seconds: float
    labeled_count: int
    final_rule_count: int
    rule_trace: list[tuple[int, int]]
    feature_weight_trace: list[tuple[int, list[float]]]
    event_log: list[dict]
    preq_correct: list[int]
    budget_spent_trace: list[float]
    n_train: int
    n_test: int
    reserved_remaining: int
    seed: Optional[int] = None

    def to_dict(self, include_runtime: bool = True) -> dict:
        data = {
            "classification_rate": self.classification_rate,
            "labeled_count": self.labeled_count,
            "final_rule_count": self.final_rule_count,
            "rule_trace": [list(t) for t in self.rule_trace],
            "feature_weight_trace": [[i, list(w)] for i, w in self.feature_weight_trace],
            "event_log": self.event_log,
            "preq_correct": self.preq_correct,
            "budget_spent_trace": self.budget_spent_trace,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "reserved_remaining": self.reserved_remaining,
            "seed": self.seed,
        }
        if include_runtime:
            data["runtime_seconds"] = self.runtime_seconds
        return data

    def prequential_accuracy(self, tail_frac: float = 1.0) -> float:
        """Mean test-then-train correctness over the trailing fraction."""
        if not self.preq_correct:
            return 0.0
        k = max(1, int(len(self.preq_correct) * tail_frac))
        tail = self.preq_correct[-k:]
        return float(sum(tail)) / len(tail)


def run_prequential(learner: OnlineLearner, stream: list[StreamSample],
                    oracle: LabelOracle, split: tuple[int, int],
                    normalizer: Optional[Normalizer] = None,
                    seed: Optional[int] = None,
                    per_sample=None) -> RunReport:
    """Train on the first split[0] samples, then test on the next split[1]."""
    n_train, n_test = split
    if n_train + n_test > len(stream):
        raise ValueError("split exceeds stream length")
    train, test = stream[:n_train], stream[n_train:n_train + n_test]
    if normalizer is None:
        normalizer = Normalizer.fit(train) if train else None

    started = time.perf_counter()
    rule_trace: list[tuple[int, int]] = []
    weight_trace: list[tuple[int, list[float]]] = []
    budget_trace: list[float] = []
    preq_correct: list[int] = []
    for sample in train:
        seen = normalizer.apply(sample) if normalizer else sample
        outcome = learner.process(seen, oracle)
        predicted = outcome.predicted if outcome.predicted is not None else 0
        if sample.label is not None:
            preq_correct.append(int(predicted == sample.label))
        rule_trace.append((sample.index, learner.model.n_rules))
        weight_trace.append((sample.index, [float(w) for w in learner.model.weights]))
        budget_trace.append(float(learner.model.selection.spent))
        if per_sample is not None:
            per_sample(outcome)

    learner.replay()

    correct = total = 0
    for sample in test:
        seen = normalizer.apply(sample) if normalizer else sample
        if learner.model.rules:
            predicted = int(np.argmax(predict_outputs(learner.model, seen.x)))
        else:
            predicted = 0  # empty model: fixed-guess fallback
        if sample.label is not None:
            total += 1
            correct += int(predicted == sample.label)
    runtime = time.perf_counter() - started

    return RunReport(
        classification_rate=correct / total if total else 0.0,
        runtime_seconds=runtime,
        labeled_count=learner.oracle_calls,
        final_rule_count=learner.model.n_rules,
        rule_trace=rule_trace,
        feature_weight_trace=weight_trace,
        event_log=list(learner.events),
        preq_correct=preq_correct,
        budget_spent_trace=budget_trace,
        n_train=n_train,
        n_test=n_test,
        reserved_remaining=len(learner.buffer),
        seed=seed,
    )


def make_learner(n_features: int, n_classes: int,
                 config: HyperParams) -> OnlineLearner:
    return OnlineLearner(n_features=n_features, n_classes=n_classes, config=config)


@dataclass
class FoldSummary:
    reports: list[RunReport]
    cr_mean: float
    cr_std: float
    ns_mean: float
    fr_mean: float
    fr_std: float

    def to_dict(self) -> dict:
        return {
            "folds": [r.to_dict() for r in self.reports],
            "aggregate": {
                "classification_rate_mean": self.cr_mean,
                "classification_rate_std": self.cr_std,
                "labeled_count_mean": self.ns_mean,
                "final_rule_count_mean": self.fr_mean,
                "final_rule_count_std": self.fr_std,
            },
        }


def run_folds(stream: list[StreamSample], split: tuple[int, int],
              n_features: int, n_classes: int, config: HyperParams,
              folds: int, seed: int) -> FoldSummary:
    """Seeded random-permutation protocol: shuffle, run, aggregate."""
    reports = []
    for k in range(folds):
        rng = np.random.default_rng(seed + k)
        order = rng.permutation(len(stream))
        shuffled = [StreamSample(stream[i].x, stream[i].label, j)
                    for j, i in enumerate(order)]
        learner = make_learner(n_features, n_classes, config)
        reports.append(run_prequential(learner, shuffled, FileOracle(), split,
                                       seed=seed + k))
    crs = np.array([r.classification_rate for r in reports])
    frs = np.array([r.final_rule_count for r in reports])
    nss = np.array([r.labeled_count for r in reports])
    return FoldSummary(reports, float(crs.mean()), float(crs.std()),
                       float(nss.mean()), float(frs.mean()), float(frs.std()))
