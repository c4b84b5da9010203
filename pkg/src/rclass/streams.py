"""Seeded synthetic stream generators for tests and experiments.

All generators emit features inside [0, 1] so they plug straight into the
premise space without normalization.  Cluster means are chosen to differ in
every coordinate, which keeps hypothetical-rule volumes meaningful.
"""

from __future__ import annotations

import csv

import numpy as np

from .model import StreamSample

# Latin-square anchors in [0,1]^4: every coordinate takes a distinct level
# per class, so any two classes differ by at least 0.25 on every axis
# (pairwise distances >= 0.87).
ANCHORS_4 = np.array([
    [0.90, 0.40, 0.65, 0.15],
    [0.15, 0.65, 0.90, 0.40],
    [0.65, 0.15, 0.40, 0.90],
    [0.40, 0.90, 0.15, 0.65],
])

# Anchors for the drifted regime: another Latin square on the same levels,
# every class moves, and every drifted cluster stays at least 0.5 away
# from every original cluster.
ANCHORS_4_DRIFTED = np.array([
    [0.15, 0.65, 0.40, 0.90],
    [0.65, 0.15, 0.90, 0.40],
    [0.40, 0.90, 0.65, 0.15],
    [0.90, 0.40, 0.15, 0.65],
])


def _emit(rng: np.random.Generator, mean: np.ndarray, std: float) -> np.ndarray:
    x = rng.normal(mean, std)
    return np.clip(x, 0.0, 1.0)


def gaussian_stream(n: int, seed: int, means: np.ndarray | None = None,
                    std: float = 0.06,
                    class_probs: np.ndarray | None = None) -> list[StreamSample]:
    """I.i.d. stream of Gaussian class clusters."""
    rng = np.random.default_rng(seed)
    means = ANCHORS_4 if means is None else np.asarray(means, dtype=float)
    c = means.shape[0]
    probs = np.full(c, 1.0 / c) if class_probs is None else np.asarray(class_probs)
    labels = rng.choice(c, size=n, p=probs / probs.sum())
    return [StreamSample(_emit(rng, means[label], std), int(label), i)
            for i, label in enumerate(labels)]


def drifting_stream(n: int, seed: int, std: float = 0.06,
                    drift_at: float = 0.5,
                    return_at: float = 0.8) -> list[StreamSample]:
    """Sudden drift to shifted clusters, then a cyclic return to the originals."""
    rng = np.random.default_rng(seed)
    k1, k2 = int(n * drift_at), int(n * return_at)
    samples = []
    for i in range(n):
        means = ANCHORS_4 if (i < k1 or i >= k2) else ANCHORS_4_DRIFTED
        label = int(rng.integers(means.shape[0]))
        samples.append(StreamSample(_emit(rng, means[label], std), label, i))
    return samples


def imbalanced_stream(n: int, seed: int, minority_frac: float = 0.05,
                      std: float = 0.09,
                      separation: float = 0.28) -> list[StreamSample]:
    """Two overlapping classes with a rare minority class."""
    rng = np.random.default_rng(seed)
    base = np.array([0.40, 0.45, 0.55, 0.50])
    shift = np.full(4, separation / 2.0)
    means = np.stack([base - shift, base + shift])
    labels = (rng.random(n) < minority_frac).astype(int)
    return [StreamSample(_emit(rng, means[label], std), int(label), i)
            for i, label in enumerate(labels)]


def write_csv(samples: list[StreamSample], path: str,
              feature_names: list[str] | None = None,
              class_to_flags: dict[int, str] | None = None) -> None:
    """Write a stream as a CSV with binary wear-flag label columns."""
    if not samples:
        raise ValueError("nothing to write")
    u = samples[0].x.shape[0]
    if feature_names is None:
        feature_names = [f"feature_{j + 1}" for j in range(u)]
    if class_to_flags is None:
        class_to_flags = {0: "000", 1: "100", 2: "110", 3: "111"}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(feature_names) + ["Flank", "Nose", "Chipped"])
        for s in samples:
            if s.label is None:
                raise ValueError("CSV export needs labeled samples")
            flags = class_to_flags[int(s.label)]
            writer.writerow([f"{v:.6f}" for v in s.x] + list(flags))
