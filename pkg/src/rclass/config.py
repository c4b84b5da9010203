"""Hyperparameter container shared by every learning stage."""

from __future__ import annotations

import ast
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class HyperParams:
    """Knobs of the classifier.

    Defaults follow the standard settings: annotation window of 100
    samples, threshold step 0.05, split tolerance 0.8, large initial
    output covariance 1e5, weight-decay and feature-weighting rates of
    1e-3, unit smoothing bandwidth, and learning-rate factors 1.1/0.9.
    """

    budget: float = 0.5              # max long-run labeled fraction, in [0, 1]
    threshold_step: float = 0.05     # multiplicative conflict-threshold step
    window: int = 100                # annotation / trace window size
    split_tolerance: float = 0.8     # volume share that triggers a split, in [0.5, 0.9]
    split_offset: float = 1.0        # child offset scale along the principal axis
    init_cov_scale: float = 1e5      # initial output-covariance magnitude
    weight_decay: float = 1e-3       # consequent weight-decay strength
    fda_rate: float = 1e-3           # feature-weighting gradient-ascent rate
    parzen_bandwidth: float = 1.0    # error-density smoothing parameter
    lr_up: float = 1.1               # recurrent-rate raise factor, in (1, 1.5]
    lr_down: float = 0.9             # recurrent-rate lower factor, in [0.5, 1)
    chi2_alpha: float = 0.05         # significance level for the overlap gate
    imbalance_gate: float = 0.3      # imbalance factor that arms the minority override

    # Artifact knobs the update formulas leave open.
    init_radius: float = 0.5         # per-axis radius of the very first rule
    dist_floor: float = 1e-2         # minimum per-axis spread of a fresh rule
    overlap_factor_default: float = 1.0  # spread ratio when no neighbor pair exists
    recurrent_init: float = 0.8      # recurrent weight of the very first rule
    zedm_eta_init: float = 0.05      # initial recurrent-weight learning rate
    enable_minority_override: bool = True
    scatter_uses_class_mean: bool = True  # within-class scatter subtrahend switch
    reserve_capacity: int = 1000     # deferred-sample buffer bound (FIFO)

    def __post_init__(self):
        checks = [
            (0.0 <= self.budget <= 1.0, "budget must be in [0, 1]"),
            (0.0 < self.threshold_step < 1.0, "threshold_step must be in (0, 1)"),
            (self.window >= 2, "window must be at least 2"),
            (0.5 <= self.split_tolerance <= 0.9, "split_tolerance must be in [0.5, 0.9]"),
            (self.split_offset > 0.0, "split_offset must be positive"),
            (self.init_cov_scale > 0.0, "init_cov_scale must be positive"),
            (self.weight_decay >= 0.0, "weight_decay must be nonnegative"),
            (self.fda_rate > 0.0, "fda_rate must be positive"),
            (self.parzen_bandwidth > 0.0, "parzen_bandwidth must be positive"),
            (1.0 < self.lr_up <= 1.5, "lr_up must be in (1, 1.5]"),
            (0.5 <= self.lr_down < 1.0, "lr_down must be in [0.5, 1)"),
            (0.0 < self.chi2_alpha < 1.0, "chi2_alpha must be in (0, 1)"),
            (0.0 <= self.imbalance_gate <= 1.0, "imbalance_gate must be in [0, 1]"),
            (self.init_radius > 0.0, "init_radius must be positive"),
            (self.dist_floor > 0.0, "dist_floor must be positive"),
            (self.overlap_factor_default > 0.0, "overlap_factor_default must be positive"),
            (0.0 <= self.recurrent_init <= 1.0, "recurrent_init must be in [0, 1]"),
            (self.zedm_eta_init > 0.0, "zedm_eta_init must be positive"),
            (self.reserve_capacity >= 1, "reserve_capacity must be at least 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)

    def with_overrides(self, **kwargs) -> "HyperParams":
        return replace(self, **kwargs)


_FIELD_TYPES = {f.name: f.type for f in fields(HyperParams)}


def parse_config_pairs(pairs: dict[str, str]) -> HyperParams:
    """Build HyperParams from string key=value pairs (CLI / config file)."""
    kwargs = {}
    for key, raw in pairs.items():
        if key not in _FIELD_TYPES:
            raise KeyError(f"unknown config key: {key}")
        value = ast.literal_eval(raw)
        kwargs[key] = value
    return HyperParams(**kwargs)


def load_config_file(path: str) -> HyperParams:
    """Parse a key = value config file; '#' starts a comment."""
    pairs: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, value = line.split("=", 1)
            pairs[key.strip()] = value.strip()
    return parse_config_pairs(pairs)
