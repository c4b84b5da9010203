"""Self-evolving recurrent fuzzy stream classifier with budgeted labeling."""

from .config import HyperParams, load_config_file, parse_config_pairs
from .dataset import DatasetSchema, Normalizer, load_dataset
from .harness import FileOracle, RunReport, run_folds, run_prequential
from .learner import OnlineLearner
from .model import (ModelState, Rule, StreamSample, chebyshev_expand, classify,
                    predict_outputs)
from .snapshot import snapshot_load, snapshot_save

__version__ = "0.1.0"

__all__ = [
    "HyperParams", "load_config_file", "parse_config_pairs",
    "DatasetSchema", "Normalizer", "load_dataset",
    "FileOracle", "RunReport", "run_folds", "run_prequential",
    "OnlineLearner",
    "ModelState", "Rule", "StreamSample", "chebyshev_expand", "classify",
    "predict_outputs",
    "snapshot_load", "snapshot_save",
    "__version__",
]
