"""Non-stationary fuzzy time series: train once, perturb the fuzzy sets as the data drifts."""
from .drift import DataError, Dataset, DriftSpec, generate, load_csv
from .evaluation import MetricReport, evaluate, mape, rmse, theil_u1, theil_u2
from .fts import FtsModel, RuleBase, StreamResult, train
from .fuzzy import Perturbation, Triangle, membership
from .kernels import backend_name, use_backend
from .metamodels import RetrainPolicy, run_incremental_ensemble, run_time_variant
from .model import CheckpointError, NsftsModel, train_nsfts
from .partitioner import Partition, Universe, grid_partition, universe_from_data

__version__ = "0.1.0"

__all__ = [
    "CheckpointError", "DataError", "Dataset", "DriftSpec", "FtsModel", "MetricReport", "NsftsModel",
    "Partition", "Perturbation", "RetrainPolicy", "RuleBase", "StreamResult", "Triangle", "Universe",
    "backend_name", "evaluate", "generate", "grid_partition", "load_csv", "mape", "membership", "rmse",
    "run_incremental_ensemble", "run_time_variant", "theil_u1", "theil_u2", "train", "train_nsfts",
    "universe_from_data", "use_backend",
]
