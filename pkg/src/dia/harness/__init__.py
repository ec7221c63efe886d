from .config import ConfigError, ExperimentConfig, load_config, save_config
from .manifest import MANIFEST_FORMAT_VERSION, RunManifest
from .optim import LARS, build_optimizer
from .runs import evaluate, resolve_datasets, train_dia

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "LARS",
    "MANIFEST_FORMAT_VERSION",
    "RunManifest",
    "build_optimizer",
    "evaluate",
    "load_config",
    "resolve_datasets",
    "save_config",
    "train_dia",
]
