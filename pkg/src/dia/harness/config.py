"""Flat key=value experiment configuration.

Config files are INI-style with fixed sections; every field always has a
value, and runs write back the fully resolved config so nothing rests on
implicit defaults.
"""

import configparser
import dataclasses
import hashlib
from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    """Invalid configuration file or field value."""


@dataclass
class ExperimentConfig:
    # run
    run_dir: str = "runs/run"
    seed: int = 0
    # dataset
    dataset_kind: str = "synth"          # synth | folder | npz
    dataset_path: str = ""
    normal_labels: tuple = (0,)
    synth_n_normal: int = 200
    synth_n_anomalous: int = 100
    synth_n_test_normal: int = 100
    synth_side: int = 32
    synth_density: float = 0.02
    synth_amplitude: float = 0.8
    subsample_gamma: float = 1.0
    contamination_ratio: float = 0.0
    # diffusion
    diff_steps: int = 25000
    diff_batch_size: int = 16
    diff_lr: float = 8e-5
    diff_grad_accum: int = 2
    diff_ema_decay: float = 0.995
    diff_T: int = 1000
    diff_base_width: int = 64
    diff_channel_mults: tuple = (1, 2, 4)
    diff_blocks_per_level: int = 2
    diff_attention: bool = True
    denoiser_path: str = ""
    # dia
    dia_epochs: int = 200
    dia_batch_size: int = 32
    dia_lr: float = 1e-3
    dia_samples_per_epoch: int = 200
    dia_optimizer: str = "lars"          # lars | sgd
    encoder_base_width: int = 64
    projection_dim: int = 128
    # transforms
    shift_kind: str = "rotate"
    n_shifts: int = 4
    t_low: int = 30
    t_high: int = 130
    dissolve_method: str = "diffusion"
    dissolve_resolution: int = 32
    kernel_size: int = 7
    include_dissolved: bool = True
    aug_crop_scale_lo: float = 0.54
    aug_hflip_p: float = 0.5
    aug_jitter_p: float = 0.8
    aug_jitter_strength: float = 0.4     # hue uses a quarter of this
    aug_grayscale_p: float = 0.2
    # contrastive
    tau: float = 0.5
    gamma_cls: float = 1.0
    matrix_design: str = "a"

    def __post_init__(self):
        if self.dataset_kind not in ("synth", "folder", "npz"):
            raise ConfigError(f"unknown dataset_kind {self.dataset_kind!r}")
        if self.dia_optimizer not in ("lars", "sgd"):
            raise ConfigError(f"unknown dia_optimizer {self.dia_optimizer!r}")
        if self.dia_epochs < 1 or self.dia_epochs > 200:
            raise ConfigError("dia_epochs must lie in [1, 200]")
        if self.dataset_kind != "synth" and not self.dataset_path:
            raise ConfigError(f"dataset_kind={self.dataset_kind} needs dataset_path")

    def config_hash(self) -> str:
        body = "\n".join(
            f"{k}={v}" for k, v in sorted(dataclasses.asdict(self).items())
        )
        return hashlib.sha256(body.encode()).hexdigest()[:16]


_SECTIONS = {
    "run": ("run_dir", "seed"),
    "dataset": ("dataset_kind", "dataset_path", "normal_labels",
                "synth_n_normal", "synth_n_anomalous", "synth_n_test_normal",
                "synth_side", "synth_density", "synth_amplitude",
                "subsample_gamma", "contamination_ratio"),
    "diffusion": ("diff_steps", "diff_batch_size", "diff_lr", "diff_grad_accum",
                  "diff_ema_decay", "diff_T", "diff_base_width",
                  "diff_channel_mults", "diff_blocks_per_level",
                  "diff_attention", "denoiser_path"),
    "dia": ("dia_epochs", "dia_batch_size", "dia_lr", "dia_samples_per_epoch",
            "dia_optimizer", "encoder_base_width", "projection_dim"),
    "transforms": ("shift_kind", "n_shifts", "t_low", "t_high",
                   "dissolve_method", "dissolve_resolution", "kernel_size",
                   "include_dissolved", "aug_crop_scale_lo", "aug_hflip_p",
                   "aug_jitter_p", "aug_jitter_strength", "aug_grayscale_p"),
    "contrastive": ("tau", "gamma_cls", "matrix_design"),
}

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
_ALL_FIELDS = {name for names in _SECTIONS.values() for name in names}
assert _ALL_FIELDS == set(_FIELD_TYPES)


def _parse_value(name: str, text: str):
    kind = _FIELD_TYPES[name]
    if isinstance(kind, str):
        kind = {"int": int, "float": float, "bool": bool,
                "tuple": tuple, "str": str}[kind]
    text = text.strip()
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind is bool:
            if text.lower() in ("true", "1", "yes"):
                return True
            if text.lower() in ("false", "0", "no"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if kind is tuple:
            if not text:
                return ()
            return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {exc}") from exc
    return text


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case-sensitive field names
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    values = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            values[key] = _parse_value(key, raw)
    try:
        return ExperimentConfig(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def save_config(config: ExperimentConfig, path) -> None:
    """Write the fully resolved config (every field, explicit value)."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    for section, names in _SECTIONS.items():
        parser[section] = {
            name: _format_value(getattr(config, name)) for name in names
        }
    with open(path, "w") as fh:
        parser.write(fh)


def apply_overrides(config: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    """Return a copy with string-valued overrides parsed into field types."""
    values = dataclasses.asdict(config)
    for key, raw in overrides.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = _parse_value(key, raw) if isinstance(raw, str) else raw
    values["normal_labels"] = tuple(values["normal_labels"])
    values["diff_channel_mults"] = tuple(values["diff_channel_mults"])
    return ExperimentConfig(**values)
