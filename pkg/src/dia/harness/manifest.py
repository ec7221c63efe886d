"""Run manifest: an immutable record tying a run's config, data, and
artifacts together."""

from dataclasses import dataclass, field
from pathlib import Path

from ..io_utils import read_kv, write_kv

MANIFEST_FORMAT_VERSION = 1


@dataclass
class RunManifest:
    config_hash: str
    config_path: str
    dataset_fingerprint: str
    checkpoint_paths: dict = field(default_factory=dict)   # name -> path
    metric_paths: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0
    format_version: int = MANIFEST_FORMAT_VERSION

    def save(self, path) -> None:
        path = Path(path)
        if path.exists():
            raise FileExistsError(f"manifest already written: {path}")
        entries = {
            "format_version": self.format_version,
            "config_hash": self.config_hash,
            "config_path": self.config_path,
            "dataset_fingerprint": self.dataset_fingerprint,
            "wall_clock_s": round(self.wall_clock_s, 3),
        }
        for name, p in sorted(self.checkpoint_paths.items()):
            entries[f"checkpoint_{name}"] = p
        for name, p in sorted(self.metric_paths.items()):
            entries[f"metric_{name}"] = p
        write_kv(path, entries)

    @classmethod
    def load(cls, path) -> "RunManifest":
        entries = read_kv(path)
        version = int(entries.pop("format_version"))
        if version != MANIFEST_FORMAT_VERSION:
            raise ValueError(
                f"manifest format version {version} != {MANIFEST_FORMAT_VERSION}"
            )
        checkpoints, metrics = {}, {}
        for key, value in list(entries.items()):
            if key.startswith("checkpoint_"):
                checkpoints[key[len("checkpoint_"):]] = value
            elif key.startswith("metric_"):
                metrics[key[len("metric_"):]] = value
        return cls(
            config_hash=entries["config_hash"],
            config_path=entries["config_path"],
            dataset_fingerprint=entries["dataset_fingerprint"],
            checkpoint_paths=checkpoints,
            metric_paths=metrics,
            wall_clock_s=float(entries["wall_clock_s"]),
            format_version=version,
        )
