"""Per-image score report persisted as CSV plus a JSON summary."""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class ScoreReport:
    image_ids: list
    labels: np.ndarray        # binary, 1 = anomalous
    s_con: np.ndarray         # (n, K)
    s_cls: np.ndarray         # (n, K)
    scores: np.ndarray        # (n,) final anomaly scores
    auroc: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.image_ids)
        if not (len(self.labels) == len(self.scores) == self.s_con.shape[0]
                == self.s_cls.shape[0] == n):
            raise ValueError("score report row counts disagree")

    def write_csv(self, path) -> None:
        k = self.s_con.shape[1]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["image_id", "label"]
            header += [f"s_con_{i}" for i in range(k)]
            header += [f"s_cls_{i}" for i in range(k)]
            header += ["score"]
            writer.writerow(header)
            for i, image_id in enumerate(self.image_ids):
                row = [image_id, int(self.labels[i])]
                row += [f"{v:.8g}" for v in self.s_con[i]]
                row += [f"{v:.8g}" for v in self.s_cls[i]]
                row.append(f"{self.scores[i]:.8g}")
                writer.writerow(row)

    def write_summary(self, path) -> None:
        summary = {"auroc": self.auroc, "n_images": len(self.image_ids)}
        summary.update(self.metadata)
        Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
