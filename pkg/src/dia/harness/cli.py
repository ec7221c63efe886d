"""Command-line entry point.

Subcommands: train-diffusion, dissolve-grid, train-dia, eval, grid-search.
Exit codes: 0 success, 2 configuration error, 3 runtime error.

Every run writes the fully resolved config, a manifest, checkpoints/ and
metrics/ under the run directory.
"""

import argparse
import csv
import itertools
import sys
import time
from pathlib import Path

import numpy as np

from ..diffusion.checkpoint import DenoiserCheckpoint
from ..diffusion.train import DiffusionTrainConfig, train_denoiser
from ..contrastive.encoder import EncoderCheckpoint
from .config import ConfigError, apply_overrides, load_config, save_config
from .grids import DEFAULT_T_LIST, dissolve_grid_array, save_grid
from .manifest import RunManifest
from .runs import evaluate, resolve_datasets, train_dia

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _prepare_run_dir(config, subdir=None) -> Path:
    run_dir = Path(config.run_dir)
    if subdir:
        run_dir = run_dir / subdir
    for name in ("checkpoints", "metrics", "figures"):
        (run_dir / name).mkdir(parents=True, exist_ok=True)
    save_config(config, run_dir / "config.ini")
    return run_dir


def _write_manifest(run_dir, config, dataset_fp, checkpoints, metrics, t0):
    manifest = RunManifest(
        config_hash=config.config_hash(),
        config_path=str(run_dir / "config.ini"),
        dataset_fingerprint=dataset_fp,
        checkpoint_paths={k: str(v) for k, v in checkpoints.items()},
        metric_paths={k: str(v) for k, v in metrics.items()},
        wall_clock_s=time.time() - t0,
    )
    path = run_dir / "manifest.txt"
    if path.exists():
        path.unlink()
    manifest.save(path)
    return path


def cmd_train_diffusion(config) -> Path:
    t0 = time.time()
    run_dir = _prepare_run_dir(config)
    train, _ = resolve_datasets(config)
    diff_config = DiffusionTrainConfig(
        steps=config.diff_steps,
        batch_size=config.diff_batch_size,
        lr=config.diff_lr,
        grad_accum=config.diff_grad_accum,
        ema_decay=config.diff_ema_decay,
        T=config.diff_T,
        base_width=config.diff_base_width,
        channel_mults=config.diff_channel_mults,
        blocks_per_level=config.diff_blocks_per_level,
        attention=config.diff_attention,
        extra_meta={"config_hash": config.config_hash()},
    )
    checkpoint = train_denoiser(train, diff_config, seed=config.seed)
    ckpt_path = checkpoint.save(run_dir / "checkpoints" / "denoiser")
    _write_manifest(run_dir, config, train.fingerprint,
                    {"denoiser": ckpt_path}, {}, t0)
    print(f"denoiser checkpoint: {ckpt_path}")
    return ckpt_path


def _load_grid_images(paths) -> np.ndarray:
    from ..datasets import _load_image_file
    arrays = []
    for p in paths:
        p = Path(p)
        if not p.exists():
            raise FileNotFoundError(f"image input not found: {p}")
        if p.suffix == ".npy":
            arr = np.load(p)
            if arr.ndim == 3:
                arr = arr[None]
            arrays.extend(np.asarray(arr, dtype=np.float32))
        else:
            arrays.append(_load_image_file(p))
    if not arrays:
        raise ValueError("no grid input images")
    return np.stack(arrays)


def cmd_dissolve_grid(checkpoint_path, image_paths, t_list, out_path) -> Path:
    denoiser = DenoiserCheckpoint.load(checkpoint_path)
    images = _load_grid_images(image_paths)
    grid = dissolve_grid_array(denoiser, images, t_list)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_grid(grid, out_path)
    print(f"dissolve grid: {out_path}")
    return out_path


def cmd_train_dia(config, run_subdir=None) -> Path:
    t0 = time.time()
    run_dir = _prepare_run_dir(config, run_subdir)
    train, _ = resolve_datasets(config)
    denoiser = None
    if config.include_dissolved and config.dissolve_method == "diffusion":
        if not config.denoiser_path:
            raise ConfigError(
                "dissolve_method=diffusion requires denoiser_path"
            )
        denoiser = DenoiserCheckpoint.load(config.denoiser_path)
    checkpoint, history = train_dia(train, config, denoiser=denoiser)
    ckpt_path = checkpoint.save(run_dir / "checkpoints" / "encoder")
    curve_path = run_dir / "metrics" / "loss_curve.csv"
    with open(curve_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "loss"])
        for epoch, loss in enumerate(history):
            writer.writerow([epoch, f"{loss:.8g}"])
    _write_manifest(run_dir, config, train.fingerprint,
                    {"encoder": ckpt_path}, {"loss_curve": curve_path}, t0)
    print(f"encoder checkpoint: {ckpt_path}")
    return ckpt_path


def cmd_eval(config, encoder_path, run_subdir=None):
    t0 = time.time()
    run_dir = _prepare_run_dir(config, run_subdir)
    train, test = resolve_datasets(config)
    checkpoint = EncoderCheckpoint.load(encoder_path)
    report = evaluate(checkpoint, train, test, config)
    scores_path = run_dir / "metrics" / "scores.csv"
    summary_path = run_dir / "metrics" / "summary.json"
    report.write_csv(scores_path)
    report.write_summary(summary_path)
    _write_manifest(run_dir, config, train.fingerprint, {},
                    {"scores": scores_path, "summary": summary_path}, t0)
    print(f"auroc: {report.auroc:.4f} ({summary_path})")
    return report


def cmd_grid_search(config, sweeps: dict) -> Path:
    """One train-dia + eval run per combination; aggregated CSV sorted by
    AUROC descending. An empty sweep runs the baseline config once."""
    keys = sorted(sweeps)
    combos = list(itertools.product(*(sweeps[k] for k in keys))) or [()]
    rows = []
    for i, combo in enumerate(combos):
        overrides = dict(zip(keys, combo))
        run_config = apply_overrides(config, overrides)
        subdir = f"sweep_{i:03d}"
        encoder_path = cmd_train_dia(run_config, run_subdir=subdir)
        report = cmd_eval(run_config, encoder_path, run_subdir=subdir)
        rows.append((report.auroc, subdir, overrides))
    rows.sort(key=lambda r: -r[0])
    out = Path(config.run_dir) / "grid_search.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["auroc", "run"] + keys)
        for auroc_value, subdir, overrides in rows:
            writer.writerow([f"{auroc_value:.6f}", subdir]
                            + [overrides.get(k, "") for k in keys])
    print(f"grid search summary: {out}")
    return out


def _parse_sweeps(items) -> dict:
    sweeps = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"sweep must look like key=v1,v2 (got {item!r})")
        key, values = item.split("=", 1)
        sweeps[key.strip()] = [v.strip() for v in values.split(",") if v.strip()]
        if not sweeps[key.strip()]:
            raise ConfigError(f"sweep for {key!r} has no values")
    return sweeps


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dia",
        description="Fine-grained anomaly detection with dissolving transformations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key")
        return p

    add_config_cmd("train-diffusion", "train the denoiser used for dissolving")

    grid = sub.add_parser("dissolve-grid", help="emit a dissolve strength grid image")
    grid.add_argument("--checkpoint", required=True, help="denoiser checkpoint dir")
    grid.add_argument("--images", required=True, nargs="+",
                      help="image files or a .npy array in [0,1]")
    grid.add_argument("--t", default=",".join(str(t) for t in DEFAULT_T_LIST),
                      help="comma-separated timesteps")
    grid.add_argument("--out", required=True, help="output image path")

    add_config_cmd("train-dia", "train the contrastive encoder")

    ev = add_config_cmd("eval", "score a test split and report AUROC")
    ev.add_argument("--encoder", required=True, help="encoder checkpoint dir")

    gs = add_config_cmd("grid-search", "sweep config keys and aggregate AUROC")
    gs.add_argument("--sweep", action="append", metavar="KEY=V1,V2",
                    help="values to sweep for one config key")
    return parser


def _config_from_args(args):
    config = load_config(args.config)
    overrides = {}
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE (got {item!r})")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value
    return apply_overrides(config, overrides) if overrides else config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "train-diffusion":
            cmd_train_diffusion(_config_from_args(args))
        elif args.command == "dissolve-grid":
            t_list = [int(v) for v in args.t.split(",") if v.strip()]
            cmd_dissolve_grid(args.checkpoint, args.images, t_list, args.out)
        elif args.command == "train-dia":
            cmd_train_dia(_config_from_args(args))
        elif args.command == "eval":
            cmd_eval(_config_from_args(args), args.encoder)
        elif args.command == "grid-search":
            cmd_grid_search(_config_from_args(args), _parse_sweeps(args.sweep))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
