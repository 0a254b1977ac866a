"""Command-line entry point.

Subcommands cover the full pipeline: pattern simulation (``speckle``),
single-pixel measurement (``measure``), single-image reconstruction
(``reconstruct``), grid sweeps (``sweep``), one-point evaluation (``eval``),
and fixture generation (``export-fixture``).

Configuration uses flat dotted keys. Every key can come from a JSON file
(``--config``) or a ``--key=value`` flag; flags win. Each run writes a
``manifest.json`` holding the fully resolved configuration, and a manifest
is itself a valid ``--config`` input, so any run can be reproduced
byte-for-byte. The master seed falls back to the SPECKLE_CS_SEED
environment variable when not given.

Exit codes: 0 success, 2 configuration error, 3 missing or unreadable
artifact, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import arrayio, images
from .dataset import IdxFormatError, load_test_split, pick_one_per_class
from .experiments import (
    SweepGrid,
    aggregate,
    aggregate_to_csv,
    records_from_csv,
    records_to_csv,
    run_cell,
)
from .fixtures import random_generator_model, synthetic_digits
from .forward_model import NoiseSpec, SpeckleConfig, add_noise, build_matrix, measure
from .generator import GgwFormatError, NumericError, load_model
from .l1 import BpdnConfig, solve_bp, solve_bpdn
from .recon import ReconConfig, ReconstructionError, reconstruct
from .seeds import seed_entropy
from .speckle import generate_speckle

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_NUMERIC = 4

SEED_ENV_VAR = "SPECKLE_CS_SEED"


class ConfigError(Exception):
    """Invalid or inconsistent run configuration."""


class MissingArtifactError(Exception):
    """A required input file does not exist or cannot be parsed."""


@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # int | float | str | path | ints | floats | strs | flag
    default: object = None
    help: str = ""
    required: bool = False


_GRID = SweepGrid()

PARAMS = {
    "speckle": [
        Param("m", "int", 9, "number of patterns"),
        Param("nu", "float", 0.2, "cutoff as a fraction of the maximum frequency, in (0, 1]"),
        Param("grid", "int", 28, "pattern side length in pixels"),
        Param("seed", "int", None, "master seed"),
        Param("out", "path", None, "output directory", required=True),
    ],
    "measure": [
        Param("matrix", "path", None, "pattern stack or matrix file (.f64); omit to simulate"),
        Param("m", "int", 100, "measurements when simulating"),
        Param("nu", "float", 0.2, "cutoff when simulating"),
        Param("grid", "int", 28, "pattern side when simulating"),
        Param("image", "path", None, "target image file (PNG/PGM)"),
        Param("dataset-dir", "path", None, "directory with test-split image files"),
        Param("index", "int", 0, "image index within the dataset"),
        Param("noise.level", "float", 0.0, "noise std as a fraction of the signal std"),
        Param("noise.seed", "int", None, "noise seed; derived from the master seed when unset"),
        Param("seed", "int", None, "master seed"),
        Param("out", "path", None, "output directory", required=True),
    ],
    "reconstruct": [
        Param("method", "str", None, "bp | bpdn | gan", required=True),
        Param("matrix", "path", None, "pattern stack or matrix file (.f64)"),
        Param("signal", "path", None, "measurement vector file (.f64 or .csv)"),
        Param("image", "path", None, "target image when simulating"),
        Param("dataset-dir", "path", None, "dataset directory when simulating"),
        Param("index", "int", 0, "image index within the dataset"),
        Param("m", "int", 100, "measurements when simulating"),
        Param("nu", "float", 0.2, "cutoff when simulating"),
        Param("grid", "int", 28, "pattern side when simulating"),
        Param("noise.level", "float", 0.0, "noise std as a fraction of the signal std"),
        Param("noise.seed", "int", None, "noise seed; derived from the master seed when unset"),
        Param("weights", "path", None, "GGW1 weights file (gan method)"),
        Param("delta", "float", 0.0, "residual bound (bpdn method)"),
        Param("steps", "int", 2000, "gradient steps per restart (gan)"),
        Param("restarts", "int", 10, "random restarts (gan)"),
        Param("lr", "float", 0.1, "Adam learning rate (gan)"),
        Param("seed", "int", None, "master seed"),
        Param("out", "path", None, "output directory", required=True),
    ],
    "sweep": [
        Param("dataset-dir", "path", None, "dataset directory (test split)"),
        Param("synthetic", "flag", False, "use the built-in synthetic image set"),
        Param("synthetic-count", "int", 100, "synthetic set size"),
        Param("cutoffs", "floats", list(_GRID.cutoffs), "comma-separated cutoff list"),
        Param("measurements", "ints", list(_GRID.measurements), "comma-separated m list"),
        Param("noise-levels", "floats", list(_GRID.noise_levels), "comma-separated noise levels"),
        Param("methods", "strs", list(_GRID.methods), "comma-separated methods"),
        Param("repetitions", "int", 1, "repetitions per cell"),
        Param("weights", "path", None, "GGW1 weights file (gan method)"),
        Param("gan-steps", "int", 2000, "gradient steps per restart"),
        Param("gan-restarts", "int", 10, "random restarts"),
        Param("gan-lr", "float", 0.1, "Adam learning rate"),
        Param("delta-grid-size", "int", 8, "bpdn tuning grid size"),
        Param("save-images", "flag", False, "write reconstruction images"),
        Param("jobs", "int", None, "parallel cells; defaults to the core count"),
        Param("seed", "int", None, "master seed"),
        Param("out", "path", None, "output directory", required=True),
    ],
    "eval": [
        Param("method", "str", None, "bp | bpdn | gan | diffraction", required=True),
        Param("nu", "float", 0.2, "cutoff"),
        Param("m", "int", 100, "measurements"),
        Param("noise.level", "float", 0.0, "noise std as a fraction of the signal std"),
        Param("digit", "int", 3, "class label to evaluate"),
        Param("dataset-dir", "path", None, "dataset directory (test split)"),
        Param("synthetic", "flag", False, "use the built-in synthetic image set"),
        Param("synthetic-count", "int", 100, "synthetic set size"),
        Param("weights", "path", None, "GGW1 weights file (gan method)"),
        Param("gan-steps", "int", 2000, "gradient steps per restart"),
        Param("gan-restarts", "int", 10, "random restarts"),
        Param("gan-lr", "float", 0.1, "Adam learning rate"),
        Param("delta-grid-size", "int", 8, "bpdn tuning grid size"),
        Param("seed", "int", None, "master seed"),
        Param("out", "path", None, "output directory", required=True),
    ],
    "export-fixture": [
        Param("kind", "str", "generator", "generator | dataset"),
        Param("arch", "str", "small", "generator architecture: small | full"),
        Param("count", "int", 100, "dataset fixture size"),
        Param("seed", "int", None, "master seed"),
        Param("out", "path", None, "output file (generator) or directory (dataset)", required=True),
    ],
}


# ---------------------------------------------------------------------------
# Config resolution
# ---------------------------------------------------------------------------


def _convert(param: Param, value, source: str):
    """Coerce a config-file or flag value to the parameter's type."""
    if value is None:
        return None
    try:
        if param.kind == "int":
            return int(value)
        if param.kind == "float":
            return float(value)
        if param.kind in ("str", "path"):
            return str(value)
        if param.kind == "flag":
            if isinstance(value, bool):
                return value
            text = str(value).lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {value!r}")
        if param.kind in ("ints", "floats", "strs"):
            if isinstance(value, str):
                items = [part.strip() for part in value.split(",") if part.strip()]
            else:
                items = list(value)
            cast = {"ints": int, "floats": float, "strs": str}[param.kind]
            return [cast(item) for item in items]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source} {param.name}: {exc}") from None
    raise AssertionError(f"unhandled parameter kind {param.kind}")


def resolve_config(subcommand: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config file, flags, and the seed env fallback."""
    params = {p.name: p for p in PARAMS[subcommand]}
    cfg = {p.name: p.default for p in params.values()}

    config_path = getattr(args, "config", None)
    if config_path:
        try:
            doc = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise MissingArtifactError(f"config file not found: {config_path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {config_path}: {exc}") from None
        if "subcommand" in doc and "config" in doc:  # manifest reuse
            if doc["subcommand"] != subcommand:
                raise ConfigError(
                    f"manifest is for {doc['subcommand']!r}, not {subcommand!r}"
                )
            doc = doc["config"]
        for key, value in doc.items():
            if key not in params:
                raise ConfigError(f"unknown config key {key!r} for {subcommand}")
            cfg[key] = _convert(params[key], value, "config key")

    flags = vars(args)
    for name, param in params.items():
        raw = flags.get(name)
        if raw is not None:
            cfg[name] = _convert(param, raw, "flag")

    if "seed" in cfg and cfg["seed"] is None:
        env = os.environ.get(SEED_ENV_VAR)
        cfg["seed"] = int(env) if env else 0

    for name, param in params.items():
        if param.required and cfg[name] is None:
            raise ConfigError(f"{subcommand} requires --{name}")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speckle-cs",
        description="Sub-diffraction imaging from speckle-illuminated single-pixel measurements.",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, params in PARAMS.items():
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", default=None, help="JSON config or manifest file")
        for param in params:
            if param.kind == "flag":
                sub.add_argument(
                    f"--{param.name}", dest=param.name, nargs="?", const="true",
                    default=None, help=param.help,
                )
            else:
                sub.add_argument(
                    f"--{param.name}", dest=param.name, default=None, help=param.help,
                )
    return parser


def write_manifest(out_dir: Path, subcommand: str, cfg: dict) -> None:
    manifest = {"subcommand": subcommand, "config": cfg}
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


# ---------------------------------------------------------------------------
# Shared input loading
# ---------------------------------------------------------------------------


def _require_file(path, what: str) -> Path:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"{what} not found: {path}")
    return path


def _load_matrix(path) -> np.ndarray:
    """Accept a pattern stack (m, g, g) or a flat matrix (m, n)."""
    array, _ = arrayio.load_raw(_require_file(path, "matrix file"))
    if array.ndim == 3:
        return array.reshape(array.shape[0], -1)
    if array.ndim == 2:
        return array
    raise ConfigError(f"matrix file has ndim={array.ndim}, expected 2 or 3")


def _load_signal(path) -> np.ndarray:
    path = _require_file(path, "signal file")
    if path.suffix == ".csv":
        return np.atleast_1d(np.loadtxt(path, delimiter=","))
    array, _ = arrayio.load_raw(path)
    return array.ravel()


def _load_samples(cfg, *, need_labels: bool) -> list:
    """Labeled samples from --dataset-dir, or the synthetic fixture set."""
    if cfg.get("dataset-dir"):
        directory = Path(cfg["dataset-dir"])
        if not directory.is_dir():
            raise MissingArtifactError(f"dataset directory not found: {directory}")
        return load_test_split(directory)
    if cfg.get("synthetic"):
        imgs, labels = synthetic_digits(cfg["seed"], cfg["synthetic-count"])
        from .dataset import LabeledSample

        return [LabeledSample(img, int(lab)) for img, lab in zip(imgs, labels)]
    raise ConfigError("provide --dataset-dir or --synthetic" if need_labels
                      else "provide --image, --dataset-dir, or --synthetic")


def _load_truth(cfg) -> np.ndarray:
    """Target image for measure/reconstruct: a file or a dataset entry."""
    if cfg.get("image"):
        return images.load_image(_require_file(cfg["image"], "image file"))
    if cfg.get("dataset-dir"):
        samples = _load_samples(cfg, need_labels=False)
        index = cfg["index"]
        if not 0 <= index < len(samples):
            raise ConfigError(f"index {index} outside dataset of {len(samples)} images")
        return samples[index].image
    raise ConfigError("provide --image or --dataset-dir")


def _simulated_problem(cfg, truth: np.ndarray):
    """Build (A_solver, y) for a truth image per the standard noise pipeline."""
    seed = cfg["seed"]
    A_clean = build_matrix(
        cfg["m"],
        SpeckleConfig(grid=truth.shape[0], cutoff=cfg["nu"], seed=seed_entropy(seed, "matrix")),
    )
    y = measure(A_clean, truth)
    level = cfg["noise.level"]
    A_solver = A_clean
    if level > 0:
        noise_seed = cfg["noise.seed"]
        if noise_seed is None:
            noise_seed = seed_entropy(seed, "noise")
        A_solver = add_noise(A_clean, NoiseSpec(level, seed_entropy(noise_seed, "matrix-noise")))
        y = add_noise(y, NoiseSpec(level, seed_entropy(noise_seed, "signal-noise")))
    return A_solver, y


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_speckle(cfg: dict) -> int:
    if cfg["m"] < 1:
        raise ConfigError(f"m must be >= 1, got {cfg['m']}")
    SpeckleConfig(grid=cfg["grid"], cutoff=cfg["nu"])  # validate before writing anything
    out = Path(cfg["out"])
    write_manifest(out, "speckle", cfg)
    stack = np.stack([
        generate_speckle(
            SpeckleConfig(cfg["grid"], cfg["nu"], seed_entropy(cfg["seed"], i))
        )
        for i in range(cfg["m"])
    ])
    arrayio.save_raw(out / "speckle_stack.f64", stack, nu=cfg["nu"], seed=cfg["seed"])
    print(f"wrote {cfg['m']} patterns to {out / 'speckle_stack.f64'}")
    return EXIT_OK


def cmd_measure(cfg: dict) -> int:
    truth = _load_truth(cfg)
    out = Path(cfg["out"])
    write_manifest(out, "measure", cfg)
    if cfg.get("matrix"):
        A = _load_matrix(cfg["matrix"])
        y = measure(A, truth)
        level = cfg["noise.level"]
        if level > 0:
            noise_seed = cfg["noise.seed"]
            if noise_seed is None:
                noise_seed = seed_entropy(cfg["seed"], "noise")
            y = add_noise(y, NoiseSpec(level, seed_entropy(noise_seed, "signal-noise")))
    else:
        _, y = _simulated_problem(cfg, truth)
    arrayio.save_raw(out / "y.f64", y, noise_level=cfg["noise.level"])
    arrayio.save_csv(out / "y.csv", y)
    images.save_image(out / "truth.png", truth)
    print(f"wrote {y.size} measurements to {out / 'y.f64'}")
    return EXIT_OK


def cmd_reconstruct(cfg: dict) -> int:
    method = cfg["method"]
    if method not in ("bp", "bpdn", "gan"):
        raise ConfigError(f"unknown method {method!r}")

    model = None
    if method == "gan":
        if not cfg.get("weights"):
            raise MissingArtifactError("method gan requires --weights")
        model = load_model(_require_file(cfg["weights"], "weights file"))

    if cfg.get("matrix") and cfg.get("signal"):
        A = _load_matrix(cfg["matrix"])
        y = _load_signal(cfg["signal"])
        if y.size != A.shape[0]:
            raise ConfigError(f"signal has {y.size} entries, matrix has {A.shape[0]} rows")
    elif cfg.get("matrix") or cfg.get("signal"):
        raise ConfigError("--matrix and --signal must be given together")
    else:
        truth = _load_truth(cfg)
        A, y = _simulated_problem(cfg, truth)

    out = Path(cfg["out"])
    write_manifest(out, "reconstruct", cfg)

    if method in ("bp", "bpdn"):
        if method == "bp":
            report = solve_bp(A, y)
        else:
            report = solve_bpdn(A, y, BpdnConfig(delta=cfg["delta"]))
        side = int(round(np.sqrt(report.solution.size)))
        if side * side == report.solution.size:
            images.save_image(out / "recon.png", report.solution.reshape(side, side))
        (out / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
        print(f"{method}: residual {report.residual_norm:.6g}, "
              f"converged={str(report.converged).lower()}")
    else:
        config = ReconConfig(
            steps=cfg["steps"], restarts=cfg["restarts"], lr=cfg["lr"],
            seed=seed_entropy(cfg["seed"], "latent"),
        )
        result = reconstruct(model, A, y, config)
        result.save_image(out / "recon.png")
        (out / "report.json").write_text(result.to_json() + "\n", encoding="utf-8")
        trace_lines = ["step,loss"] + [
            f"{i},{v!r}" for i, v in enumerate(result.loss_trace)
        ]
        (out / "loss_trace.csv").write_text("\n".join(trace_lines) + "\n", encoding="utf-8")
        print(f"gan: final loss {result.loss:.6g} "
              f"(best of {len(result.restart_losses)} restarts)")
    return EXIT_OK


def _sweep_grid(cfg: dict) -> SweepGrid:
    return SweepGrid(
        cutoffs=cfg["cutoffs"],
        measurements=cfg["measurements"],
        noise_levels=cfg["noise-levels"],
        methods=cfg["methods"],
        repetitions=cfg["repetitions"],
        seed=cfg["seed"],
    )


def _cell_worker(payload):
    grid, cell, samples, model, recon_config, image_dir, delta_grid_size = payload
    records = run_cell(
        grid, *cell, samples=samples, model=model, recon_config=recon_config,
        image_dir=image_dir, delta_grid_size=delta_grid_size,
    )
    return cell, records


def cmd_sweep(cfg: dict) -> int:
    grid = _sweep_grid(cfg)
    samples = _load_samples(cfg, need_labels=True)
    model = None
    if "gan" in grid.methods:
        if not cfg.get("weights"):
            raise MissingArtifactError("methods include gan: --weights is required")
        model = load_model(_require_file(cfg["weights"], "weights file"))
    recon_config = ReconConfig(
        steps=cfg["gan-steps"], restarts=cfg["gan-restarts"], lr=cfg["gan-lr"]
    )

    out = Path(cfg["out"])
    write_manifest(out, "sweep", cfg)
    cell_dir = out / "cells"
    cell_dir.mkdir(parents=True, exist_ok=True)
    image_dir = None
    if cfg["save-images"]:
        image_dir = out / "images"
        image_dir.mkdir(parents=True, exist_ok=True)

    cells = list(grid.cells())
    pending = [c for c in cells if not (cell_dir / f"{grid.cell_key(*c)}.csv").exists()]
    done = len(cells) - len(pending)
    if done:
        logger.info("resuming: %d of %d cells already complete", done, len(cells))

    jobs = cfg["jobs"] if cfg["jobs"] is not None else (os.cpu_count() or 1)
    failures = []

    def finish_cell(cell, records):
        key = grid.cell_key(*cell)
        tmp = cell_dir / f"{key}.csv.tmp"
        records_to_csv(records, tmp)
        os.replace(tmp, cell_dir / f"{key}.csv")
        logger.info("cell %s done (%d records)", key, len(records))

    if jobs <= 1 or len(pending) <= 1:
        for cell in pending:
            try:
                _, records = _cell_worker(
                    (grid, cell, samples, model, recon_config, image_dir,
                     cfg["delta-grid-size"])
                )
            except Exception as exc:  # keep finished cells; report at the end
                failures.append((grid.cell_key(*cell), str(exc)))
                logger.error("cell %s failed: %s", grid.cell_key(*cell), exc)
                continue
            finish_cell(cell, records)
    else:
        payloads = [
            (grid, cell, samples, model, recon_config, image_dir, cfg["delta-grid-size"])
            for cell in pending
        ]
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_cell_worker, p): p[1] for p in payloads}
            for future in concurrent.futures.as_completed(futures):
                cell = futures[future]
                try:
                    _, records = future.result()
                except Exception as exc:
                    failures.append((grid.cell_key(*cell), str(exc)))
                    logger.error("cell %s failed: %s", grid.cell_key(*cell), exc)
                    continue
                finish_cell(cell, records)

    if failures:
        print(f"{len(failures)} of {len(cells)} cells failed:", file=sys.stderr)
        for key, message in failures:
            print(f"  {key}: {message}", file=sys.stderr)
        print("finished cells are kept; re-run to resume", file=sys.stderr)
        return EXIT_NUMERIC

    # Assemble in canonical cell order so output bytes never depend on
    # scheduling or on how many runs it took to finish the grid.
    records = []
    for cell in cells:
        records.extend(records_from_csv(cell_dir / f"{grid.cell_key(*cell)}.csv"))
    records_to_csv(records, out / "records.csv")
    aggregate_to_csv(aggregate(records), out / "aggregate.csv")
    print(f"wrote {len(records)} records to {out / 'records.csv'}")
    return EXIT_OK


def cmd_eval(cfg: dict) -> int:
    method = cfg["method"]
    digit = cfg["digit"]
    if not 0 <= digit <= 9:
        raise ConfigError(f"digit must be 0..9, got {digit}")

    grid = SweepGrid(
        cutoffs=[cfg["nu"]],
        measurements=[cfg["m"]],
        noise_levels=[cfg["noise.level"]],
        methods=[method],
        seed=cfg["seed"],
    )
    samples = _load_samples(cfg, need_labels=True)
    model = None
    if method == "gan":
        if not cfg.get("weights"):
            raise MissingArtifactError("method gan requires --weights")
        model = load_model(_require_file(cfg["weights"], "weights file"))

    out = Path(cfg["out"])
    write_manifest(out, "eval", cfg)
    recon_config = ReconConfig(
        steps=cfg["gan-steps"], restarts=cfg["gan-restarts"], lr=cfg["gan-lr"]
    )
    records = run_cell(
        grid, 0, 0, 0, 0, samples=samples, model=model, recon_config=recon_config,
        image_dir=out, delta_grid_size=cfg["delta-grid-size"],
    )
    record = next(rec for rec in records if rec.digit == digit)

    picked = pick_one_per_class(samples, seed_entropy(cfg["seed"], "select", 0))
    images.save_image(out / f"truth_d{digit}.png", picked[digit].image)
    (out / "eval.json").write_text(
        json.dumps(
            {
                "method": method, "nu": record.nu, "m": record.m,
                "noise": record.noise, "digit": digit, "r": record.r,
                "converged": record.converged,
            },
            indent=2, sort_keys=True,
        ) + "\n",
        encoding="utf-8",
    )
    print(f"{method} at nu={record.nu:g} m={record.m} noise={record.noise:g} "
          f"digit {digit}: r={record.r:.4f}")
    return EXIT_OK


def cmd_export_fixture(cfg: dict) -> int:
    kind = cfg["kind"]
    out = Path(cfg["out"])
    if kind == "generator":
        from .generator import save_model

        model = random_generator_model(cfg["seed"], cfg["arch"])
        out.parent.mkdir(parents=True, exist_ok=True)
        save_model(model, out)
        write_manifest(out.parent, "export-fixture", cfg)
        print(f"wrote {cfg['arch']} generator weights to {out}")
        return EXIT_OK
    if kind == "dataset":
        from .dataset import STANDARD_FILES, save_idx_images, save_idx_labels

        imgs, labels = synthetic_digits(cfg["seed"], cfg["count"])
        out.mkdir(parents=True, exist_ok=True)
        save_idx_images(out / STANDARD_FILES["test_images"], imgs)
        save_idx_labels(out / STANDARD_FILES["test_labels"], labels)
        write_manifest(out, "export-fixture", cfg)
        print(f"wrote {len(labels)} synthetic images to {out}")
        return EXIT_OK
    raise ConfigError(f"unknown fixture kind {kind!r}")


COMMANDS = {
    "speckle": cmd_speckle,
    "measure": cmd_measure,
    "reconstruct": cmd_reconstruct,
    "sweep": cmd_sweep,
    "eval": cmd_eval,
    "export-fixture": cmd_export_fixture,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, matching the config-error code
        return int(exc.code) if exc.code else EXIT_OK
    try:
        cfg = resolve_config(args.subcommand, args)
        return COMMANDS[args.subcommand](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (GgwFormatError, IdxFormatError) as exc:
        print(f"error: unreadable artifact: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (ReconstructionError, NumericError, FloatingPointError) as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
