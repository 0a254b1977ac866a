"""Correlation metric, parameter sweeps over (cutoff, m, noise, method),
and aggregation of the resulting records.

A sweep cell is one (repetition, cutoff, m, noise) tuple; within a cell all
ten digit classes are measured with the same speckle matrix and solved by
each requested method, so methods are compared on identical data. Every
random draw derives from the grid seed plus the cell indices, which makes
cells independently reproducible and safe to run in any order or in
parallel.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .dataset import pick_one_per_class
from .forward_model import NoiseSpec, SpeckleConfig, add_noise, build_matrix, measure
from .l1 import BpdnConfig, solve_bp, solve_bpdn
from .recon import ReconConfig, ReconstructionError, reconstruct
from .seeds import seed_entropy
from .speckle import diffraction_limited_image

logger = logging.getLogger(__name__)

METHODS = ("bp", "bpdn", "gan", "diffraction")

RECORD_HEADER = "nu,m,noise,method,digit,rep,r,converged"
AGGREGATE_HEADER = "nu,m,noise,method,mean_r,std_r,count,undefined"


def pearson(a, b) -> float:
    """Pearson correlation coefficient of two equal-length vectors.

    Returns NaN when either vector is constant, where the coefficient is
    undefined; callers treat NaN as "no value" rather than as zero.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < 2:
        raise ValueError("correlation needs at least two samples")
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt((da @ da) * (db @ db))
    if denom == 0.0:
        return float("nan")
    return float((da @ db) / denom)


def nyquist_count(n: int) -> int:
    """Measurements needed to determine n pixels without a sparsity prior."""
    return int(n)


def is_sub_nyquist(m: int, n: int) -> bool:
    return m < nyquist_count(n)


@dataclass(frozen=True)
class CorrelationRecord:
    """One reconstruction outcome: grid point, method, digit class, score."""

    nu: float
    m: int
    noise: float
    method: str
    digit: int
    rep: int
    r: float
    converged: bool = True

    def csv_row(self) -> str:
        return (
            f"{self.nu:g},{self.m},{self.noise:g},{self.method},"
            f"{self.digit},{self.rep},{self.r!r},{'true' if self.converged else 'false'}"
        )


@dataclass(frozen=True)
class AggregateCell:
    """Mean/std of r over digits and repetitions at one grid point."""

    nu: float
    m: int
    noise: float
    method: str
    mean_r: float
    std_r: float
    count: int
    undefined: int

    def csv_row(self) -> str:
        return (
            f"{self.nu:g},{self.m},{self.noise:g},{self.method},"
            f"{self.mean_r!r},{self.std_r!r},{self.count},{self.undefined}"
        )


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian sweep: ten digit classes at every grid point.

    Defaults cover the full study range; tests and demos pass reduced
    lists. ``diffraction`` ignores m and noise by construction, so its
    records repeat across those axes, keeping the output table rectangular.
    """

    cutoffs: tuple = (0.1, 0.2, 0.3, 0.5, 0.7)
    measurements: tuple = (10, 40, 70, 100, 200, 300, 400, 500, 750)
    noise_levels: tuple = (0.0, 0.05, 0.10, 0.20)
    methods: tuple = ("bp", "bpdn", "gan", "diffraction")
    repetitions: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "cutoffs", tuple(float(v) for v in self.cutoffs))
        object.__setattr__(self, "measurements", tuple(int(v) for v in self.measurements))
        object.__setattr__(self, "noise_levels", tuple(float(v) for v in self.noise_levels))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.cutoffs or not self.measurements or not self.noise_levels or not self.methods:
            raise ValueError("grid axes must be non-empty")
        for name in self.methods:
            if name not in METHODS:
                raise ValueError(f"unknown method {name!r}, expected one of {METHODS}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if any(not 0.0 < nu <= 1.0 for nu in self.cutoffs):
            raise ValueError("cutoffs must lie in (0, 1]")
        if any(m < 1 for m in self.measurements):
            raise ValueError("measurement counts must be >= 1")
        if any(level < 0 for level in self.noise_levels):
            raise ValueError("noise levels must be >= 0")

    def cells(self):
        """Cell index tuples (rep, i_nu, i_m, i_noise) in canonical order."""
        for rep in range(self.repetitions):
            for i_nu in range(len(self.cutoffs)):
                for i_m in range(len(self.measurements)):
                    for i_noise in range(len(self.noise_levels)):
                        yield rep, i_nu, i_m, i_noise

    @property
    def cell_count(self) -> int:
        return (
            self.repetitions
            * len(self.cutoffs)
            * len(self.measurements)
            * len(self.noise_levels)
        )

    @property
    def record_count(self) -> int:
        return self.cell_count * len(self.methods) * 10

    def cell_key(self, rep: int, i_nu: int, i_m: int, i_noise: int) -> str:
        """Stable file-name stem for one cell, used for resumable runs."""
        return (
            f"rep{rep}_nu{self.cutoffs[i_nu]:g}_m{self.measurements[i_m]}"
            f"_noise{self.noise_levels[i_noise]:g}"
        )


def image_name(method: str, nu: float, m: int, noise: float, digit: int,
               rep: int = 0, repetitions: int = 1) -> str:
    stem = f"{method}_nu{nu:g}_m{m}_noise{noise:g}_d{digit}"
    if repetitions > 1:
        stem += f"_rep{rep}"
    return stem + ".png"


def bpdn_delta_grid(y, size: int = 8) -> np.ndarray:
    """Log-spaced residual-bound candidates from 0.1% to 50% of ||y||."""
    if size < 1:
        raise ValueError(f"grid size must be >= 1, got {size}")
    norm = float(np.linalg.norm(np.asarray(y, dtype=np.float64)))
    if norm == 0.0:
        return np.zeros(size)
    return norm * np.logspace(np.log10(1e-3), np.log10(0.5), size)


def _solve_bpdn_tuned(A, y, truth_flat, delta_grid):
    """Solve at each candidate delta; keep the solution best correlated
    with truth. Returns (record fields r/converged, image)."""
    best = None  # (r_for_ranking, r, converged, solution)
    for delta in delta_grid:
        report = solve_bpdn(A, y, BpdnConfig(delta=float(delta)))
        r = pearson(report.solution, truth_flat)
        rank = -np.inf if np.isnan(r) else r
        if best is None or rank > best[0]:
            best = (rank, r, report.converged, report.solution)
    return best[1], best[2], best[3]


def run_cell(
    grid: SweepGrid,
    rep: int,
    i_nu: int,
    i_m: int,
    i_noise: int,
    samples: list,
    model=None,
    recon_config: ReconConfig | None = None,
    image_dir=None,
    delta_grid_size: int = 8,
) -> list:
    """All records for one (rep, cutoff, m, noise) cell.

    One speckle matrix per cell is shared by every method and digit.
    Measurements come from the clean matrix; at positive noise the solver
    sees independently perturbed copies of both the matrix and the
    measurement vector. Numeric failures inside a single solve are
    recorded as r=NaN, converged=false instead of aborting the cell.
    """
    nu = grid.cutoffs[i_nu]
    m = grid.measurements[i_m]
    noise = grid.noise_levels[i_noise]
    if "gan" in grid.methods and model is None:
        raise ValueError("the gan method needs a generator model")

    picked = pick_one_per_class(samples, seed_entropy(grid.seed, "select", rep))
    grid_n = picked[0].image.shape[0]

    A_clean = build_matrix(
        m,
        SpeckleConfig(grid=grid_n, cutoff=nu, seed=seed_entropy(grid.seed, "matrix", rep, i_nu, i_m)),
    )
    A_solver = A_clean
    if noise > 0:
        A_solver = add_noise(
            A_clean,
            NoiseSpec(noise, seed_entropy(grid.seed, "noise-A", rep, i_nu, i_m, i_noise)),
        )

    records = []
    for digit, sample in enumerate(picked):
        truth = sample.image
        y = measure(A_clean, truth)
        if noise > 0:
            y = add_noise(
                y,
                NoiseSpec(noise, seed_entropy(grid.seed, "noise-y", rep, i_nu, i_m, i_noise, digit)),
            )

        for method in grid.methods:
            r, converged, image = _run_method(
                method, A_solver, y, truth, nu, grid, rep, i_nu, i_m, i_noise, digit,
                model, recon_config, delta_grid_size,
            )
            records.append(
                CorrelationRecord(nu, m, noise, method, digit, rep, r, converged)
            )
            if image_dir is not None and image is not None:
                from .images import save_image
                from pathlib import Path

                name = image_name(method, nu, m, noise, digit, rep, grid.repetitions)
                save_image(Path(image_dir) / name, image)
    return records


def _run_method(method, A_solver, y, truth, nu, grid, rep, i_nu, i_m, i_noise, digit,
                model, recon_config, delta_grid_size):
    truth_flat = truth.ravel()
    try:
        if method == "bp":
            report = solve_bp(A_solver, y)
            image = report.solution.reshape(truth.shape)
            return pearson(report.solution, truth_flat), report.converged, image
        if method == "bpdn":
            r, converged, solution = _solve_bpdn_tuned(
                A_solver, y, truth_flat, bpdn_delta_grid(y, delta_grid_size)
            )
            return r, converged, solution.reshape(truth.shape)
        if method == "gan":
            config = recon_config if recon_config is not None else ReconConfig()
            config = replace(
                config,
                seed=seed_entropy(grid.seed, "latent", rep, i_nu, i_m, i_noise, digit),
            )
            result = reconstruct(model, A_solver, y, config)
            return pearson(result.image.ravel(), truth_flat), True, result.image
        if method == "diffraction":
            image = diffraction_limited_image(truth, nu)
            return pearson(image.ravel(), truth_flat), True, image
    except (FloatingPointError, ReconstructionError) as exc:
        logger.warning(
            "%s failed at nu=%g m=%d noise=%g digit=%d rep=%d: %s",
            method, nu, grid.measurements[i_m], grid.noise_levels[i_noise], digit, rep, exc,
        )
        return float("nan"), False, None
    raise ValueError(f"unknown method {method!r}")


def run_sweep(
    grid: SweepGrid,
    samples: list,
    model=None,
    recon_config: ReconConfig | None = None,
    image_dir=None,
    delta_grid_size: int = 8,
    progress=None,
) -> list:
    """Run every cell of the grid in canonical order.

    Returns grid.record_count records. Results do not depend on execution
    order; the CLI exploits this for resumable and parallel runs.
    """
    cells = list(grid.cells())
    records = []
    for done, cell in enumerate(cells, start=1):
        records.extend(
            run_cell(
                grid, *cell, samples=samples, model=model, recon_config=recon_config,
                image_dir=image_dir, delta_grid_size=delta_grid_size,
            )
        )
        logger.info("cell %d/%d (%s) done", done, len(cells), grid.cell_key(*cell))
        if progress is not None:
            progress(done, len(cells))
    return records


def aggregate(records: list) -> list:
    """Collapse records to per-(nu, m, noise, method) mean and std of r.

    NaN scores (undefined correlations and failed solves) are excluded
    from the statistics and reported in the ``undefined`` column. Output
    order is sorted by grid point, so aggregation is insensitive to record
    order.
    """
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.nu, rec.m, rec.noise, rec.method), []).append(rec.r)
    cells = []
    for (nu, m, noise, method), values in sorted(groups.items()):
        arr = np.asarray(values, dtype=np.float64)
        finite = arr[np.isfinite(arr)]
        undefined = int(arr.size - finite.size)
        if finite.size:
            mean = float(finite.mean())
            std = float(finite.std())
        else:
            mean = float("nan")
            std = float("nan")
        cells.append(AggregateCell(nu, m, noise, method, mean, std, finite.size, undefined))
    return cells


# ---------------------------------------------------------------------------
# CSV round-trip
# ---------------------------------------------------------------------------


def records_to_csv(records: list, path) -> None:
    lines = [RECORD_HEADER] + [rec.csv_row() for rec in records]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def records_from_csv(path) -> list:
    records = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != RECORD_HEADER:
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            nu, m, noise, method, digit, rep, r, converged = line.split(",")
            records.append(
                CorrelationRecord(
                    float(nu), int(m), float(noise), method,
                    int(digit), int(rep), float(r), converged == "true",
                )
            )
    return records


def aggregate_to_csv(cells: list, path) -> None:
    lines = [AGGREGATE_HEADER] + [cell.csv_row() for cell in cells]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def aggregate_from_csv(path) -> list:
    cells = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != AGGREGATE_HEADER:
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            nu, m, noise, method, mean_r, std_r, count, undefined = line.split(",")
            cells.append(
                AggregateCell(
                    float(nu), int(m), float(noise), method,
                    float(mean_r), float(std_r), int(count), int(undefined),
                )
            )
    return cells
