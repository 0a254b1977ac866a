"""Measurement matrix assembly, bucket-detector signals, calibrated noise.

Each matrix row is one flattened speckle intensity pattern; the bucket
signal is the exact matrix-vector product with the flattened sample.
Noise is zero-mean Gaussian with standard deviation ``level * std(target)``
where std is the sample standard deviation over all entries of the target,
applied independently (own seed streams) to the matrix and the signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seeds import seed_entropy
from .speckle import SpeckleConfig, generate_speckle


@dataclass(frozen=True)
class NoiseSpec:
    """Relative noise level (fraction of the target's std) and RNG seed."""

    level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"noise level must be >= 0, got {self.level}")


def build_matrix(count: int, config: SpeckleConfig) -> np.ndarray:
    """Stack `count` independent speckle patterns as rows of an (m, n) matrix.

    Row i uses the seed stream derived from (config.seed, i), so builds are
    deterministic per master seed and rows may be generated in parallel.
    """
    if count < 1:
        raise ValueError(f"measurement count must be >= 1, got {count}")
    n = config.grid * config.grid
    matrix = np.empty((count, n), dtype=np.float64)
    for i in range(count):
        row_cfg = SpeckleConfig(config.grid, config.cutoff, seed=seed_entropy(config.seed, i))
        matrix[i] = generate_speckle(row_cfg).ravel()
    return matrix


def measure(matrix: np.ndarray, image) -> np.ndarray:
    """Bucket signal y = A @ flatten(image), double precision."""
    matrix = np.asarray(matrix, dtype=np.float64)
    flat = np.asarray(image, dtype=np.float64).ravel()
    if matrix.shape[1] != flat.size:
        raise ValueError(
            f"matrix has {matrix.shape[1]} columns, image has {flat.size} pixels"
        )
    return matrix @ flat


def add_noise(target: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Return target + Gaussian noise of std level * std(target).

    level 0 returns the input unchanged. The sample standard deviation
    (ddof=1) is taken over all entries of the target.
    """
    target = np.asarray(target, dtype=np.float64)
    if spec.level == 0.0:
        return target.copy()
    sigma = float(np.std(target, ddof=1)) if target.size > 1 else 0.0
    rng = np.random.default_rng(spec.seed)
    return target + rng.normal(0.0, spec.level * sigma, size=target.shape)


def resize_area(image, shape) -> np.ndarray:
    """Area-weighted average resize of a 2-D image to `shape`.

    Every output pixel is the mean of the input region it covers, with
    fractional boundary rows/columns weighted by overlap. Exact block
    averaging when dimensions divide evenly; alias-resistant otherwise.
    """
    image = np.asarray(image, dtype=np.float64)
    out_h, out_w = shape
    resized = _area_resample_axis(image, out_h, axis=0)
    return _area_resample_axis(resized, out_w, axis=1)


def _area_resample_axis(arr, out_len, axis):
    if axis == 1:
        return _area_resample_axis(arr.T, out_len, 0).T
    in_len = arr.shape[0]
    # Overlap of output cell j (span [j*r, (j+1)*r), r = in/out) with input cells.
    r = in_len / out_len
    weights = np.zeros((out_len, in_len))
    for j in range(out_len):
        lo, hi = j * r, (j + 1) * r
        first, last = int(np.floor(lo)), int(np.ceil(hi)) - 1
        for i in range(first, min(last + 1, in_len)):
            weights[j, i] = min(hi, i + 1) - max(lo, i)
    weights /= weights.sum(axis=1, keepdims=True)
    return weights @ arr


def matrix_from_patterns(patterns, grid: int | None = None) -> np.ndarray:
    """Assemble A from recorded speckle images (experimental-data path).

    Patterns are 2-D arrays; when `grid` is given each pattern is resized
    to grid x grid by area-weighted averaging before flattening.
    """
    rows = []
    for pattern in patterns:
        pattern = np.asarray(pattern, dtype=np.float64)
        if grid is not None and pattern.shape != (grid, grid):
            pattern = resize_area(pattern, (grid, grid))
        rows.append(pattern.ravel())
    if not rows:
        raise ValueError("no patterns supplied")
    return np.vstack(rows)
