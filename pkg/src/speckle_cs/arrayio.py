"""Raw little-endian float64 array files with one-line JSON sidecars.

The binary file holds the contiguous row-major values; ``<path>.json``
records the shape plus caller-supplied provenance (seed, cutoff, noise
level, ...). This is the exchange format for speckle stacks, measurement
matrices and bucket signals.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def save_raw(path, array, **meta) -> None:
    """Write `array` as little-endian float64 plus its JSON sidecar."""
    array = np.ascontiguousarray(array, dtype="<f8")
    path = Path(path)
    path.write_bytes(array.tobytes())
    doc = {"shape": list(array.shape), "dtype": "<f8"}
    doc.update(meta)
    sidecar_path(path).write_text(json.dumps(doc) + "\n")


def load_raw(path):
    """Read a raw float64 file; returns (array, sidecar dict)."""
    path = Path(path)
    meta = json.loads(sidecar_path(path).read_text())
    shape = tuple(meta["shape"])
    data = np.frombuffer(path.read_bytes(), dtype="<f8")
    expected = int(np.prod(shape)) if shape else 1
    if data.size != expected:
        raise ValueError(
            f"{path}: payload holds {data.size} float64 values, sidecar declares {expected}"
        )
    return data.reshape(shape).astype(np.float64), meta


def save_csv(path, vector) -> None:
    """One value per line, full float64 round-trip precision."""
    np.savetxt(path, np.asarray(vector, dtype=np.float64), fmt="%.17g")
