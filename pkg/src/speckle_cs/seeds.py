"""Deterministic seed-stream derivation.

All randomness flows from numpy SeedSequence entropy lists built out of a
master seed plus context parts (row index, repetition, stream tag...), so
any cell of any experiment can be reproduced in isolation and executed in
parallel without coordination. String tags are folded to stable integers.
"""

from __future__ import annotations

import zlib

import numpy as np


def seed_entropy(*parts) -> list[int]:
    """Flatten seed parts (ints, strings, nested sequences) to an entropy list."""
    flat: list[int] = []
    for part in parts:
        if isinstance(part, str):
            flat.append(zlib.crc32(part.encode()))
        elif isinstance(part, (list, tuple)):
            flat.extend(seed_entropy(*part))
        elif isinstance(part, (int, np.integer)):
            flat.append(int(part))
        else:
            raise TypeError(f"unsupported seed part {part!r}")
    return flat


def derived_rng(*parts) -> np.random.Generator:
    return np.random.default_rng(seed_entropy(*parts))
