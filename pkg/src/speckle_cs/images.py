"""Grayscale image files: load/save 8-bit PNG and PGM as [0, 1] float arrays."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image


def save_image(path, image) -> None:
    """Write a 2-D array to an 8-bit grayscale file; values clipped to [0, 1]."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {image.shape}")
    levels = np.rint(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(levels, mode="L").save(path)


def load_image(path) -> np.ndarray:
    """Read an image file as grayscale, scaled to [0, 1] float64."""
    with Image.open(path) as img:
        levels = np.asarray(img.convert("L"), dtype=np.float64)
    return levels / 255.0
