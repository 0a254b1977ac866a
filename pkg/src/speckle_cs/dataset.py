"""MNIST-format (IDX) ingestion and ground-truth sample selection.

Images are plain 2-D float64 arrays with values in [0, 1]; a stack of
images is a 3-D array indexed (image, row, col). Files may be raw IDX or
gzip-compressed, as in the canonical MNIST distribution.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801

# Basenames of the four files in a canonical MNIST directory.
STANDARD_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}


class IdxFormatError(ValueError):
    """Malformed IDX content (bad magic, out-of-domain values)."""


class IdxLengthError(IdxFormatError):
    """IDX payload shorter than the header declares."""


@dataclass(frozen=True)
class LabeledSample:
    """One ground-truth image with its digit class."""

    image: np.ndarray
    label: int

    def __post_init__(self):
        if not 0 <= self.label <= 9:
            raise ValueError(f"label {self.label} outside 0-9")


def _read_bytes(path):
    data = Path(path).read_bytes()
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    return data


def load_idx_images(path) -> np.ndarray:
    """Read an IDX image file into a (count, rows, cols) float64 stack in [0, 1].

    Byte value v maps to v/255. Raises IdxFormatError on a bad magic and
    IdxLengthError when the pixel payload is truncated.
    """
    data = _read_bytes(path)
    if len(data) < 16:
        raise IdxLengthError(f"{path}: header needs 16 bytes, got {len(data)}")
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IDX_IMAGES_MAGIC:
        raise IdxFormatError(
            f"{path}: bad magic 0x{magic:08x}, expected 0x{IDX_IMAGES_MAGIC:08x}"
        )
    expected = count * rows * cols
    payload = data[16:]
    if len(payload) < expected:
        raise IdxLengthError(
            f"{path}: expected {expected} pixel bytes, got {len(payload)}"
        )
    pixels = np.frombuffer(payload[:expected], dtype=np.uint8)
    return pixels.reshape(count, rows, cols).astype(np.float64) / 255.0


def load_idx_labels(path) -> np.ndarray:
    """Read an IDX label file into a (count,) uint8 array with values 0-9."""
    data = _read_bytes(path)
    if len(data) < 8:
        raise IdxLengthError(f"{path}: header needs 8 bytes, got {len(data)}")
    magic, count = struct.unpack(">II", data[:8])
    if magic != IDX_LABELS_MAGIC:
        raise IdxFormatError(
            f"{path}: bad magic 0x{magic:08x}, expected 0x{IDX_LABELS_MAGIC:08x}"
        )
    payload = data[8:]
    if len(payload) < count:
        raise IdxLengthError(f"{path}: expected {count} label bytes, got {len(payload)}")
    labels = np.frombuffer(payload[:count], dtype=np.uint8)
    if labels.size and labels.max() > 9:
        raise IdxFormatError(f"{path}: label {labels.max()} outside 0-9")
    return labels.copy()


def save_idx_images(path, images) -> None:
    """Write a (count, rows, cols) stack as an IDX image file.

    Values are rounded to the nearest byte of v*255; a stack read with
    load_idx_images round-trips bit-identically.
    """
    images = np.asarray(images, dtype=np.float64)
    count, rows, cols = images.shape
    body = np.rint(images * 255.0).clip(0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", IDX_IMAGES_MAGIC, count, rows, cols))
        fh.write(body.tobytes())


def save_idx_labels(path, labels) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", IDX_LABELS_MAGIC, labels.size))
        fh.write(labels.tobytes())


def load_labeled(images_path, labels_path) -> list[LabeledSample]:
    """Load an image/label file pair; counts must agree."""
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise ValueError(
            f"count mismatch: {images.shape[0]} images vs {labels.shape[0]} labels"
        )
    return [LabeledSample(img, int(lab)) for img, lab in zip(images, labels)]


def load_test_split(dataset_dir) -> list[LabeledSample]:
    """Load the canonical test split (t10k files) from a dataset directory."""
    root = Path(dataset_dir)
    return load_labeled(
        _find_standard(root, STANDARD_FILES["test_images"]),
        _find_standard(root, STANDARD_FILES["test_labels"]),
    )


def _find_standard(root, basename):
    for candidate in (root / basename, root / (basename + ".gz")):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"{basename}[.gz] not found under {root}")


def pick_one_per_class(samples, seed) -> list[LabeledSample]:
    """Select one random sample per digit class 0-9, deterministically per seed.

    The result is ordered by class. Raises ValueError when a class is absent.
    """
    by_class: dict[int, list[int]] = {c: [] for c in range(10)}
    for idx, sample in enumerate(samples):
        by_class[sample.label].append(idx)
    missing = [c for c, idxs in by_class.items() if not idxs]
    if missing:
        raise ValueError(f"classes {missing} absent from the sample list")
    rng = np.random.default_rng(seed)
    return [samples[by_class[c][rng.integers(len(by_class[c]))]] for c in range(10)]


def mean_sparsity(images, threshold: float = 0.0) -> float:
    """Mean fraction of pixels above `threshold`, averaged over images.

    With the default threshold 0 this counts strictly positive pixels,
    the fraction of non-zero entries of each flattened image.
    """
    if not 0.0 <= threshold < 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1)")
    stack = [np.asarray(img, dtype=np.float64) for img in images]
    if not stack:
        raise ValueError("empty image list")
    fractions = [float(np.count_nonzero(img > threshold)) / img.size for img in stack]
    return float(np.mean(fractions))
