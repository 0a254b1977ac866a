"""Self-contained fixtures: random-weight generator models and a synthetic
labeled image set.

These support tests and demos that must run without any downloaded data.
A random-weight generator is useless as an image prior but is a perfectly
good test subject: its outputs live on a smooth low-dimensional manifold,
so latent-space search against measurements of its own output must succeed.
"""

from __future__ import annotations

import numpy as np

from .generator import (
    AffineChannel,
    ConvTranspose2d,
    Dense,
    GeneratorModel,
    LeakyRelu,
    Reshape,
    Tanh,
)
from .seeds import derived_rng

ARCHITECTURES = ("small", "full")


def _conv_std(kernel: int, in_ch: int, stride: int) -> float:
    # Keeps activation variance roughly constant through the scatter:
    # each output position accumulates about (K/s)^2 * in_ch weighted taps.
    return stride / (kernel * np.sqrt(in_ch))


def random_generator_model(seed: int = 0, arch: str = "small") -> GeneratorModel:
    """Random-weight generator with the standard layer pattern.

    ``small`` uses 16/8/4/1 channels (fast enough for test suites),
    ``full`` uses the 256/128/64/1 production widths. Both map a
    100-vector to a 28x28 image through dense, reshape, and three
    transposed convolutions with per-channel affines and leaky ReLU,
    ending in tanh.
    """
    if arch == "small":
        widths = (16, 8, 4)
    elif arch == "full":
        widths = (256, 128, 64)
    else:
        raise ValueError(f"unknown architecture {arch!r}, expected one of {ARCHITECTURES}")

    rng = derived_rng(seed, "generator", arch)
    c0, c1, c2 = widths
    latent = 100
    dense_out = 7 * 7 * c0
    k = 5

    def affine(channels):
        scale = 1.0 + 0.2 * rng.standard_normal(channels)
        shift = 0.1 * rng.standard_normal(channels)
        return AffineChannel(scale, shift)

    def conv(in_ch, out_ch, stride):
        w = rng.standard_normal((k, k, out_ch, in_ch)) * _conv_std(k, in_ch, stride)
        return ConvTranspose2d(w, stride)

    layers = [
        Dense(rng.standard_normal((latent, dense_out)) / np.sqrt(latent),
              np.zeros(dense_out)),
        Reshape((7, 7, c0)),
        affine(c0),
        LeakyRelu(0.3),
        conv(c0, c1, stride=1),
        affine(c1),
        LeakyRelu(0.3),
        conv(c1, c2, stride=2),
        affine(c2),
        LeakyRelu(0.3),
        conv(c2, 1, stride=2),
        Tanh(),
    ]
    return GeneratorModel(layers, latent_dim=latent)


def synthetic_digits(seed: int = 0, count: int = 100, grid: int = 28):
    """Ten stroke-like class patterns with per-sample jitter.

    Stand-in data for pipelines that expect a labeled image set of
    handwritten digits: returns (images, labels) with images in [0, 1]
    shaped (count, grid, grid) and every class present whenever
    count >= 10. Each class is a fixed wandering stroke stamped from
    round brush dabs; samples of a class jitter the stroke control
    points. Pixels off the stroke are exactly zero, so the images share
    the sparse bright-ink-on-dark statistics of real digit scans.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = derived_rng(seed, "synthetic-digits")
    # class skeletons: 4-6 control points inside the central region
    paths = [
        rng.uniform(0.2 * grid, 0.8 * grid, size=(int(rng.integers(4, 7)), 2))
        for _ in range(10)
    ]
    yy, xx = np.mgrid[0:grid, 0:grid]
    sigma = grid / 24.0  # brush radius, ~1.2 px at the standard 28
    images = np.empty((count, grid, grid))
    labels = np.empty(count, dtype=np.uint8)
    for i in range(count):
        c = i % 10
        pts = paths[c] + rng.normal(0.0, 0.6, size=paths[c].shape)
        canvas = np.zeros((grid, grid))
        for (y0, x0), (y1, x1) in zip(pts[:-1], pts[1:]):
            for t in np.linspace(0.0, 1.0, 12):
                cy, cx = y0 + t * (y1 - y0), x0 + t * (x1 - x0)
                canvas += np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * sigma**2))
        canvas /= canvas.max()
        canvas[canvas < 0.15] = 0.0  # clean dark background
        images[i] = canvas
        labels[i] = c
    return images, labels
