"""Fully developed speckle synthesis and diffraction-limited low-pass filtering.

A speckle intensity pattern is the squared modulus of a random complex
field whose entries are i.i.d. circular Gaussian (real and imaginary parts
standard normal), band-limited in the Fourier domain to a disk of radius
``cutoff * N/2`` cycles per image. The cutoff is the normalized spatial
frequency: 1.0 keeps every representable frequency, smaller values grow
the speckle grains and emulate a tighter diffraction limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_GRID = 28


@dataclass(frozen=True)
class SpeckleConfig:
    """Grid size, normalized frequency cutoff in (0, 1], and RNG seed."""

    grid: int = DEFAULT_GRID
    cutoff: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.grid < 1:
            raise ValueError(f"grid must be >= 1, got {self.grid}")
        if not 0.0 < self.cutoff <= 1.0:
            raise ValueError(f"cutoff must lie in (0, 1], got {self.cutoff}")


def frequency_radius(n: int) -> np.ndarray:
    """Centered integer frequency radii on an n x n grid, in FFT order."""
    freqs = np.fft.fftfreq(n) * n
    fy, fx = np.meshgrid(freqs, freqs, indexing="ij")
    return np.hypot(fy, fx)


def lowpass_mask(n: int, cutoff: float) -> np.ndarray:
    """Boolean keep-mask for the disk of radius cutoff * n/2, FFT order.

    The boundary is inclusive. cutoff = 1 keeps every representable
    frequency (the corners of the frequency grid included), so the
    resulting filter is the identity.
    """
    if not 0.0 < cutoff <= 1.0:
        raise ValueError(f"cutoff must lie in (0, 1], got {cutoff}")
    if cutoff == 1.0:
        return np.ones((n, n), dtype=bool)
    return frequency_radius(n) <= cutoff * (n / 2.0)


def field_spectrum(config: SpeckleConfig) -> np.ndarray:
    """Masked Fourier spectrum of one random circular-Gaussian field.

    Coefficients outside the cutoff disk are exactly zero. The spatial
    field is the inverse FFT of this spectrum.
    """
    rng = np.random.default_rng(config.seed)
    n = config.grid
    field = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    spectrum = np.fft.fft2(field)
    spectrum[~lowpass_mask(n, config.cutoff)] = 0.0
    return spectrum


def generate_speckle_field(config: SpeckleConfig) -> np.ndarray:
    """Band-limited complex speckle field in the spatial domain."""
    return np.fft.ifft2(field_spectrum(config))


def generate_speckle(config: SpeckleConfig) -> np.ndarray:
    """One unnormalized speckle intensity pattern (squared field modulus)."""
    field = generate_speckle_field(config)
    return (field.real**2 + field.imag**2)


def low_pass(image, cutoff: float) -> np.ndarray:
    """Zero all Fourier coefficients outside radius cutoff * N/2.

    Linear and idempotent for a fixed cutoff; returns the real part of
    the inverse transform.
    """
    image = np.asarray(image, dtype=np.float64)
    n = image.shape[0]
    if image.shape != (n, n):
        raise ValueError(f"expected a square image, got shape {image.shape}")
    spectrum = np.fft.fft2(image)
    spectrum[~lowpass_mask(n, cutoff)] = 0.0
    return np.fft.ifft2(spectrum).real


def diffraction_limited_image(truth, cutoff: float) -> np.ndarray:
    """Diffraction-limited view of a ground-truth intensity image.

    The result is the unclipped low-pass output (small negative ringing
    retained); clip to [0, inf) only for display.
    """
    return low_pass(truth, cutoff)
