"""Image reconstruction by optimizing over a generator's latent space.

The search minimizes L(z) = ||A flatten((G(z)+1)/2) - y||^2 with Adam from
several independent random initializations and keeps the restart with the
lowest final loss. A single restart frequently lands in a poor basin; the
restart count trades compute for reliability.
"""

from __future__ import annotations

import base64
import json
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .forward_model import NoiseSpec, SpeckleConfig, add_noise, build_matrix, measure
from .generator import (
    AdamState,
    GeneratorModel,
    NumericError,
    adam_step,
    forward,
    loss_and_gradient,
    loss_value,
    output_image,
    to_measurement_domain,
)
from .images import save_image
from .seeds import derived_rng, seed_entropy

logger = logging.getLogger(__name__)


class ReconstructionError(RuntimeError):
    """Every restart failed numerically; no solution is available."""


@dataclass(frozen=True)
class ReconConfig:
    """Latent-space search settings.

    steps=0 is allowed and returns the decoded random initialization,
    which is occasionally useful as a baseline.
    """

    steps: int = 2000
    restarts: int = 10
    lr: float = 0.1
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    plateau_stop: bool = False
    plateau_window: int = 100
    plateau_rtol: float = 1e-6

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        if self.plateau_window < 1:
            raise ValueError(f"plateau_window must be >= 1, got {self.plateau_window}")


@dataclass
class ReconResult:
    """Best restart of a latent-space search."""

    image: np.ndarray          # measurement-domain [0, 1], shape (H, W)
    latent: np.ndarray         # z achieving the best final loss
    loss: float                # final loss of the winning restart
    restart_losses: list       # final loss per restart, NaN where a restart failed
    best_restart: int
    loss_trace: list = field(default_factory=list)  # per-step losses, winning restart

    def to_json(self) -> str:
        payload = {
            "loss": self.loss,
            "best_restart": self.best_restart,
            "restart_losses": [float(v) for v in self.restart_losses],
            "image_shape": list(self.image.shape),
            "image": base64.b64encode(
                np.ascontiguousarray(self.image, dtype="<f8").tobytes()
            ).decode("ascii"),
            "latent": [float(v) for v in self.latent],
            "loss_trace": [float(v) for v in self.loss_trace],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "ReconResult":
        doc = json.loads(text)
        image = np.frombuffer(
            base64.b64decode(doc["image"]), dtype="<f8"
        ).reshape(doc["image_shape"]).astype(np.float64)
        return cls(
            image=image,
            latent=np.asarray(doc["latent"], dtype=np.float64),
            loss=float(doc["loss"]),
            restart_losses=[float(v) for v in doc["restart_losses"]],
            best_restart=int(doc["best_restart"]),
            loss_trace=[float(v) for v in doc.get("loss_trace", [])],
        )

    def save_image(self, path) -> None:
        save_image(path, self.image)


def _run_restart(model, A, y, z0, config):
    """Adam descent from one initialization; returns (final loss, z, trace)."""
    z = z0
    state = AdamState.initial(z.size, config.lr, config.beta1, config.beta2, config.eps)
    trace = []
    for step in range(config.steps):
        loss, grad = loss_and_gradient(model, z, A, y)
        trace.append(loss)
        state, z = adam_step(state, z, grad)
        if (
            config.plateau_stop
            and len(trace) > config.plateau_window
            and trace[-config.plateau_window - 1] - loss
            <= config.plateau_rtol * max(1.0, trace[-config.plateau_window - 1])
        ):
            break
    final = loss_value(model, z, A, y)
    trace.append(final)
    return final, z, trace


def reconstruct(model: GeneratorModel, A, y, config: ReconConfig | None = None) -> ReconResult:
    """Multi-restart latent search; returns the restart with lowest final loss.

    Restart seeds derive from (config.seed, restart index), so results are
    reproducible and individual restarts can be re-run in isolation. A
    restart that hits non-finite values is recorded as NaN and skipped; if
    every restart fails, ReconstructionError is raised.
    """
    if config is None:
        config = ReconConfig()
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
        raise FloatingPointError("matrix and measurements must be finite")

    best = None  # (loss, restart, z, trace)
    restart_losses = []
    for restart in range(config.restarts):
        rng = derived_rng(config.seed, restart)
        z0 = rng.standard_normal(model.latent_dim)
        try:
            final, z, trace = _run_restart(model, A, y, z0, config)
        except (NumericError, FloatingPointError) as exc:
            warnings.warn(f"restart {restart} failed: {exc}", RuntimeWarning, stacklevel=2)
            restart_losses.append(float("nan"))
            continue
        restart_losses.append(final)
        if best is None or final < best[0]:
            best = (final, restart, z, trace)
        logger.debug("restart %d/%d: final loss %.6g", restart + 1, config.restarts, final)

    if best is None:
        raise ReconstructionError(f"all {config.restarts} restarts failed numerically")

    loss, restart, z, trace = best
    image = to_measurement_domain(output_image(forward(model, z)))
    return ReconResult(
        image=image,
        latent=z,
        loss=loss,
        restart_losses=restart_losses,
        best_restart=restart,
        loss_trace=trace,
    )


def reconstruct_digit_case(
    model: GeneratorModel,
    truth: np.ndarray,
    m: int,
    cutoff: float,
    noise: NoiseSpec | None = None,
    seed: int = 0,
    config: ReconConfig | None = None,
):
    """End-to-end single case: simulate patterns, measure truth, reconstruct.

    Measurements are formed with the clean matrix; when noise.level > 0
    both the matrix handed to the solver and the measurement vector are
    perturbed through independent seed streams. Returns (ReconResult, r)
    where r is the Pearson correlation against truth.
    """
    from .experiments import pearson

    truth = np.asarray(truth, dtype=np.float64)
    if truth.ndim != 2:
        raise ValueError(f"truth must be a 2-D image, got shape {truth.shape}")
    if m < 1:
        raise ValueError(f"need at least one measurement, got m={m}")
    if noise is None:
        noise = NoiseSpec()

    A_clean = build_matrix(
        m, SpeckleConfig(grid=truth.shape[0], cutoff=cutoff, seed=seed_entropy(seed, "matrix"))
    )
    y = measure(A_clean, truth)
    A_solver = A_clean
    if noise.level > 0:
        A_solver = add_noise(A_clean, NoiseSpec(noise.level, seed_entropy(noise.seed, "matrix-noise")))
        y = add_noise(y, NoiseSpec(noise.level, seed_entropy(noise.seed, "signal-noise")))

    if config is None:
        config = ReconConfig(seed=seed_entropy(seed, "latent"))
    result = reconstruct(model, A_solver, y, config)
    return result, pearson(result.image.ravel(), truth.ravel())
