"""Basis pursuit (BP) and basis pursuit denoising (BPDN) solvers.

BPDN   min ||x||_1  s.t.  ||y - Ax||_2 <= delta

is solved by Newton root-finding on the Pareto curve
phi(tau) = min_{||x||_1 <= tau} ||Ax - y||_2, with each LASSO subproblem
handled by a spectral projected-gradient iteration (Barzilai-Borwein step,
nonmonotone line search). BP is the delta = 0 case with a tightened root
tolerance. delta is expressed in residual-norm units, commensurate with
||y||_2.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field, replace

import numpy as np

STEP_MIN = 1e-10
STEP_MAX = 1e10
LINESEARCH_MEMORY = 10
SUFFICIENT_DECREASE = 1e-4
MAX_BACKTRACKS = 50


@dataclass
class BpdnConfig:
    """Solver tolerances; delta is the residual-norm budget.

    pareto_tol=None selects the default 1e-5 * max(1, ||y||_2); solve_bp
    tightens it to 1e-6 * max(1, ||y||_2).
    """

    delta: float = 0.0
    max_outer: int = 40
    max_inner: int = 10000
    opt_tol: float = 1e-6
    pareto_tol: float | None = None

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.opt_tol <= 0 or (self.pareto_tol is not None and self.pareto_tol <= 0):
            raise ValueError("tolerances must be > 0")


@dataclass
class SolveReport:
    """Solution vector with residual/l1 norms, iteration count, convergence flag."""

    solution: np.ndarray
    residual_norm: float
    l1_norm: float
    iterations: int
    converged: bool
    objective_trace: list[float] | None = field(default=None, repr=False)

    def to_json(self) -> str:
        payload = np.ascontiguousarray(self.solution, dtype="<f8").tobytes()
        return json.dumps(
            {
                "solution_b64": base64.b64encode(payload).decode("ascii"),
                "residual_norm": self.residual_norm,
                "l1_norm": self.l1_norm,
                "iterations": self.iterations,
                "converged": self.converged,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SolveReport":
        doc = json.loads(text)
        solution = np.frombuffer(
            base64.b64decode(doc["solution_b64"]), dtype="<f8"
        ).astype(np.float64)
        return cls(
            solution=solution,
            residual_norm=doc["residual_norm"],
            l1_norm=doc["l1_norm"],
            iterations=doc["iterations"],
            converged=doc["converged"],
        )


def project_l1_ball(v, tau: float) -> np.ndarray:
    """Euclidean projection of v onto the l1 ball of radius tau.

    Sort-and-threshold soft shrinkage: the projection is
    sign(v) * max(|v| - theta, 0) with theta chosen so the result's l1
    norm equals tau (zero shrinkage when v is already feasible).
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    v = np.asarray(v, dtype=np.float64)
    if tau == 0.0:
        return np.zeros_like(v)
    mag = np.abs(v)
    if mag.sum() <= tau:
        return v.copy()
    u = np.sort(mag)[::-1]
    cumsum = np.cumsum(u)
    k = np.arange(1, u.size + 1)
    # Largest k with u_k > (sum of k largest - tau)/k; theta from that prefix.
    valid = u > (cumsum - tau) / k
    k_star = int(np.nonzero(valid)[0][-1])
    theta = (cumsum[k_star] - tau) / (k_star + 1)
    return np.sign(v) * np.maximum(mag - theta, 0.0)


def solve_lasso(A, y, tau: float, config: BpdnConfig | None = None, x0=None) -> SolveReport:
    """min ||Ax - y||_2 subject to ||x||_1 <= tau, by spectral projected gradient.

    Iterates until the projected-gradient norm drops below
    opt_tol * (1 + ||y||_2) or max_inner iterations. The accepted-objective
    trace is attached to the report for the nonmonotone-window diagnostics.
    """
    config = config or BpdnConfig()
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
        raise FloatingPointError("non-finite entries in A or y")
    n = A.shape[1]
    y_norm = float(np.linalg.norm(y))
    stop_tol = config.opt_tol * (1.0 + y_norm)

    if tau == 0.0:
        trace = [0.5 * y_norm**2]
        return SolveReport(np.zeros(n), y_norm, 0.0, 0, True, trace)

    x = np.zeros(n) if x0 is None else project_l1_ball(np.asarray(x0, np.float64), tau)
    residual = A @ x - y
    f = 0.5 * float(residual @ residual)
    grad = A.T @ residual
    trace = [f]
    last_fv = [f]

    # Initial spectral step from the projected steepest-descent displacement.
    dx = project_l1_ball(x - grad, tau) - x
    dx_inf = float(np.max(np.abs(dx))) if dx.size else 0.0
    step = STEP_MAX if dx_inf < 1.0 / STEP_MAX else min(STEP_MAX, max(STEP_MIN, 1.0 / dx_inf))

    iterations = 0
    converged = float(np.linalg.norm(dx)) <= stop_tol
    while not converged and iterations < config.max_inner:
        direction = project_l1_ball(x - step * grad, tau) - x
        gtd = float(grad @ direction)
        if gtd >= 0.0:
            # No descent available along the projection arc: stationary.
            converged = True
            break

        f_max = max(last_fv)
        alpha = 1.0
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            x_new = x + alpha * direction
            residual_new = A @ x_new - y
            f_new = 0.5 * float(residual_new @ residual_new)
            if f_new <= f_max + SUFFICIENT_DECREASE * alpha * gtd:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break

        grad_new = A.T @ residual_new
        s = x_new - x
        q = grad_new - grad
        sq = float(s @ q)
        step = STEP_MAX if sq <= 1e-16 else min(STEP_MAX, max(STEP_MIN, float(s @ s) / sq))

        x, residual, f, grad = x_new, residual_new, f_new, grad_new
        trace.append(f)
        last_fv.append(f)
        if len(last_fv) > LINESEARCH_MEMORY:
            last_fv.pop(0)
        iterations += 1

        dx = project_l1_ball(x - grad, tau) - x
        converged = float(np.linalg.norm(dx)) <= stop_tol

    residual_norm = float(np.linalg.norm(residual))
    return SolveReport(x, residual_norm, float(np.abs(x).sum()), iterations, converged, trace)


def solve_bpdn(A, y, config: BpdnConfig | None = None) -> SolveReport:
    """BPDN via Pareto root-finding: Newton iteration on phi(tau) = delta.

    Newton update tau <- tau + (phi - delta) * ||r||_2 / ||A^T r||_inf
    (the Pareto curve's slope is -||A^T r||_inf / ||r||_2), starting from
    tau = 0. Non-convergence within max_outer root steps is reported with
    converged=False, never silently.
    """
    config = config or BpdnConfig()
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    delta = config.delta
    y_norm = float(np.linalg.norm(y))
    pareto_tol = config.pareto_tol if config.pareto_tol is not None else 1e-5 * max(1.0, y_norm)

    n = A.shape[1]
    if y_norm <= delta:
        # Zero is feasible and has minimal l1 norm.
        return SolveReport(np.zeros(n), y_norm, 0.0, 0, True)

    tau = 0.0
    x = np.zeros(n)
    total_inner = 0
    converged = False
    for _ in range(config.max_outer):
        sub = solve_lasso(A, y, tau, config, x0=x)
        x = sub.solution
        total_inner += sub.iterations
        residual = y - A @ x
        phi = float(np.linalg.norm(residual))
        if abs(phi - delta) <= pareto_tol:
            converged = True
            break
        grad_inf = float(np.max(np.abs(A.T @ residual)))
        if grad_inf <= 1e-13 * max(1.0, phi):
            # Least-squares floor: the residual cannot be reduced further.
            converged = phi <= delta + pareto_tol
            break
        tau_new = max(0.0, tau + (phi - delta) * phi / grad_inf)
        if abs(tau_new - tau) <= 1e-12 * max(1.0, tau):
            converged = abs(phi - delta) <= pareto_tol
            break
        if tau_new < tau:
            x = project_l1_ball(x, tau_new)
        tau = tau_new

    residual_norm = float(np.linalg.norm(y - A @ x))
    return SolveReport(x, residual_norm, float(np.abs(x).sum()), total_inner, converged)


def solve_bp(A, y, config: BpdnConfig | None = None) -> SolveReport:
    """Basis pursuit: BPDN at delta = 0 with root tolerance 1e-6 * max(1, ||y||_2)."""
    base = config or BpdnConfig()
    y_norm = float(np.linalg.norm(np.asarray(y, dtype=np.float64)))
    bp_config = replace(base, delta=0.0, pareto_tol=1e-6 * max(1.0, y_norm))
    return solve_bpdn(A, y, bp_config)


def tune_delta(A, y, truth, grid, config: BpdnConfig | None = None):
    """Solve BPDN for every delta in `grid`; return (best delta, best Pearson r).

    Evaluation-mode helper: requires the ground truth. Undefined correlations
    rank below any defined value.
    """
    from .experiments import pearson

    grid = list(grid)
    if not grid:
        raise ValueError("empty delta grid")
    base = config or BpdnConfig()
    truth_flat = np.asarray(truth, dtype=np.float64).ravel()
    best_delta, best_r = grid[0], -np.inf
    for delta in grid:
        report = solve_bpdn(A, y, replace(base, delta=float(delta)))
        r = pearson(report.solution, truth_flat)
        if np.isfinite(r) and r > best_r:
            best_delta, best_r = float(delta), float(r)
    if not np.isfinite(best_r):
        return best_delta, float("nan")  # correlation undefined at every candidate
    return best_delta, best_r
