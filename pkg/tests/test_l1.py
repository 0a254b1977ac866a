"""Basis pursuit solvers checked against independent oracles: a bisection
projection oracle, unconstrained least squares, KKT conditions, and the
Pareto-curve root characterization."""

import json

import numpy as np
import pytest

from speckle_cs.l1 import (
    BpdnConfig,
    SolveReport,
    project_l1_ball,
    solve_bp,
    solve_bpdn,
    solve_lasso,
    tune_delta,
)


def projection_oracle(v, tau, tol=1e-14):
    """Project onto the l1 ball by bisecting the shrinkage threshold.

    g(theta) = sum(max(|v|-theta, 0)) is continuous and non-increasing;
    the projection shrinks by the theta with g(theta) = tau. Independent
    of the sort-based routine under test.
    """
    v = np.asarray(v, dtype=np.float64)
    if np.abs(v).sum() <= tau:
        return v.copy()
    lo, hi = 0.0, np.abs(v).max()
    for _ in range(200):
        mid = (lo + hi) / 2
        if np.maximum(np.abs(v) - mid, 0.0).sum() > tau:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    theta = (lo + hi) / 2
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


def _sparse_instance(seed, m=40, n=120, k=3, noise=0.0):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    x0 = np.zeros(n)
    support = rng.choice(n, size=k, replace=False)
    x0[support] = rng.standard_normal(k) + np.sign(rng.standard_normal(k))
    y = A @ x0
    if noise:
        y = y + noise * rng.standard_normal(m)
    return A, x0, y


class TestProjectL1Ball:
    def test_against_bisection_oracle(self):
        rng = np.random.default_rng(12)
        for trial in range(300):
            n = int(rng.integers(1, 50))
            v = rng.standard_normal(n) * rng.choice([0.1, 1.0, 10.0])
            tau = float(rng.uniform(0.01, 1.2 * np.abs(v).sum()))
            got = project_l1_ball(v, tau)
            expected = projection_oracle(v, tau)
            np.testing.assert_allclose(got, expected, atol=1e-10)

    def test_inside_ball_untouched(self):
        v = np.array([0.1, -0.2, 0.3])
        out = project_l1_ball(v, 1.0)
        np.testing.assert_array_equal(out, v)
        assert out is not v

    def test_result_on_sphere_when_outside(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            v = rng.standard_normal(20) * 5
            tau = 1.0
            out = project_l1_ball(v, tau)
            assert np.abs(out).sum() == pytest.approx(tau, abs=1e-9)

    def test_optimality_against_random_feasible_points(self):
        rng = np.random.default_rng(2)
        v = rng.standard_normal(15) * 3
        tau = 2.0
        p = project_l1_ball(v, tau)
        d_p = np.linalg.norm(p - v)
        for _ in range(200):
            w = rng.standard_normal(15)
            w = w / np.abs(w).sum() * tau * rng.uniform(0, 1)
            assert np.linalg.norm(w - v) >= d_p - 1e-12

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        v = rng.standard_normal(30) * 4
        once = project_l1_ball(v, 1.5)
        np.testing.assert_allclose(project_l1_ball(once, 1.5), once, atol=1e-12)

    def test_tau_zero(self):
        np.testing.assert_array_equal(project_l1_ball(np.array([1.0, -2.0]), 0.0), 0.0)

    def test_negative_tau_rejected(self):
        with pytest.raises(ValueError):
            project_l1_ball(np.array([1.0]), -0.5)

    def test_sign_pattern_preserved(self):
        v = np.array([3.0, -2.0, 0.5, -0.1])
        out = project_l1_ball(v, 1.0)
        assert np.all(out * v >= 0)


class TestSolveLasso:
    def test_least_squares_oracle_with_slack_tau(self):
        """Overdetermined system with tau above ||x_ls||_1: the constraint
        is inactive, so the answer is plain least squares."""
        rng = np.random.default_rng(4)
        A = rng.standard_normal((60, 20))
        y = rng.standard_normal(60)
        x_ls = np.linalg.lstsq(A, y, rcond=None)[0]
        tau = 1.5 * np.abs(x_ls).sum()
        report = solve_lasso(A, y, tau)
        np.testing.assert_allclose(report.solution, x_ls, atol=1e-5)
        assert report.converged

    def test_kkt_conditions_on_active_constraint(self):
        """At a solution with ||x||_1 = tau there is lambda >= 0 with
        A^T r = lambda * sign(x) on the support and |A^T r| <= lambda off it."""
        A, x0, y = _sparse_instance(5)
        tau = 0.6 * np.abs(x0).sum()  # forces the constraint active
        report = solve_lasso(A, y, tau, BpdnConfig(opt_tol=1e-10))
        x = report.solution
        assert np.abs(x).sum() == pytest.approx(tau, rel=1e-8)
        g = A.T @ (A @ x - y)  # gradient of 1/2 ||Ax-y||^2
        support = np.abs(x) > 1e-8 * np.abs(x).max()
        lam = np.mean(-g[support] * np.sign(x[support]))
        assert lam > 0
        np.testing.assert_allclose(-g[support], lam * np.sign(x[support]), rtol=1e-4)
        assert np.all(np.abs(g[~support]) <= lam * (1 + 1e-4) + 1e-10)

    def test_tau_zero_returns_zero(self):
        rng = np.random.default_rng(6)
        A = rng.standard_normal((10, 30))
        y = rng.standard_normal(10)
        report = solve_lasso(A, y, 0.0)
        np.testing.assert_array_equal(report.solution, 0.0)
        assert report.converged
        assert report.residual_norm == pytest.approx(np.linalg.norm(y))

    def test_objective_never_worse_than_start(self):
        A, x0, y = _sparse_instance(7)
        report = solve_lasso(A, y, 1.0)
        assert report.objective_trace[-1] <= report.objective_trace[0] + 1e-12

    def test_nonfinite_inputs_rejected(self):
        A = np.full((3, 4), np.nan)
        with pytest.raises(FloatingPointError):
            solve_lasso(A, np.zeros(3), 1.0)


class TestSolveBp:
    def test_exact_recovery(self):
        A, x0, y = _sparse_instance(8)
        report = solve_bp(A, y)
        assert report.converged
        np.testing.assert_allclose(report.solution, x0, atol=1e-4)

    def test_residual_below_tolerance(self):
        A, x0, y = _sparse_instance(9)
        report = solve_bp(A, y)
        assert report.residual_norm <= 1e-5 * max(1.0, np.linalg.norm(y))

    def test_zero_measurements_give_zero(self):
        rng = np.random.default_rng(10)
        A = rng.standard_normal((5, 12))
        report = solve_bp(A, np.zeros(5))
        np.testing.assert_array_equal(report.solution, 0.0)
        assert report.converged

    def test_deterministic(self):
        A, x0, y = _sparse_instance(11)
        a = solve_bp(A, y)
        b = solve_bp(A, y)
        np.testing.assert_array_equal(a.solution, b.solution)


class TestSolveBpdn:
    def test_residual_hits_delta(self):
        """Pareto root: the solution's residual norm equals delta."""
        A, x0, y = _sparse_instance(13, noise=0.05)
        delta = 0.3 * np.linalg.norm(y)
        report = solve_bpdn(A, y, BpdnConfig(delta=delta))
        assert report.converged
        tol = 1e-5 * max(1.0, np.linalg.norm(y))
        assert abs(report.residual_norm - delta) <= tol

    def test_l1_norm_shrinks_with_delta(self):
        A, x0, y = _sparse_instance(14, noise=0.05)
        norms = []
        for frac in (0.05, 0.2, 0.5):
            delta = frac * np.linalg.norm(y)
            norms.append(solve_bpdn(A, y, BpdnConfig(delta=delta)).l1_norm)
        assert norms[0] > norms[1] > norms[2]

    def test_delta_above_signal_gives_zero(self):
        A, x0, y = _sparse_instance(15)
        delta = 2.0 * np.linalg.norm(y)
        report = solve_bpdn(A, y, BpdnConfig(delta=delta))
        np.testing.assert_array_equal(report.solution, 0.0)
        assert report.converged

    def test_delta_zero_matches_bp(self):
        for seed in range(10):
            A, x0, y = _sparse_instance(100 + seed)
            bp = solve_bp(A, y)
            bpdn = solve_bpdn(A, y, BpdnConfig(delta=0.0, pareto_tol=1e-6 * max(1.0, np.linalg.norm(y))))
            assert np.abs(bp.solution - bpdn.solution).max() < 1e-4

    def test_negative_delta_rejected(self):
        with pytest.raises(ValueError):
            BpdnConfig(delta=-1.0)

    def test_honest_nonconvergence_flag(self):
        """Starved of iterations the solver must say converged=False."""
        A, x0, y = _sparse_instance(16)
        report = solve_bpdn(A, y, BpdnConfig(delta=0.0, max_outer=1, max_inner=2))
        assert not report.converged


class TestTuneDelta:
    def test_picks_best_correlation(self):
        A, x0, y = _sparse_instance(17, noise=0.1)
        grid = [0.01 * np.linalg.norm(y), 1.5 * np.linalg.norm(y)]
        best_delta, best_r = tune_delta(A, y, x0, grid)
        # the huge delta yields x=0 whose correlation is undefined
        assert best_delta == grid[0]
        assert best_r > 0.5

    def test_empty_grid_rejected(self):
        A, x0, y = _sparse_instance(18)
        with pytest.raises(ValueError):
            tune_delta(A, y, x0, [])


class TestSolveReport:
    def test_json_round_trip(self):
        A, x0, y = _sparse_instance(19)
        report = solve_bp(A, y)
        clone = SolveReport.from_json(report.to_json())
        np.testing.assert_array_equal(clone.solution, report.solution)
        assert clone.residual_norm == report.residual_norm
        assert clone.l1_norm == report.l1_norm
        assert clone.iterations == report.iterations
        assert clone.converged == report.converged

    def test_json_is_plain_dict(self):
        A, x0, y = _sparse_instance(20)
        doc = json.loads(solve_bp(A, y).to_json())
        assert {"solution_b64", "residual_norm", "l1_norm", "iterations", "converged"} <= set(doc)
