import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _instances import WORKED_A2, WORKED_D2, WORKED_X, SQRT368, worked_problem, random_configuration, random_problem
from oosembed.errors import DimensionMismatch, NearSingular, RankDeficientConfiguration
from oosembed.oracle import grid_min, quartic_1d_roots, solve_full_pivot
from oosembed.project import project_ols
from oosembed.restrict import (
    OosProblem,
    RidgeSystem,
    objective,
    objective_gradient,
    r_hat_squared,
    ridge_solve,
    solve_single,
)
from oosembed.restrict.problem import objective_hessian

REGIMES = ["below", "equal", "above", "hard"]


def central_difference(f, y, h):
    g = np.zeros_like(y)
    for i in range(y.size):
        e = np.zeros_like(y)
        e[i] = h
        g[i] = (f(y + e) - f(y - e)) / (2 * h)
    return g


class TestObjective:
    def test_worked_minimizer_value(self):
        assert objective(worked_problem(), [0.0, SQRT368]) == pytest.approx(64 * 368 + 32**2, rel=1e-14)
        assert 64 * 368 + 32**2 == 24576

    def test_worked_origin(self):
        assert objective(worked_problem(), [0.0, 0.0]) == 160000.0

    def test_zero_data(self):
        assert objective(OosProblem(WORKED_X, np.zeros(4), 0.0), np.zeros(2)) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            objective(worked_problem(), [1.0, 2.0, 3.0])
        with pytest.raises(DimensionMismatch):
            OosProblem(WORKED_X, np.zeros(3), 1.0)

    def test_gradient_specialization(self):
        p = OosProblem(WORKED_X, np.zeros(4), 0.0)
        y = np.array([0.3, -1.2])
        np.testing.assert_allclose(objective_gradient(p, y), 4 * WORKED_X.T @ WORKED_X @ y + 4 * (y @ y) * y)

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(REGIMES), st.integers(0, 2**32 - 1))
    def test_gradient_and_hessian_finite_differences(self, regime, seed):
        rng = np.random.default_rng(seed)
        p = random_problem(rng, regime)
        y = rng.standard_normal(p.d) * 2
        h = 1e-5 * (1 + np.linalg.norm(y))
        g = objective_gradient(p, y)
        g_fd = central_difference(lambda z: objective(p, z), y, h)
        assert np.linalg.norm(g - g_fd) <= 1e-5 * max(1.0, np.linalg.norm(g))
        H = objective_hessian(p, y)
        H_fd = np.column_stack([central_difference(lambda z: objective_gradient(p, z)[i], y, h) for i in range(p.d)])
        assert np.linalg.norm(H - H_fd) <= 1e-5 * max(1.0, np.linalg.norm(H))


class TestRidge:
    def test_zero_lambda_is_ols(self):
        rng = np.random.default_rng(0)
        X = random_configuration(rng, 7, 3)
        b = rng.standard_normal(7)
        p = OosProblem(X, b, 1.0)
        np.testing.assert_allclose(ridge_solve(p, 0.0).y, project_ols(X, b).y_hat, atol=1e-12)

    def test_shrinks_for_large_lambda(self):
        p = random_problem(np.random.default_rng(1), "above", d=2)
        norms = [np.linalg.norm(ridge_solve(p, lam).y) for lam in (0.0, 1e3, 1e6)]
        assert norms[0] > norms[1] > norms[2]

    def test_worked_example_vanishing_rhs(self):
        pt = ridge_solve(worked_problem(), -30.0)
        np.testing.assert_array_equal(pt.y, [0.0, 0.0])
        assert not pt.singular_flag

    def test_residual_invariant(self):
        rng = np.random.default_rng(2)
        p = random_problem(rng, "above", d=3)
        for lam in (-0.5 * p.X.T.dot(p.X).trace(), -0.1, 0.0, 2.5):
            pt = ridge_solve(p, lam, strict=False)
            if pt.singular_flag:
                continue
            r = (p.X.T @ p.X + lam * np.eye(3)) @ pt.y - p.X.T @ p.b
            assert np.linalg.norm(r) <= 1e-8 * (1 + np.linalg.norm(p.X.T @ p.b))

    def test_near_singular(self):
        p = worked_problem()
        with pytest.raises(NearSingular) as info:
            ridge_solve(p, -32.0)
        assert info.value.eigenvalue == pytest.approx(-32.0)
        pt = ridge_solve(p, -32.0, strict=False)
        assert pt.singular_flag and pt.y is None

    def test_rank_deficient(self):
        X = np.array([[1.0, 1.0], [-1.0, -1.0], [2.0, 2.0]])
        with pytest.raises(RankDeficientConfiguration):
            RidgeSystem(OosProblem(X, np.ones(3), 1.0))


class TestRHatSquared:
    def test_worked_example(self):
        assert r_hat_squared(worked_problem()) == 0.0

    def test_range_consistency(self):
        rng = np.random.default_rng(3)
        X = random_configuration(rng, 6, 2)
        z = rng.standard_normal(2)
        assert r_hat_squared(OosProblem(X, X @ z, 0.0)) == pytest.approx(z @ z, rel=1e-10)

    def test_matches_ols_norm(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            p = random_problem(rng, "above")
            y = project_ols(p.X, p.b).y_hat
            assert r_hat_squared(p) == pytest.approx(y @ y, rel=1e-10, abs=1e-14)


class TestSolveSingle:
    def test_worked_example(self):
        res = solve_single(worked_problem())
        np.testing.assert_allclose(res.y_star, [0.0, SQRT368], atol=1e-9)
        assert res.hard_case
        assert res.lambda_star == pytest.approx(-32.0, abs=1e-9)
        assert res.objective == pytest.approx(24576.0, rel=1e-12)
        assert res.diagnostics["regime"] == "beta>r_hat^2"

    def test_worked_example_from_data(self):
        # off-plane data: b = 20(1,1,-1,-1) is orthogonal to both axes, so the
        # minimizer is unchanged and the objective gains 2 ||b||^2 = 3200
        p = OosProblem.from_dissimilarities(WORKED_D2, WORKED_A2, 2)
        np.testing.assert_allclose(p.b, [20, 20, -20, -20], atol=1e-12)
        res = solve_single(p)
        np.testing.assert_allclose(res.y_star, [0.0, SQRT368], atol=1e-9)
        assert res.objective == pytest.approx(27776.0, rel=1e-12)

    def test_two_points(self):
        res = solve_single(OosProblem(np.array([[1.0], [-1.0]]), np.zeros(2), 81.0))
        assert res.y_star[0] == pytest.approx(np.sqrt(79.0), rel=1e-10)
        assert res.hard_case
        # independent check through the univariate quartic
        q = quartic_1d_roots(1.0, 0.0, 2 * 2 - 2 * 81.0, 0.0, 81.0**2)
        assert max(q.minimizers) == pytest.approx(np.sqrt(79.0), rel=1e-10)
        assert q.minimum == pytest.approx(res.objective, rel=1e-12)

    def test_constraint_inactive(self):
        p = random_problem(np.random.default_rng(5), "equal", d=2)
        res = solve_single(p)
        np.testing.assert_allclose(res.y_star, project_ols(p.X, p.b).y_hat, atol=1e-8 * (1 + np.sqrt(p.beta)))
        assert abs(res.lambda_star) <= 1e-8 * (1 + np.linalg.norm(p.X) ** 2)

    def test_objective_field_is_consistent(self):
        p = random_problem(np.random.default_rng(6), "hard", d=3)
        res = solve_single(p)
        assert res.objective == pytest.approx(objective(p, res.y_star), rel=1e-10)
        assert res.method == "restrict"

    def test_first_order_optimality(self):
        for seed in range(5):
            p = random_problem(np.random.default_rng(seed), REGIMES[seed % 4])
            res = solve_single(p)
            assert np.linalg.norm(objective_gradient(p, res.y_star)) <= 1e-6 * (1 + res.objective)

    def test_deterministic_sign_when_rhs_vanishes(self):
        X = random_configuration(np.random.default_rng(8), 6, 3)
        res = solve_single(OosProblem(X, np.zeros(6), 50.0 + np.linalg.norm(X) ** 2))
        first = res.y_star[np.flatnonzero(np.abs(res.y_star) > 1e-12 * np.abs(res.y_star).max())[0]]
        assert first > 0
        p = OosProblem(X, np.zeros(6), 50.0 + np.linalg.norm(X) ** 2)
        assert objective(p, -res.y_star) == pytest.approx(res.objective, rel=1e-14)

    def test_quartic_drop_gives_ols(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            p = random_problem(rng, "above")
            # gradient of the quadratic part alone is affine: recover it and solve exactly
            quad_grad = lambda y: objective_gradient(p, y) - 4 * (y @ y - p.beta) * y
            g0 = quad_grad(np.zeros(p.d))
            H = np.column_stack([quad_grad(e) - g0 for e in np.eye(p.d)])
            y = solve_full_pivot(H, -g0)
            np.testing.assert_allclose(y, project_ols(p.X, p.b).y_hat, atol=1e-10 * (1 + np.linalg.norm(y)))

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(REGIMES), st.integers(0, 2**32 - 1))
    def test_properties(self, regime, seed):
        p = random_problem(np.random.default_rng(seed), regime)
        res = solve_single(p)
        r2 = r_hat_squared(p)
        y0 = project_ols(p.X, p.b).y_hat
        assert res.objective <= objective(p, y0) + 1e-12
        n2 = res.y_star @ res.y_star
        if p.beta < r2:
            assert n2 <= r2 + 1e-8 * (1 + r2)
        elif p.beta > r2:
            assert n2 >= r2 - 1e-8 * (1 + r2)

    @settings(max_examples=15, deadline=None)
    @given(st.sampled_from(REGIMES), st.integers(1, 2), st.integers(0, 2**32 - 1))
    def test_never_loses_to_grid(self, regime, d, seed):
        p = random_problem(np.random.default_rng(seed), regime, d=d)
        _, value = grid_min(p)
        res = solve_single(p)
        assert res.objective <= value + 1e-9 * (1 + value)
