"""Acceptance suite: one test per criterion, each at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py`` (or execute this file);
the terminal summary lists PASS/FAIL per criterion.
"""

import time

import numpy as np
import pytest

from _instances import (
    SQRT368,
    WORKED_A2,
    WORKED_D2,
    WORKED_X,
    euclidean_instance,
    random_configuration,
    random_problem,
    worked_problem,
)
from oosembed.oracle import grid_min, pca_hyperplane_demo, solve_full_pivot, stress_grid_min
from oosembed.project import project_all, project_ols
from oosembed.proximity import augment, beta_shortcut, dissim_to_centered_sim, tau_w
from oosembed.restrict import (
    BatchProblem,
    batch_gradient,
    batch_objective,
    objective,
    objective_gradient,
    solve_batch,
    solve_single,
    stress_oos,
)
from oosembed.spectral import cmds_embed, symmetric_eigen, truncate_psd

criterion = pytest.mark.criterion


def _best_time(fn, repeats=5):
    fn()
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


@criterion(1, "worked four-point configuration by classical MDS")
def test_criterion_01_worked_configuration():
    conf, _ = cmds_embed(WORKED_D2, 2)
    X = conf.X * np.sign(conf.X[np.argmax(np.abs(conf.X), axis=0), range(2)])
    ref = WORKED_X * np.sign(WORKED_X[np.argmax(np.abs(WORKED_X), axis=0), range(2)])
    assert np.abs(X - ref).max() <= 1e-8
    assert _best_time(lambda: cmds_embed(WORKED_D2, 2)) < 0.010


@criterion(2, "worked example centering: b = 0 and beta = 400")
def test_criterion_02_worked_centering():
    b, beta = dissim_to_centered_sim(WORKED_D2, WORKED_A2)
    data = tau_w(augment(WORKED_D2, WORKED_A2), 4)
    assert beta == pytest.approx(400.0, abs=1e-8)
    assert data.beta_scalar == pytest.approx(400.0, abs=1e-8)
    assert beta_shortcut(WORKED_D2, WORKED_A2) == pytest.approx(beta, abs=1e-8)
    # stated requirement; the data give b = 20(1,1,-1,-1)
    assert np.linalg.norm(data.b_vector) <= 1e-8, f"||b|| = {np.linalg.norm(data.b_vector)}"
    assert np.linalg.norm(b) <= 1e-8, f"||b|| = {np.linalg.norm(b)}"


@criterion(3, "worked example projection: three formulas at the origin")
def test_criterion_03_worked_projection():
    conf, tg = cmds_embed(WORKED_D2, 2)
    results, gap = project_all(conf, tg, WORKED_D2, WORKED_A2)
    for r in results.values():
        assert np.abs(r.y_hat).max() <= 1e-8
    assert gap <= 1e-8


@criterion(4, "worked example restricted reconstruction (hard case)")
def test_criterion_04_worked_restricted():
    p = worked_problem()
    res = solve_single(p)
    norm = np.linalg.norm(res.y_star)
    assert abs(norm - SQRT368) <= 1e-6 * SQRT368
    assert abs(res.y_star[0]) <= 1e-6 * norm
    assert res.hard_case
    assert abs(res.lambda_star + 32.0) <= 1e-6
    assert abs(res.objective - 24576.0) <= 1e-6 * 24576.0
    _, grid_value = grid_min(p)
    assert res.objective <= grid_value + 1e-9


@criterion(5, "hyperplane characterization demo")
def test_criterion_05_hyperplane_demo():
    demo = pca_hyperplane_demo()
    assert abs(demo.cos_theta_star - 1 / 27) <= 1e-10
    assert any(pt.theta == 0.0 and pt.y == 0.0 for pt in demo.saddles)
    outs = sorted(pt.y_out for pt in demo.minimizers)
    assert len(outs) == 2
    assert abs(outs[0] + 8.9938) <= 1e-3 and abs(outs[1] - 8.9938) <= 1e-3


@criterion(6, "projection formulas agree on 100 random instances")
def test_criterion_06_projection_equivalence():
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(4, 21))
        d = int(rng.integers(1, min(4, n - 1) + 1))
        D2, a2, _ = euclidean_instance(rng, n, min(d + 2, n - 1))
        conf, tg = cmds_embed(D2, d)
        results, gap = project_all(conf, tg, D2, a2[:, 0])
        worst = max(worst, gap / (1 + np.linalg.norm(results["ols"].y_hat)))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-8
    assert elapsed < 5.0


@criterion(7, "restricted solver never loses to the grid oracle")
def test_criterion_07_global_optimality():
    rng = np.random.default_rng(7)
    regimes = ["below", "equal", "above", "hard"]
    t0 = time.perf_counter()
    seen = set()
    for i in range(100):
        regime = regimes[i % 4]
        p = random_problem(rng, regime, d=1 + (i // 4) % 3)
        res = solve_single(p)
        _, value = grid_min(p)
        assert res.objective <= value + 1e-6 * (1 + value), (i, regime, res.objective, value)
        seen.add((regime, res.hard_case))
    elapsed = time.perf_counter() - t0
    assert ("hard", True) in seen
    assert elapsed < 60.0


@criterion(8, "truncated spectrum is the best rank-d PSD fit")
def test_criterion_08_best_psd_fit():
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    for _ in range(10):
        n = int(rng.integers(4, 12))
        d = int(rng.integers(1, 4))
        A = rng.standard_normal((n, n))
        B = A + A.T + (d + 1) * np.eye(n)
        tg = truncate_psd(symmetric_eigen(B), d)
        best = np.linalg.norm(tg.matrix() - B)
        for _ in range(200):
            Z = rng.standard_normal((n, d)) * rng.uniform(0.1, 3.0)
            assert best <= np.linalg.norm(Z @ Z.T - B) + 1e-9
    assert time.perf_counter() - t0 < 5.0


@criterion(9, "dropping the quartic term leaves ordinary least squares")
def test_criterion_09_quartic_drop():
    rng = np.random.default_rng(9)
    regimes = ["below", "equal", "above", "hard"]
    for i in range(50):
        p = random_problem(rng, regimes[i % 4])

        def quad_grad(y):
            return objective_gradient(p, y) - 4 * (y @ y - p.beta) * y

        g0 = quad_grad(np.zeros(p.d))
        H = np.column_stack([quad_grad(e) - g0 for e in np.eye(p.d)])
        y = solve_full_pivot(H, -g0)
        assert np.linalg.norm(y - project_ols(p.X, p.b).y_hat) <= 1e-10 * (1 + np.linalg.norm(y))


def _central(f, Y, h):
    G = np.zeros_like(Y)
    for idx in np.ndindex(*Y.shape):
        E = np.zeros_like(Y)
        E[idx] = h
        G[idx] = (f(Y + E) - f(Y - E)) / (2 * h)
    return G


@criterion(10, "analytic gradients match central differences")
def test_criterion_10_gradients():
    rng = np.random.default_rng(10)
    regimes = ["below", "equal", "above", "hard"]
    for i in range(50):
        p = random_problem(rng, regimes[i % 4])
        y = rng.standard_normal(p.d) * 2
        g = objective_gradient(p, y)
        g_fd = _central(lambda z: objective(p, z), y, 1e-5 * (1 + np.linalg.norm(y)))
        assert np.linalg.norm(g - g_fd) <= 1e-5 * max(1.0, np.linalg.norm(g))
    for _ in range(50):
        k = int(rng.integers(1, 5))
        n, d = int(rng.integers(4, 10)), int(rng.integers(1, 4))
        A = rng.standard_normal((k, k))
        bp = BatchProblem(random_configuration(rng, n, d), rng.standard_normal((n, k)), A @ A.T)
        Y = rng.standard_normal((k, d))
        G = batch_gradient(bp, Y)
        G_fd = _central(lambda Z: batch_objective(bp, Z), Y, 1e-5 * (1 + np.linalg.norm(Y)))
        assert np.linalg.norm(G - G_fd) <= 1e-5 * max(1.0, np.linalg.norm(G))


@criterion(11, "batch solver: single-column consistency and two-point recovery")
def test_criterion_11_batch():
    rng = np.random.default_rng(11)
    regimes = ["below", "equal", "above", "hard"]
    for i in range(50):
        p = random_problem(rng, regimes[i % 4])
        ref = solve_single(p).objective
        got = solve_batch(BatchProblem(p.X, p.b, [[p.beta]])).objective
        assert abs(got - ref) <= 1e-8 * max(1.0, abs(ref)), (i, got, ref)

    alpha2 = (2 * SQRT368) ** 2
    a2 = np.column_stack([WORKED_A2, WORKED_A2])
    data = tau_w(augment(WORKED_D2, a2, np.array([[0.0, alpha2], [alpha2, 0.0]])), 4)
    res = solve_batch(BatchProblem.from_centered(WORKED_X, data))
    target = np.array([[0.0, SQRT368], [0.0, -SQRT368]])
    candidates = [s * target[perm] for s in (1, -1) for perm in ([0, 1], [1, 0])]
    err = min(np.abs(res.Y - c).max() for c in candidates)
    assert err <= 1e-4, f"recovered {res.Y.tolist()}, distance {err:.4g}"


@criterion(12, "raw-stress placement")
def test_criterion_12_stress():
    fixed = [
        (np.array([[0.0], [2.0]]), np.array([1.0, 1.0])),
    ]
    Xd = random_configuration(np.random.default_rng(0), 6, 2)
    fixed += [(Xd, np.linalg.norm(Xd - Xd[j], axis=1)) for j in (0, 4)]
    for X, deltas in fixed:
        res = stress_oos(X, deltas)
        assert res.objective <= 1e-12
        assert res.diagnostics["monotone"]
    rng = np.random.default_rng(12)
    for _ in range(5):
        X = random_configuration(rng, 7, 2)
        deltas = rng.uniform(0.5, 3.0, size=7)
        res = stress_oos(X, deltas)
        _, value = stress_grid_min(X, deltas)
        assert abs(res.objective - value) <= 1e-4
        h = np.asarray(res.diagnostics["history"])
        assert res.diagnostics["monotone"] and np.all(np.diff(h) <= 1e-12 * (1 + h[:-1]))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
