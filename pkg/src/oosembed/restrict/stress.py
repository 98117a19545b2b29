"""Out-of-sample placement under Kruskal's raw stress.

With x_1..x_n fixed, the new point minimizes sum_i (||y - x_i|| - delta_i)^2.
The single-point Guttman transform

    y <- mean(x) + (1/n) sum_i delta_i (y - x_i) / ||y - x_i||

is a majorization step, so stress never increases along the iterates.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch, NegativeEntry
from ..spectral import Configuration
from .problem import EmbeddingResult


def stress_value(X, deltas, y) -> float:
    X, deltas = _inputs(X, deltas)
    dist = np.linalg.norm(np.asarray(y, dtype=float)[None, :] - X, axis=1)
    return float(np.sum((dist - deltas) ** 2))


def _inputs(X, deltas):
    x = X.X if isinstance(X, Configuration) else np.asarray(X, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    deltas = np.asarray(deltas, dtype=float).reshape(-1)
    if deltas.shape[0] != x.shape[0]:
        raise DimensionMismatch(f"{deltas.shape[0]} dissimilarities for {x.shape[0]} points")
    if np.any(deltas < 0):
        raise NegativeEntry("dissimilarities must be nonnegative")
    return x, deltas


def _triangulate(x: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """Projection start from the configuration's own distances; centroid if X is degenerate."""
    center = x.mean(axis=0)
    xc = x - center
    gram = xc.T @ xc
    s = np.linalg.svd(xc, compute_uv=False)
    if s.size == 0 or s[-1] <= 1e-10 * max(s[0], 1e-300):
        return center
    d2 = np.sum((xc[:, None, :] - xc[None, :, :]) ** 2, axis=2)
    rhs = -0.5 * (deltas**2 - d2.mean(axis=1))
    return center + np.linalg.solve(gram, xc.T @ rhs)


def _majorize(x, deltas, y, rng, max_iter, tol, scale):
    n = x.shape[0]
    centroid = x.mean(axis=0)
    history = [stress_value(x, deltas, y)]
    coincident = 0
    for it in range(1, max_iter + 1):
        diff = y[None, :] - x
        dist = np.linalg.norm(diff, axis=1)
        hit = (dist == 0.0) & (deltas > 0.0)
        if np.any(hit):
            # the majorizer has no unique direction at x_i; nudge off it
            coincident += 1
            y = y + 1e-8 * scale * rng.standard_normal(y.shape)
            diff = y[None, :] - x
            dist = np.linalg.norm(diff, axis=1)
            history[-1] = stress_value(x, deltas, y)
        w = np.divide(deltas, dist, out=np.zeros(n), where=dist > 0.0)
        y_new = centroid + (w[:, None] * diff).sum(axis=0) / n
        history.append(stress_value(x, deltas, y_new))
        step = np.linalg.norm(y_new - y)
        y = y_new
        if step <= tol * (1.0 + scale) or history[-1] <= 1e-30:
            break
    return y, history, it, coincident


def stress_oos(X, deltas, *, max_iter: int = 20000, tol: float = 1e-13, n_starts: int = 16, seed: int = 0) -> EmbeddingResult:
    """Raw-stress restricted reconstruction for one new object.

    Parameters
    ----------
    X : (n, d) configuration
    deltas : (n,) unsquared dissimilarities from the new object
    max_iter, tol : per-start iteration cap and step-size tolerance
        (relative to the configuration scale)
    n_starts, seed : the first start is the triangulated projection; the rest
        are seeded Gaussian perturbations around the centroid

    Returns
    -------
    EmbeddingResult
        ``objective`` is the raw stress. ``diagnostics["monotone"]`` reports
        whether every start decreased stress at every step (up to roundoff).
    """
    x, deltas = _inputs(X, deltas)
    rng = np.random.default_rng(seed)
    spread = float(np.sqrt(np.mean(np.sum((x - x.mean(axis=0)) ** 2, axis=1))))
    scale = max(spread, float(deltas.max()) if deltas.size else 0.0, 1e-12)

    starts = [_triangulate(x, deltas)]
    for _ in range(max(n_starts, 1) - 1):
        starts.append(x.mean(axis=0) + scale * rng.standard_normal(x.shape[1]))

    best = None
    monotone = True
    coincident = 0
    iterations = 0
    for i, y0 in enumerate(starts):
        y, hist, it, hits = _majorize(x, deltas, y0.astype(float), rng, max_iter, tol, scale)
        h = np.asarray(hist)
        if np.any(np.diff(h) > 1e-12 * (1.0 + h[:-1])):
            monotone = False
        coincident += hits
        iterations += it
        if best is None or h[-1] < best[1]:
            best = (y, float(h[-1]), i, hist)

    y, value, idx, hist = best
    return EmbeddingResult(
        y_star=y,
        objective=stress_value(x, deltas, y),
        method="stress",
        diagnostics={
            "monotone": monotone,
            "coincident_hits": coincident,
            "iterations": iterations,
            "best_start": idx,
            "history": hist,
            "seed": seed,
        },
    )
