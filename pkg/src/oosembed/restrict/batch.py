"""Restricted reconstruction for k new objects at once.

Minimizes F(Y) = 2 ||X Y' - b||_F^2 + ||Y Y' - beta||_F^2 over Y (k x d) by
multi-start local descent. This is not certified global for k >= 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ..errors import DimensionMismatch, NonFiniteObjective
from ..project import check_full_rank
from ..proximity import CenteredOosData
from ..spectral import Configuration


@dataclass(frozen=True)
class BatchProblem:
    X: np.ndarray
    b: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        x = self.X.X if isinstance(self.X, Configuration) else np.asarray(self.X, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        b = np.asarray(self.b, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        beta = np.atleast_2d(np.asarray(self.beta, dtype=float))
        k = b.shape[1]
        if b.shape[0] != x.shape[0]:
            raise DimensionMismatch(f"b has {b.shape[0]} rows but X has {x.shape[0]}")
        if beta.shape != (k, k):
            raise DimensionMismatch(f"beta must be {k} x {k}, got {beta.shape}")
        if not np.allclose(beta, beta.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(beta).max())):
            raise DimensionMismatch("beta block must be symmetric")
        object.__setattr__(self, "X", x)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "beta", 0.5 * (beta + beta.T))

    @classmethod
    def from_centered(cls, X, data: CenteredOosData) -> "BatchProblem":
        return cls(X, data.b, data.beta)

    @property
    def k(self) -> int:
        return self.b.shape[1]

    @property
    def d(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class BatchResult:
    Y: np.ndarray
    objective: float
    grad_norm: float
    diagnostics: dict = field(default_factory=dict)


def _Y(bp: BatchProblem, Y) -> np.ndarray:
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1 and bp.k == 1:
        Y = Y[None, :]
    if Y.shape != (bp.k, bp.d):
        raise DimensionMismatch(f"Y must be {bp.k} x {bp.d}, got {Y.shape}")
    return Y


def batch_objective(bp: BatchProblem, Y) -> float:
    Y = _Y(bp, Y)
    r = bp.X @ Y.T - bp.b
    s = Y @ Y.T - bp.beta
    return float(2.0 * np.sum(r * r) + np.sum(s * s))


def batch_gradient(bp: BatchProblem, Y) -> np.ndarray:
    """4 [ (X Y' - b)' X + (Y Y' - beta) Y ]."""
    Y = _Y(bp, Y)
    return 4.0 * ((bp.X @ Y.T - bp.b).T @ bp.X + (Y @ Y.T - bp.beta) @ Y)


def batch_hessian(bp: BatchProblem, Y) -> np.ndarray:
    """Hessian over the row-major flattening of Y.

    Block (i, l) is 4 [S_il I + delta_il (Y'Y + X'X) + y_l y_i'] with
    S = Y Y' - beta.
    """
    Y = _Y(bp, Y)
    k, d = Y.shape
    S = Y @ Y.T - bp.beta
    H = 4.0 * np.kron(S, np.eye(d))
    H += 4.0 * np.kron(np.eye(k), Y.T @ Y + bp.X.T @ bp.X)
    # y_l y_i' in block (i, l)
    H += 4.0 * _outer_blocks(Y)
    return H


def _outer_blocks(Y: np.ndarray) -> np.ndarray:
    k, d = Y.shape
    out = np.zeros((k, d, k, d))
    for i in range(k):
        for l in range(k):
            out[i, :, l, :] = np.outer(Y[l], Y[i])
    return out.reshape(k * d, k * d)


def _newton_refine(bp: BatchProblem, Y: np.ndarray, max_iter: int = 20) -> np.ndarray:
    """Newton steps from a nearby local minimizer; keeps a step only if the gradient shrinks."""
    f = batch_objective(bp, Y)
    g = batch_gradient(bp, Y).ravel()
    for _ in range(max_iter):
        H = batch_hessian(bp, Y)
        w = np.linalg.eigvalsh(H)
        if w[0] <= 1e-12 * max(abs(w[-1]), 1.0):
            break
        Y_new = Y - np.linalg.solve(H, g).reshape(Y.shape)
        f_new = batch_objective(bp, Y_new)
        g_new = batch_gradient(bp, Y_new).ravel()
        if f_new > f + 1e-12 * (1.0 + abs(f)) or np.linalg.norm(g_new) >= np.linalg.norm(g):
            break
        Y, f, g = Y_new, f_new, g_new
    return Y


def _descend(bp: BatchProblem, Y0: np.ndarray, tol: float, max_iter: int):
    shape = Y0.shape

    def fun(v):
        Y = v.reshape(shape)
        return batch_objective(bp, Y), batch_gradient(bp, Y).ravel()

    v = Y0.ravel()
    nit = 0
    # BFGS stops on an absolute gradient norm, so restart with a rescaled
    # target until the relative first-order residual is met.
    for _ in range(5):
        f0 = fun(v)[0]
        res = minimize(fun, v, jac=True, method="BFGS",
                       options={"gtol": 0.1 * tol * (1.0 + f0), "maxiter": max_iter})
        v = res.x
        nit += res.nit
        f, g = fun(v)
        if np.linalg.norm(g) <= tol * (1.0 + f):
            break
        # BFGS loses curvature accuracy near the minimizer; finish with Newton
        v = _newton_refine(bp, v.reshape(shape)).ravel()
        f, g = fun(v)
        if np.linalg.norm(g) <= tol * (1.0 + f):
            break
    return v.reshape(shape), nit


def solve_batch(bp: BatchProblem, *, tol: float = 1e-9, max_iter: int = 2000, n_starts: int = 8, seed: int = 0) -> BatchResult:
    """Best local minimizer of the k-point objective over seeded starts.

    The first start places every new object at its projection solution; the
    remaining ``n_starts - 1`` add Gaussian perturbations scaled by the
    largest centered self-similarity.
    """
    X = bp.X
    check_full_rank(X)
    y_proj = np.linalg.solve(X.T @ X, X.T @ bp.b).T
    if not np.isfinite(batch_objective(bp, y_proj)):
        raise NonFiniteObjective("objective is not finite at the projection start")

    rng = np.random.default_rng(seed)
    scale = np.sqrt(max(float(np.max(np.abs(np.diag(bp.beta)))), float(np.mean(y_proj**2)), 1e-12) / bp.d)
    starts = [y_proj] + [y_proj + scale * rng.standard_normal(y_proj.shape) for _ in range(max(n_starts, 1) - 1)]

    best = None
    values = []
    total_iter = 0
    for i, Y0 in enumerate(starts):
        Y, nit = _descend(bp, Y0, tol, max_iter)
        total_iter += nit
        f = batch_objective(bp, Y)
        if not np.isfinite(f):
            raise NonFiniteObjective(f"objective diverged from start {i}")
        values.append(f)
        if best is None or f < best[1]:
            best = (Y, f, i)

    Y, f, idx = best
    g = float(np.linalg.norm(batch_gradient(bp, Y)))
    return BatchResult(
        Y=Y,
        objective=f,
        grad_norm=g,
        diagnostics={
            "best_start": idx,
            "start_objectives": values,
            "iterations": total_iter,
            "first_order_ok": g <= tol * (1.0 + f),
            "seed": seed,
        },
    )
