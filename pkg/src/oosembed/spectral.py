"""Symmetric eigendecomposition, rank-d truncation and the CMDS configuration."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceFailure, InsufficientPositiveSpectrum, NonSquare
from .proximity import double_center

JACOBI_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 100
# "auto" switches to LAPACK above this size; rotations are O(n^3) Python-level work per sweep.
JACOBI_MAX_N = 150
POSITIVE_RTOL = 1e-10
DEGENERATE_RTOL = 1e-9


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues sorted descending, eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0
    residual: float = 0.0


@dataclass(frozen=True)
class TruncatedGram:
    """Top-d positive part of a symmetric matrix, B_bar = U_d diag(top_eigenvalues) U_d'."""

    d: int
    top_eigenvalues: np.ndarray
    top_vectors: np.ndarray
    dropped_eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0))
    degenerate_spectrum: bool = False

    @property
    def singular_values(self) -> np.ndarray:
        """Square roots of the retained eigenvalues (the diagonal of Sigma_d)."""
        return np.sqrt(self.top_eigenvalues)

    def matrix(self) -> np.ndarray:
        u = self.top_vectors
        return (u * self.top_eigenvalues) @ u.T

    def configuration(self) -> "Configuration":
        return Configuration(self.top_vectors * self.singular_values)


@dataclass(frozen=True)
class Configuration:
    """n x d coordinate matrix of the in-sample embedding."""

    X: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.X, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        object.__setattr__(self, "X", x)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


def canonical_column_signs(v: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive.

    Entries within a relative 1e-9 of the column maximum count as ties, and the
    lowest row index wins, so roundoff cannot flip the choice.
    """
    v = np.array(v, dtype=float, copy=True)
    for j in range(v.shape[1]):
        col = np.abs(v[:, j])
        top = col.max() if col.size else 0.0
        if top == 0.0:
            continue
        i = int(np.flatnonzero(col >= top * (1.0 - 1e-9))[0])
        if v[i, j] < 0:
            v[:, j] = -v[:, j]
    return v


def _jacobi(a: np.ndarray, rtol: float, max_sweeps: int):
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    scale = np.linalg.norm(a)
    target = rtol * scale

    def off(m):
        return np.linalg.norm(m - np.diag(np.diag(m)))

    residual = off(a)
    sweeps = 0
    while residual > target:
        if sweeps >= max_sweeps:
            raise ConvergenceFailure(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {residual:.3e})",
                residual=residual,
                iterations=sweeps,
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(diff) > 1e150 * abs(apq):
                    # rotation angle below roundoff: t ~ apq / diff
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        residual = off(a)
    return np.diag(a).copy(), v, sweeps, residual


def symmetric_eigen(B, *, method: str = "auto", rtol: float = JACOBI_RTOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenSystem:
    """Eigendecomposition of a symmetric matrix.

    ``method="jacobi"`` runs cyclic-by-row Jacobi rotations until the
    off-diagonal Frobenius norm drops below ``rtol * ||B||_F``.
    ``method="lapack"`` delegates to ``numpy.linalg.eigh``; ``"auto"`` picks
    Jacobi up to ``JACOBI_MAX_N`` rows and LAPACK beyond.
    Both return eigenvalues in descending order with sign-canonical vectors.
    """
    b = np.asarray(B, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {b.shape}")
    b = 0.5 * (b + b.T)
    if method == "auto":
        method = "jacobi" if b.shape[0] <= JACOBI_MAX_N else "lapack"
    if method == "jacobi":
        w, v, sweeps, residual = _jacobi(b, rtol, max_sweeps)
    elif method == "lapack":
        w, v = np.linalg.eigh(b)
        sweeps, residual = 0, 0.0
    else:
        raise ValueError(f"unknown eigen method {method!r}")
    order = np.argsort(-w, kind="stable")
    return EigenSystem(w[order], canonical_column_signs(v[:, order]), sweeps, residual)


def truncate_psd(es: EigenSystem, d: int) -> TruncatedGram:
    """Keep the d largest eigenpairs, all of which must be strictly positive."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    lam = es.eigenvalues
    scale = np.max(np.abs(lam)) if lam.size else 0.0
    n_pos = int(np.sum(lam > POSITIVE_RTOL * scale))
    if n_pos < d:
        raise InsufficientPositiveSpectrum(
            f"only {n_pos} positive eigenvalue(s) for requested d = {d}; use a smaller d",
            n_positive=n_pos,
            requested=d,
        )
    degenerate = bool(
        lam.size > d and abs(lam[d - 1] - lam[d]) <= DEGENERATE_RTOL * max(abs(lam[d - 1]), 1e-300)
    )
    return TruncatedGram(
        d=d,
        top_eigenvalues=lam[:d].copy(),
        top_vectors=es.eigenvectors[:, :d].copy(),
        dropped_eigenvalues=lam[d:].copy(),
        degenerate_spectrum=degenerate,
    )


def cmds_embed(delta2, d: int, *, method: str = "auto") -> tuple[Configuration, TruncatedGram]:
    """Classical MDS: double-center, eigendecompose, truncate, X = U_d Sigma_d."""
    tg = truncate_psd(symmetric_eigen(double_center(delta2), method=method), d)
    return tg.configuration(), tg
