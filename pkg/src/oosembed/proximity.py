"""Validation of proximity matrices and the centering maps that produce (B, b, beta).

Dissimilarities enter the solvers only through their entrywise squares. A
:class:`DissimilarityMatrix` remembers whether the stored values are already
squared so that no information is lost to a sqrt/square round trip.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricBeyondTolerance,
    DimensionMismatch,
    InvalidSimilarity,
    NegativeEntry,
    NonSquare,
    NonzeroDiagonal,
    SimilarityWarning,
)

SYMMETRY_ATOL = 1e-12


@dataclass(frozen=True)
class DissimilarityMatrix:
    """Symmetric, nonnegative, zero-diagonal n x n matrix.

    Parameters
    ----------
    values : (n, n) ndarray
        Stored entries, either delta_ij or delta_ij**2.
    squared : bool
        True when ``values`` already holds squared dissimilarities.
    """

    values: np.ndarray
    squared: bool = False

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def delta2(self) -> np.ndarray:
        """Entrywise-squared dissimilarities."""
        return self.values if self.squared else self.values**2

    @property
    def delta(self) -> np.ndarray:
        """Unsquared dissimilarities."""
        return np.sqrt(self.values) if self.squared else self.values


@dataclass(frozen=True)
class SimilarityMatrix:
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class CenteredOosData:
    """Blocks of the centered augmented matrix [[B, b], [b', beta]].

    ``b`` is n x k and ``beta`` is k x k; for a single new point use
    :attr:`b_vector` and :attr:`beta_scalar`.
    """

    B: np.ndarray
    b: np.ndarray
    beta: np.ndarray

    @property
    def k(self) -> int:
        return self.beta.shape[0]

    @property
    def b_vector(self) -> np.ndarray:
        if self.k != 1:
            raise DimensionMismatch(f"b_vector needs k == 1, have k = {self.k}")
        return self.b[:, 0]

    @property
    def beta_scalar(self) -> float:
        if self.k != 1:
            raise DimensionMismatch(f"beta_scalar needs k == 1, have k = {self.k}")
        return float(self.beta[0, 0])


def _square_array(raw, name="matrix") -> np.ndarray:
    a = np.array(raw, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquare(f"{name} must be square, got shape {a.shape}")
    return a


def _symmetrize(a: np.ndarray, atol: float, name: str) -> np.ndarray:
    if a.size:
        gap = np.max(np.abs(a - a.T))
        if gap > atol:
            i, j = np.unravel_index(np.argmax(np.abs(a - a.T)), a.shape)
            raise AsymmetricBeyondTolerance(
                f"{name} is not symmetric: |a[{i},{j}] - a[{j},{i}]| = {gap:.3g} > {atol:g}"
            )
    return 0.5 * (a + a.T)


def validate_dissimilarity(raw, *, squared: bool = False, atol: float = SYMMETRY_ATOL) -> DissimilarityMatrix:
    """Check a raw matrix against the dissimilarity axioms and wrap it.

    Symmetry is enforced within ``atol`` and then imposed exactly as
    ``(A + A') / 2``.
    """
    if isinstance(raw, DissimilarityMatrix):
        return raw
    a = _square_array(raw, "dissimilarity matrix")
    if not np.all(np.isfinite(a)):
        raise NegativeEntry("dissimilarity matrix has non-finite entries")
    a = _symmetrize(a, atol, "dissimilarity matrix")
    if np.any(a < 0):
        i, j = np.argwhere(a < 0)[0]
        raise NegativeEntry(f"negative dissimilarity at ({i},{j}): {a[i, j]:g}")
    diag = np.abs(np.diag(a))
    if np.any(diag > atol):
        i = int(np.argmax(diag))
        raise NonzeroDiagonal(f"diagonal entry ({i},{i}) is {a[i, i]:g}, expected 0")
    np.fill_diagonal(a, 0.0)
    return DissimilarityMatrix(a, squared=squared)


def validate_similarity(raw, *, strict: bool = False, atol: float = SYMMETRY_ATOL) -> SimilarityMatrix:
    """Wrap a symmetric similarity matrix.

    Entries violating ``0 <= gamma_ij <= gamma_ii`` produce a
    :class:`SimilarityWarning`, or :class:`InvalidSimilarity` when ``strict``.
    Projection through a truncated Gram matrix tolerates such data, hence the
    lenient default.
    """
    if isinstance(raw, SimilarityMatrix):
        return raw
    g = _symmetrize(_square_array(raw, "similarity matrix"), atol, "similarity matrix")
    diag = np.diag(g)
    bad = (g < -atol) | (g > np.minimum.outer(diag, diag) + atol)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        msg = f"similarity ({i},{j}) = {g[i, j]:g} violates 0 <= gamma_ij <= gamma_ii"
        if strict:
            raise InvalidSimilarity(msg)
        warnings.warn(msg, SimilarityWarning, stacklevel=2)
    return SimilarityMatrix(g)


def _as_delta2(delta2) -> np.ndarray:
    # Bare arrays are taken to be squared dissimilarities.
    if isinstance(delta2, DissimilarityMatrix):
        return delta2.delta2
    return validate_dissimilarity(delta2, squared=True).delta2


def _as_gamma(gamma) -> np.ndarray:
    if isinstance(gamma, SimilarityMatrix):
        return gamma.values
    return validate_similarity(gamma).values


def _center(a: np.ndarray) -> np.ndarray:
    # P A P with P = I - ee'/n, without forming P.
    a = a - a.mean(axis=0, keepdims=True)
    a = a - a.mean(axis=1, keepdims=True)
    return 0.5 * (a + a.T)


def double_center(delta2) -> np.ndarray:
    """Return B = -1/2 P Delta2 P, the CMDS inner-product matrix."""
    return _center(-0.5 * _as_delta2(delta2))


def center_similarity(gamma) -> np.ndarray:
    """Return P Gamma P."""
    return _center(_as_gamma(gamma))


def _vector(v, n: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise DimensionMismatch(f"{name} must have shape ({n},), got {v.shape}")
    return v


def dissim_to_centered_sim(delta2, new_sq_dissims, new_self_sq: float = 0.0) -> tuple[np.ndarray, float]:
    """Centered cross-similarities ``b`` and self-similarity ``beta`` of a new object.

    Parameters
    ----------
    delta2 : DissimilarityMatrix or (n, n) array of squared dissimilarities
    new_sq_dissims : (n,) array
        Squared dissimilarities from the new object to the n originals.
    new_self_sq : float
        Squared self-dissimilarity of the new object, normally 0.
    """
    d2 = _as_delta2(delta2)
    a2 = _vector(new_sq_dissims, d2.shape[0], "new_sq_dissims")
    grand = d2.mean()
    a_mean = a2.mean()
    b = -0.5 * (a2 - d2.mean(axis=1) - a_mean + grand)
    beta = -0.5 * (float(new_self_sq) - 2.0 * a_mean + grand)
    return b, float(beta)


def gamma_tilde_oos(gamma_in, g_new, g_self: float) -> tuple[np.ndarray, float]:
    """Center the similarities of a new object with respect to the originals."""
    g = _as_gamma(gamma_in)
    gn = _vector(g_new, g.shape[0], "g_new")
    grand = g.mean()
    b = gn - g.mean(axis=1) - gn.mean() + grand
    beta = float(g_self) - 2.0 * gn.mean() + grand
    return b, float(beta)


def beta_shortcut(delta2, a2_col) -> float:
    """beta as mean(a2) - mean(Delta2)/2 for a single new point."""
    d2 = _as_delta2(delta2)
    a2 = _vector(a2_col, d2.shape[0], "a2_col")
    return float(a2.mean() - 0.5 * d2.mean())


def augment(delta2, a2, alpha2=None) -> np.ndarray:
    """Assemble A2 = [[Delta2, a2], [a2', alpha2]] for k new objects."""
    d2 = _as_delta2(delta2)
    n = d2.shape[0]
    a2 = np.asarray(a2, dtype=float)
    if a2.ndim == 1:
        a2 = a2[:, None]
    if a2.shape[0] != n:
        raise DimensionMismatch(f"a2 must have {n} rows, got {a2.shape[0]}")
    k = a2.shape[1]
    if alpha2 is None:
        if k != 1:
            raise DimensionMismatch("alpha2 is required when k > 1")
        alpha2 = np.zeros((1, 1))
    alpha2 = np.atleast_2d(np.asarray(alpha2, dtype=float))
    if alpha2.shape != (k, k):
        raise DimensionMismatch(f"alpha2 must be {k} x {k}, got {alpha2.shape}")
    alpha2 = validate_dissimilarity(alpha2, squared=True).values
    if np.any(a2 < 0):
        raise NegativeEntry("a2 has negative entries")
    return np.block([[d2, a2], [a2.T, alpha2]])


def tau_w(A2, n: int) -> CenteredOosData:
    """Weighted double centering anchored at the first ``n`` objects.

    Computes -1/2 (I - e w') A2 (I - w e') with w = (1, ..., 1, 0, ..., 0)/n,
    so the leading n x n block coincides with ``double_center`` of the
    original squared dissimilarities.
    """
    a = _square_array(A2, "A2")
    m = a.shape[0]
    k = m - int(n)
    if n < 1 or k < 1:
        raise DimensionMismatch(f"need 1 <= n < {m} so that k >= 1, got n = {n}")
    a = _symmetrize(a, SYMMETRY_ATOL * max(1.0, np.abs(a).max()), "A2")
    w = np.zeros(m)
    w[:n] = 1.0 / n
    aw = a @ w
    waw = w @ aw
    t = -0.5 * (a - aw[None, :] - aw[:, None] + waw)
    t = 0.5 * (t + t.T)
    return CenteredOosData(B=t[:n, :n], b=t[:n, n:], beta=t[n:, n:])
