"""Out-of-sample embedding by projection onto the fixed representation space.

Three algebraically equivalent routes are provided so they can be checked
against one another: the kernel-PCA spectral formula, the least-squares
normal equations, and Landmark-MDS distance-based triangulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, RankDeficientConfiguration, ZeroSingularValue
from .proximity import _as_delta2, dissim_to_centered_sim
from .spectral import Configuration, TruncatedGram

SIGMA_RTOL = 1e-12
RANK_RTOL = 1e-10

FORMULAS = ("spectral", "ols", "landmark")


@dataclass(frozen=True)
class ProjectionResult:
    y_hat: np.ndarray
    formula_tag: str
    residual_norm: float


def _as_matrix(X) -> np.ndarray:
    if isinstance(X, Configuration):
        return X.X
    x = np.asarray(X, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def _check_b(b, n: int) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.shape != (n,):
        raise DimensionMismatch(f"b must have shape ({n},), got {b.shape}")
    return b


def _spectral_pinv(tg: TruncatedGram) -> np.ndarray:
    # L# = Sigma_d^{-1} U_d'
    sigma = tg.singular_values
    if sigma[-1] < SIGMA_RTOL * sigma[0]:
        raise ZeroSingularValue(f"sigma_d = {sigma[-1]:.3e} is negligible relative to sigma_1 = {sigma[0]:.3e}")
    return tg.top_vectors.T / sigma[:, None]


def check_full_rank(X) -> np.ndarray:
    """Return the singular values of X, raising if X is numerically rank deficient."""
    x = _as_matrix(X)
    s = np.linalg.svd(x, compute_uv=False)
    if s.size == 0 or s[-1] <= RANK_RTOL * s[0]:
        smallest = s[-1] if s.size else 0.0
        raise RankDeficientConfiguration(
            f"configuration is rank deficient (sigma_min = {smallest:.3e}); use a smaller dimension"
        )
    return s


def project_spectral(tg: TruncatedGram, b) -> ProjectionResult:
    """y_hat = Sigma_d^{-1} U_d' b."""
    b = _check_b(b, tg.top_vectors.shape[0])
    y = _spectral_pinv(tg) @ b
    x = tg.top_vectors * tg.singular_values
    return ProjectionResult(y, "spectral", float(np.linalg.norm(x @ y - b)))


def project_ols(X, b) -> ProjectionResult:
    """Solve the normal equations X'X y = X'b."""
    x = _as_matrix(X)
    b = _check_b(b, x.shape[0])
    check_full_rank(x)
    y = np.linalg.solve(x.T @ x, x.T @ b)
    return ProjectionResult(y, "ols", float(np.linalg.norm(x @ y - b)))


def project_landmark(X, tg: TruncatedGram, delta2, a2_col) -> ProjectionResult:
    """Distance-based triangulation y = -1/2 L# (a2 - Delta2 e / n).

    ``residual_norm`` is measured against the centered ``b`` implied by the
    same squared dissimilarities, so it is comparable with the other formulas.
    """
    x = _as_matrix(X)
    d2 = _as_delta2(delta2)
    n = d2.shape[0]
    if x.shape[0] != n or tg.top_vectors.shape[0] != n:
        raise DimensionMismatch("configuration, truncated Gram and Delta2 disagree on n")
    a2 = _check_b(a2_col, n)
    y = -0.5 * (_spectral_pinv(tg) @ (a2 - d2.mean(axis=1)))
    b, _ = dissim_to_centered_sim(d2, a2)
    return ProjectionResult(y, "landmark", float(np.linalg.norm(x @ y - b)))


def project_all(X, tg: TruncatedGram, delta2, a2_col) -> tuple[dict[str, ProjectionResult], float]:
    """Run all three formulas for one new object and report their max pairwise gap."""
    b, _ = dissim_to_centered_sim(delta2, a2_col)
    results = {
        "spectral": project_spectral(tg, b),
        "ols": project_ols(X, b),
        "landmark": project_landmark(X, tg, delta2, a2_col),
    }
    ys = [r.y_hat for r in results.values()]
    gap = max(float(np.max(np.abs(u - v))) for i, u in enumerate(ys) for v in ys[i + 1:])
    return results, gap
