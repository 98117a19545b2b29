"""The restricted-reconstruction objective and its ridge parametrization.

For a fixed configuration X, centered cross-similarities b and centered
self-similarity beta, the new point y minimizes

    F(y) = 2 ||X y - b||^2 + (y'y - beta)^2.

Every stationary point satisfies (X'X + lam I) y = X'b with lam = y'y - beta,
so the search runs over the scalar lam using the thin SVD X = U1 S V'.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, NearSingular, RankDeficientConfiguration
from ..project import RANK_RTOL
from ..proximity import dissim_to_centered_sim
from ..spectral import Configuration, cmds_embed

GUARD_RTOL = 1e-9
HARD_RTOL = 1e-10
HARD_ATOL = 1e-12


@dataclass(frozen=True)
class OosProblem:
    """Fixed configuration ``X`` (n x d), vector ``b`` (n,), scalar ``beta``."""

    X: np.ndarray
    b: np.ndarray
    beta: float

    def __post_init__(self):
        x = self.X.X if isinstance(self.X, Configuration) else np.asarray(self.X, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if b.shape[0] != x.shape[0]:
            raise DimensionMismatch(f"b has length {b.shape[0]} but X has {x.shape[0]} rows")
        beta = float(self.beta)
        if not np.isfinite(beta):
            raise DimensionMismatch("beta must be finite")
        object.__setattr__(self, "X", x)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "beta", beta)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @classmethod
    def from_dissimilarities(cls, delta2, a2_col, d: int, *, method: str = "auto") -> "OosProblem":
        """Build the problem from in-sample squared dissimilarities and one new column."""
        conf, _ = cmds_embed(delta2, d, method=method)
        b, beta = dissim_to_centered_sim(delta2, a2_col)
        return cls(conf.X, b, beta)


@dataclass(frozen=True)
class RidgePoint:
    lam: float
    y: np.ndarray | None
    phi: float
    singular_flag: bool = False


@dataclass(frozen=True)
class EmbeddingResult:
    """Outcome of an out-of-sample solve.

    ``objective`` is the restricted-reconstruction value for ``method`` in
    {"restrict", "projection"} and the raw stress for ``method == "stress"``.
    """

    y_star: np.ndarray
    objective: float
    method: str = "restrict"
    lambda_star: float | None = None
    hard_case: bool = False
    diagnostics: dict = field(default_factory=dict)


def _y(p: OosProblem, y) -> np.ndarray:
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != p.d:
        raise DimensionMismatch(f"y must have length {p.d}, got {y.shape[0]}")
    return y


def objective(p: OosProblem, y) -> float:
    """2 ||X y - b||^2 + (y'y - beta)^2."""
    y = _y(p, y)
    r = p.X @ y - p.b
    q = y @ y - p.beta
    return float(2.0 * (r @ r) + q * q)


def objective_gradient(p: OosProblem, y) -> np.ndarray:
    y = _y(p, y)
    return 4.0 * (p.X.T @ (p.X @ y - p.b)) + 4.0 * (y @ y - p.beta) * y


def objective_hessian(p: OosProblem, y) -> np.ndarray:
    y = _y(p, y)
    return 4.0 * (p.X.T @ p.X + (y @ y - p.beta) * np.eye(p.d)) + 8.0 * np.outer(y, y)


class RidgeSystem:
    """Spectral data of X'X needed to evaluate y_hat(lam) cheaply.

    Attributes
    ----------
    mu : (d,) eigenvalues of X'X, descending (squared singular values of X)
    V : (d, d) matching eigenvectors
    c : (d,) coordinates of X'b in the eigenbasis
    clusters : list of index arrays grouping numerically equal eigenvalues
    guard : half-width of the band around each -mu_i where the system is
        treated as singular
    """

    def __init__(self, p: OosProblem):
        self.problem = p
        u1, s, vt = np.linalg.svd(p.X, full_matrices=False)
        if s.size == 0 or s[-1] <= RANK_RTOL * s[0]:
            smallest = s[-1] if s.size else 0.0
            raise RankDeficientConfiguration(
                f"configuration is rank deficient (sigma_min = {smallest:.3e}); use a smaller dimension"
            )
        self.s = s
        self.mu = s * s
        self.V = vt.T
        self.g = u1.T @ p.b
        self.c = s * self.g
        self.guard = GUARD_RTOL * self.mu[0]
        self.clusters = self._cluster(self.mu)
        c_norm = float(np.linalg.norm(self.c))
        self.zero_level = max(HARD_RTOL * c_norm, HARD_ATOL * max(1.0, s[0] * float(np.linalg.norm(p.b))))
        self.rhs_vanishes = c_norm <= self.zero_level

    def _cluster(self, mu):
        groups = [[0]]
        for i in range(1, mu.size):
            if mu[groups[-1][0]] - mu[i] <= self.guard:
                groups[-1].append(i)
            else:
                groups.append([i])
        return [np.array(g) for g in groups]

    @property
    def cluster_values(self) -> np.ndarray:
        """Distinct eigenvalues of X'X, descending."""
        return np.array([self.mu[g].mean() for g in self.clusters])

    @property
    def r_hat_squared(self) -> float:
        return float(np.sum((self.g / self.s) ** 2))

    def offending(self, lam: float) -> float | None:
        """Eigenvalue of -X'X within the guard band of ``lam``, if any."""
        near = np.abs(lam + self.mu) <= self.guard
        if np.any(near):
            return float(-self.mu[np.argmax(near)])
        return None

    def y(self, lam: float) -> np.ndarray:
        return self.V @ (self.c / (self.mu + lam))

    def phi(self, lam: float) -> float:
        return objective(self.problem, self.y(lam))

    def psi(self, lam: float) -> float:
        """||y_hat(lam)||^2 - beta - lam; phi'(lam) has the opposite sign right of -mu_d."""
        z = self.c / (self.mu + lam)
        return float(z @ z - self.problem.beta - lam)

    def is_zero_component(self, idx) -> bool:
        return float(np.linalg.norm(self.c[idx])) <= self.zero_level


def ridge_solve(p: OosProblem, lam: float, *, strict: bool = True, system: RidgeSystem | None = None) -> RidgePoint:
    """Solve (X'X + lam I) y = X'b through the thin SVD of X.

    Within the guard band of an eigenvalue of -X'X this raises
    :class:`NearSingular`, or with ``strict=False`` returns a point with
    ``singular_flag`` set and no ``y``.
    """
    rs = system if system is not None else RidgeSystem(p)
    lam = float(lam)
    bad = rs.offending(lam)
    if bad is not None:
        if strict:
            raise NearSingular(f"lambda = {lam:.6g} is within the guard band of eigenvalue {bad:.6g} of -X'X", eigenvalue=bad)
        return RidgePoint(lam, None, float("nan"), True)
    y = rs.y(lam)
    return RidgePoint(lam, y, objective(p, y), False)


def r_hat_squared(p: OosProblem) -> float:
    """Squared norm of the projection (unconstrained least-squares) solution."""
    return RidgeSystem(p).r_hat_squared
