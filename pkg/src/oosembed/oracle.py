"""Brute-force verifiers kept independent of the solvers they check.

Nothing here imports the restricted-reconstruction search: objectives are
re-evaluated from scratch so that a shared bug cannot hide itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionTooLarge


MAX_GRID_POINTS = 50_000_000


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned box sampled at ``resolution`` points per axis."""

    low: np.ndarray
    high: np.ndarray
    resolution: int

    def __post_init__(self):
        low = np.atleast_1d(np.asarray(self.low, dtype=float))
        high = np.atleast_1d(np.asarray(self.high, dtype=float))
        if low.shape != high.shape or np.any(low >= high):
            raise ValueError("GridSpec needs low < high on every axis")
        if self.resolution < 3:
            raise ValueError("GridSpec resolution must be at least 3")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @property
    def d(self) -> int:
        return self.low.size

    @classmethod
    def cube(cls, half_width: float, d: int, resolution: int, center=None) -> "GridSpec":
        c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
        return cls(c - half_width, c + half_width, resolution)


def default_grid(X, b, beta: float, resolution: int | None = None) -> GridSpec:
    """Box of half-width 2 sqrt(beta) + 2 r_hat + 1, enough for both norm regimes."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    d = X.shape[1]
    y_ls = np.linalg.lstsq(X, np.asarray(b, dtype=float), rcond=None)[0]
    half = 2.0 * math.sqrt(max(beta, 0.0)) + 2.0 * float(np.linalg.norm(y_ls)) + 1.0
    if resolution is None:
        resolution = {1: 4001, 2: 401, 3: 61}.get(d, 3)
    return GridSpec.cube(half, d, resolution)


def grid_minimize(fn, g: GridSpec, *, polish: bool = True, chunk: int = 200_000):
    """Exhaustive grid evaluation of a vectorized ``fn`` then a Nelder-Mead polish.

    ``fn`` maps an (m, d) array of points to m values.
    """
    if g.resolution**g.d > MAX_GRID_POINTS:
        raise DimensionTooLarge(f"{g.resolution}^{g.d} grid points exceed the cap of {MAX_GRID_POINTS}")
    axes = [np.linspace(lo, hi, g.resolution) for lo, hi in zip(g.low, g.high)]
    total = g.resolution**g.d
    best_val, best_pt = np.inf, None
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        coords = np.unravel_index(idx, (g.resolution,) * g.d)
        pts = np.column_stack([ax[c] for ax, c in zip(axes, coords)])
        vals = fn(pts)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val, best_pt = float(vals[j]), pts[j]
    if polish:
        step = (g.high - g.low) / (g.resolution - 1)
        simplex = np.vstack([best_pt] + [best_pt + np.eye(g.d)[i] * step[i] for i in range(g.d)])
        res = minimize(lambda v: float(fn(v[None, :])[0]), best_pt, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-14,
                                "maxiter": 20000, "maxfev": 40000})
        if res.fun < best_val:
            best_val, best_pt = float(res.fun), res.x
    return np.asarray(best_pt, dtype=float), best_val


def restricted_objective_batch(X, b, beta: float):
    """Vectorized 2||X y - b||^2 + (y'y - beta)^2 over rows of a point array."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    b = np.asarray(b, dtype=float)

    def fn(Y):
        r = Y @ X.T - b[None, :]
        q = np.sum(Y * Y, axis=1) - beta
        return 2.0 * np.sum(r * r, axis=1) + q * q

    return fn


def grid_min(p, g: GridSpec | None = None):
    """Grid-search minimum of the restricted-reconstruction objective for d <= 3.

    ``p`` is anything with ``X``, ``b`` and ``beta`` attributes.
    """
    X = np.asarray(p.X, dtype=float)
    d = 1 if X.ndim == 1 else X.shape[1]
    if d > 3:
        raise DimensionTooLarge(f"grid oracle limited to d <= 3, got d = {d}")
    if g is None:
        g = default_grid(X, p.b, p.beta)
    return grid_minimize(restricted_objective_batch(X, p.b, p.beta), g)


def stress_objective_batch(X, deltas):
    X = np.asarray(X, dtype=float)
    deltas = np.asarray(deltas, dtype=float)

    def fn(Y):
        dist = np.sqrt(np.sum((Y[:, None, :] - X[None, :, :]) ** 2, axis=2))
        return np.sum((dist - deltas[None, :]) ** 2, axis=1)

    return fn


def stress_grid_min(X, deltas, resolution: int = 401):
    X = np.asarray(X, dtype=float)
    pad = float(np.max(deltas)) + 1.0
    g = GridSpec(X.min(axis=0) - pad, X.max(axis=0) + pad, resolution)
    return grid_minimize(stress_objective_batch(X, deltas), g, chunk=20_000)


def solve_full_pivot(A, b) -> np.ndarray:
    """Gaussian elimination with full pivoting, written out for cross-checks."""
    a = np.array(A, dtype=float)
    rhs = np.array(b, dtype=float).reshape(-1)
    n = a.shape[0]
    perm = np.arange(n)
    for k in range(n):
        sub = np.abs(a[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        i += k
        j += k
        if a[i, j] == 0.0:
            raise np.linalg.LinAlgError("singular matrix")
        a[[k, i]] = a[[i, k]]
        rhs[[k, i]] = rhs[[i, k]]
        a[:, [k, j]] = a[:, [j, k]]
        perm[[k, j]] = perm[[j, k]]
        for r in range(k + 1, n):
            f = a[r, k] / a[k, k]
            a[r, k:] -= f * a[k, k:]
            rhs[r] -= f * rhs[k]
    z = np.zeros(n)
    for k in range(n - 1, -1, -1):
        z[k] = (rhs[k] - a[k, k + 1:] @ z[k + 1:]) / a[k, k]
    x = np.empty(n)
    x[perm] = z
    return x


def _cubic_real_roots(a: float, b: float, c: float, d: float) -> list[float]:
    """Real roots of a t^3 + b t^2 + c t + d with a != 0 (trigonometric / Cardano)."""
    b, c, d = b / a, c / a, d / a
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    scale = max(1.0, abs(p), abs(q)) ** 2
    if p == 0.0 and q == 0.0:
        roots = [0.0]
    elif disc > 1e-14 * scale:
        sq = math.sqrt(disc)
        roots = [math.copysign(abs(-q / 2.0 + sq) ** (1 / 3), -q / 2.0 + sq)
                 + math.copysign(abs(-q / 2.0 - sq) ** (1 / 3), -q / 2.0 - sq)]
    elif disc < -1e-14 * scale:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * r)))
        phi = math.acos(arg) / 3.0
        roots = [r * math.cos(phi - 2.0 * math.pi * k / 3.0) for k in range(3)]
    else:
        # repeated root
        u = math.copysign(abs(q / 2.0) ** (1 / 3), -q / 2.0)
        roots = [2.0 * u, -u]
    return [t - shift for t in roots]


@dataclass(frozen=True)
class QuarticMinimum:
    stationary_points: list[float]
    minimizers: list[float]
    minimum: float


def quartic_1d_roots(c4: float, c3: float, c2: float, c1: float, c0: float) -> QuarticMinimum:
    """Stationary points and global minimizers of c4 t^4 + c3 t^3 + c2 t^2 + c1 t + c0.

    Roots of the derivative cubic come from the closed form and get two
    Newton corrections. All minimizers attaining the minimum (to 1e-12
    relative) are returned in ascending order.
    """
    if c4 <= 0:
        raise ValueError("quartic needs a positive leading coefficient")

    def f(t):
        return (((c4 * t + c3) * t + c2) * t + c1) * t + c0

    def df(t):
        return ((4 * c4 * t + 3 * c3) * t + 2 * c2) * t + c1

    def d2f(t):
        return (12 * c4 * t + 6 * c3) * t + 2 * c2

    roots = []
    for t in _cubic_real_roots(4 * c4, 3 * c3, 2 * c2, c1):
        for _ in range(2):
            h = d2f(t)
            if h != 0.0:
                t_new = t - df(t) / h
                if abs(df(t_new)) <= abs(df(t)):
                    t = t_new
        roots.append(t)
    roots = sorted(roots)
    uniq = []
    for t in roots:
        if not uniq or abs(t - uniq[-1]) > 1e-9 * max(1.0, abs(t)):
            uniq.append(t)
    vals = [f(t) for t in uniq]
    m = min(vals)
    mins = [t for t, v in zip(uniq, vals) if v <= m + 1e-12 * max(1.0, abs(m))]
    return QuarticMinimum(uniq, mins, m)


# Two feature vectors on the horizontal axis and a new one far above them.
_DEMO_M = np.array([[-1.0, -3.0], [1.0, -3.0], [0.0, 6.0]])


def hyperplane_objective(theta: float, y: float) -> float:
    """||M V(theta) - M(y)||_F^2 evaluated from the matrices themselves."""
    v = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    my = np.array([[-1.0 - y / 2.0, 0.0], [1.0 - y / 2.0, 0.0], [y, 0.0]])
    r = _DEMO_M @ v - my
    return float(np.sum(r * r))


def hyperplane_gradient(theta: float, y: float) -> np.ndarray:
    return np.array([-18.0 * y * math.cos(theta) + 4.0 * math.sin(theta), 3.0 * y - 18.0 * math.sin(theta)])


def hyperplane_hessian(theta: float, y: float) -> np.ndarray:
    return np.array([
        [18.0 * y * math.sin(theta) + 4.0 * math.cos(theta), -18.0 * math.cos(theta)],
        [-18.0 * math.cos(theta), 3.0],
    ])


@dataclass(frozen=True)
class StationaryPoint:
    theta: float
    y: float
    kind: str
    hessian_eigenvalues: tuple[float, float]

    @property
    def y_out(self) -> float:
        """Out-of-sample coordinate after undoing the centering shift y/2."""
        return 1.5 * self.y


@dataclass(frozen=True)
class HyperplaneDemo:
    points: list[StationaryPoint]

    @property
    def saddles(self) -> list[StationaryPoint]:
        return [p for p in self.points if p.kind == "saddle"]

    @property
    def minimizers(self) -> list[StationaryPoint]:
        return [p for p in self.points if p.kind == "minimum"]

    @property
    def cos_theta_star(self) -> float:
        return math.cos(self.minimizers[0].theta)


def pca_hyperplane_demo() -> HyperplaneDemo:
    """Stationary points of the hyperplane characterization of PCA for
    xi_1 = (-1, 0), xi_2 = (1, 0), eta = (0, 9) in one dimension.

    The gradient vanishes when sin(theta) = 0 with y = 0, or when
    cos(theta) = 1/27 with y = 6 sin(theta). Points are classified by the
    signs of the Hessian eigenvalues; theta ranges over (-pi, pi].
    """
    th = math.acos(1.0 / 27.0)
    raw = [(0.0, 0.0), (math.pi, 0.0), (th, 6.0 * math.sin(th)), (-th, 6.0 * math.sin(-th))]
    pts = []
    for theta, y in raw:
        w = np.linalg.eigvalsh(hyperplane_hessian(theta, y))
        if w[0] > 0:
            kind = "minimum"
        elif w[-1] < 0:
            kind = "maximum"
        else:
            kind = "saddle"
        pts.append(StationaryPoint(theta, y, kind, (float(w[0]), float(w[1]))))
    return HyperplaneDemo(pts)
