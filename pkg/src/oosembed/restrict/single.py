"""Global minimization of the single-point restricted-reconstruction quartic.

The search is over the ridge parameter lam. Eigenvalues of -X'X split
(-inf, 0] into at most d + 1 open subintervals; each is scanned by
golden-section search on phi(lam) = F(y_hat(lam)). When X'b has no component
along an eigenvector, the minimizer can sit exactly on that eigenvalue (the
trust-region "hard case") and is found in closed form instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import BracketingFailure
from .problem import (
    EmbeddingResult,
    OosProblem,
    RidgePoint,
    RidgeSystem,
    objective,
    objective_gradient,
    objective_hessian,
    ridge_solve,
)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
BRACKET_GROWTH = 4.0
BRACKET_CAP = 1e12


@dataclass
class _Candidate:
    value: float
    lam: float
    y: np.ndarray
    source: str
    interval: tuple[float, float] | None = None


@dataclass
class _SearchLog:
    iterations: int = 0
    intervals: list = field(default_factory=list)
    bracket: tuple[float, float] | None = None


def _golden(f, lo: float, hi: float, tol: float, max_iter: int):
    """Golden-section search on [lo, hi] with a 3-point parabolic polish.

    Returns (x, f(x), evaluations, final bracket).
    """
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while (b - a) > tol * (1.0 + max(abs(x1), abs(x2))) and it < max_iter:
        it += 1
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    for e in (lo, hi):
        fe = f(e)
        if fe < fx:
            x, fx = e, fe

    # parabola through the final triple
    xs = sorted({a, x, b})
    if len(xs) == 3:
        u, v, w = xs
        fu, fv, fw = f(u), f(v), f(w)
        den = (v - u) * (fv - fw) - (v - w) * (fv - fu)
        if den != 0.0:
            xp = v - 0.5 * ((v - u) ** 2 * (fv - fw) - (v - w) ** 2 * (fv - fu)) / den
            if lo <= xp <= hi:
                fp = f(xp)
                if fp < fx:
                    x, fx = xp, fp
    return x, fx, it, (a, b)


def _bisect_psi(rs: RidgeSystem, lo: float, hi: float, max_iter: int = 200):
    """Root of the secular function psi on [lo, hi] when it changes sign there."""
    plo, phi_ = rs.psi(lo), rs.psi(hi)
    if not (plo >= 0.0 >= phi_):
        return None
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if rs.psi(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bracket_right(rs: RidgeSystem) -> tuple[float, list]:
    """Grow lam_max from sigma_1^2 until phi turns upward (beta < r_hat^2 regime)."""
    mu1 = rs.mu[0]
    prev = 0.0
    prev_phi = rs.phi(0.0)
    lam = mu1
    scanned = []
    while lam <= BRACKET_CAP * mu1:
        cur_phi = rs.phi(lam)
        scanned.append(lam)
        if cur_phi > prev_phi or rs.psi(lam) < 0.0:
            return lam, scanned
        prev, prev_phi = lam, cur_phi
        lam *= BRACKET_GROWTH
    raise BracketingFailure(
        f"phi kept decreasing on [0, {prev:.3e}]; no bracket below {BRACKET_CAP:g} * sigma_1^2",
        scanned=(0.0, prev),
    )


def _negative_intervals(rs: RidgeSystem) -> list[tuple[float, float]]:
    """Guarded subintervals of (-inf, 0] between eigenvalues of -X'X, left to right."""
    g = rs.guard
    poles = -rs.cluster_values  # ascending: -mu_1 < ... < -mu_r
    out = []

    # leftmost piece: grow outward until phi stops falling or the cap is hit
    right = poles[0] - g
    mu1 = rs.mu[0]
    step = mu1
    left = poles[0] - step
    f_prev = rs.phi(left)
    while step < BRACKET_CAP * mu1:
        step *= BRACKET_GROWTH
        cand = poles[0] - step
        f_cand = rs.phi(cand)
        left = cand
        if f_cand > f_prev:
            break
        f_prev = f_cand
    out.append((left, right))

    for lo_pole, hi_pole in zip(poles[:-1], poles[1:]):
        lo, hi = lo_pole + g, hi_pole - g
        if hi > lo:
            out.append((lo, hi))
    lo = poles[-1] + g
    if lo < 0.0:
        out.append((lo, 0.0))
    return out


def _hard_candidates(rs: RidgeSystem) -> list[_Candidate]:
    """Closed-form candidates on eigenvalues where X'b has no component.

    At lam = -mu_j the ridge system is singular; y = y_perp + t v with y_perp
    solving the system on the complement of the eigenspace. Along v the
    objective is an even quartic in t whose stationary equation is
    4 t (mu_j + ||y_perp||^2 + t^2 - beta) = 0.
    """
    p = rs.problem
    out = []
    for idx, m in zip(rs.clusters, rs.cluster_values):
        if not rs.is_zero_component(idx):
            continue
        mask = np.ones(rs.mu.size, dtype=bool)
        mask[idx] = False
        z = np.zeros(rs.mu.size)
        z[mask] = rs.c[mask] / (rs.mu[mask] - m)
        y_perp = rs.V @ z
        t2 = p.beta - m - float(z @ z)
        v = rs.V[:, idx[0]]
        v = -v if v[np.flatnonzero(np.abs(v) > 1e-12 * np.abs(v).max())[0]] < 0 else v
        ts = [math.sqrt(t2)] if t2 > 0.0 else [0.0]
        for t in ts:
            y = y_perp + t * v
            out.append(_Candidate(objective(p, y), float(-m), y, "hard"))
    return out


def _newton_polish(p: OosProblem, y: np.ndarray, value: float, max_iter: int = 30):
    """Damped Newton on F from an already-global candidate; only accepts decrease."""
    improved = False
    for _ in range(max_iter):
        g = objective_gradient(p, y)
        if np.linalg.norm(g) <= 1e-15 * (1.0 + value):
            break
        h = objective_hessian(p, y)
        w = np.linalg.eigvalsh(h)
        shift = 0.0 if w[0] > 1e-12 * max(abs(w[-1]), 1.0) else -w[0] + 1e-8 * max(abs(w[-1]), 1.0)
        step = -np.linalg.solve(h + shift * np.eye(p.d), g)
        t = 1.0
        accepted = False
        while t > 1e-8:
            y_new = y + t * step
            v_new = objective(p, y_new)
            if v_new < value:
                y, value, accepted = y_new, v_new, True
                break
            t *= 0.5
        if not accepted:
            break
        improved = True
    return y, value, improved


def _canonical_sign(y: np.ndarray) -> np.ndarray:
    scale = np.abs(y).max() if y.size else 0.0
    if scale == 0.0:
        return y
    i = np.flatnonzero(np.abs(y) > 1e-12 * scale)[0]
    return -y if y[i] < 0 else y


def solve_single(p: OosProblem, *, tol: float = 1e-10, max_iter: int = 500) -> EmbeddingResult:
    """Global minimizer of 2||Xy - b||^2 + (y'y - beta)^2.

    Parameters
    ----------
    p : OosProblem
    tol : float
        Relative tolerance on lam for each golden-section search.
    max_iter : int
        Iteration cap per subinterval search.

    Returns
    -------
    EmbeddingResult
        ``lambda_star`` is the ridge parameter of the winning candidate and
        ``hard_case`` is set when the winner came from the closed-form
        eigenvalue candidates. When X'b vanishes the solution set is closed
        under y -> -y and the representative whose first nonzero coordinate is
        positive is returned.
    """
    rs = RidgeSystem(p)
    r2 = rs.r_hat_squared
    log = _SearchLog()

    y0 = rs.y(0.0)
    cands = [_Candidate(objective(p, y0), 0.0, y0, "projection")]

    if p.beta <= r2:
        regime = "beta<=r_hat^2"
        hi, scanned = _bracket_right(rs)
        log.bracket = (0.0, hi)
        intervals = [(0.0, hi)]
    else:
        regime = "beta>r_hat^2"
        intervals = _negative_intervals(rs)
        log.bracket = (intervals[0][0], 0.0)
    log.intervals = intervals

    for lo, hi in intervals:
        lam, val, it, _ = _golden(rs.phi, lo, hi, tol, max_iter)
        log.iterations += it
        cands.append(_Candidate(val, lam, rs.y(lam), "search", (lo, hi)))

    cands.extend(_hard_candidates(rs))

    best = cands[0]
    for c in cands[1:]:
        if c.value < best.value * (1.0 - 4.0 * np.finfo(float).eps):
            best = c

    # secular-equation refinement of lam on the interval that contains the winner
    if best.source in ("search", "projection"):
        rightmost = intervals[-1]
        root = _bisect_psi(rs, *rightmost)
        if root is not None:
            y_r = rs.y(root)
            v_r = objective(p, y_r)
            if v_r <= best.value * (1.0 + 1e-13):
                best = _Candidate(v_r, root, y_r, best.source, rightmost)

    y_star, value, polished = _newton_polish(p, best.y, best.value)
    lam_star = float(y_star @ y_star - p.beta) if polished else float(best.lam)

    if rs.rhs_vanishes:
        y_star = _canonical_sign(y_star)
    if objective(p, y_star) > cands[0].value:
        # roundoff near the unconstrained minimizer; never lose to lam = 0
        y_star, lam_star, best = y0, 0.0, cands[0]

    diagnostics = {
        "regime": regime,
        "r_hat_squared": float(r2),
        "beta": float(p.beta),
        "iterations": log.iterations,
        "bracket": tuple(float(v) for v in log.bracket),
        "subintervals": [(float(lo), float(hi)) for lo, hi in log.intervals],
        "n_candidates": len(cands),
        "winner": best.source,
        "newton_polished": polished,
    }
    return EmbeddingResult(
        y_star=y_star,
        objective=objective(p, y_star),
        method="restrict",
        lambda_star=lam_star,
        hard_case=best.source == "hard",
        diagnostics=diagnostics,
    )


@dataclass(frozen=True)
class ArcTrace:
    """Ridge points from lam = 0 (projection) to lam = lam* (restricted reconstruction).

    ``interpolated_indices`` marks points that were not obtained from a ridge
    solve: interior points inside a guard band get linear interpolation of
    their anchors, and a singular lam* endpoint takes the solver's y*.
    """

    points: list[RidgePoint]
    interpolated_indices: list[int]

    def table(self) -> np.ndarray:
        """Rows of (lam, y_1..y_d, phi, interpolated)."""
        flags = set(self.interpolated_indices)
        return np.array([[pt.lam, *pt.y, pt.phi, float(i in flags)] for i, pt in enumerate(self.points)])


def arc(p: OosProblem, result: EmbeddingResult, steps: int = 50) -> ArcTrace:
    """Sample y_hat(lam) on the segment between 0 and lam*."""
    if result.lambda_star is None:
        raise ValueError("arc needs a result carrying lambda_star")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    rs = RidgeSystem(p)
    lam_star = float(result.lambda_star)
    y_star = np.asarray(result.y_star, dtype=float)

    if abs(lam_star) <= 1e-12 * max(1.0, rs.mu[0]):
        rp = ridge_solve(p, 0.0, system=rs)
        return ArcTrace([rp], [])

    lams = np.linspace(0.0, lam_star, steps + 1)
    pts: list[RidgePoint | None] = [ridge_solve(p, lam, strict=False, system=rs) for lam in lams]
    flagged = [i for i, pt in enumerate(pts) if pt.singular_flag]
    last = len(pts) - 1
    pts[last] = RidgePoint(lam_star, y_star, objective(p, y_star), pts[last].singular_flag)

    anchors = [i for i, pt in enumerate(pts) if pt.y is not None]
    for i in flagged:
        if i == last:
            continue
        left = max((a for a in anchors if a < i), default=None)
        right = min((a for a in anchors if a > i), default=None)
        if left is None:
            y = pts[right].y
        elif right is None:
            y = pts[left].y
        else:
            w = (lams[i] - lams[left]) / (lams[right] - lams[left])
            y = (1.0 - w) * pts[left].y + w * pts[right].y
        pts[i] = RidgePoint(float(lams[i]), y, objective(p, y), True)
    return ArcTrace(pts, flagged)
