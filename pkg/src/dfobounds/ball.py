"""Exact extremization of quadratic polynomials over closed Euclidean balls.

The global extrema of a quadratic over a ball satisfy a stationarity system
(H + mu I) z = -g with a scalar multiplier mu.  After an eigendecomposition
of the Hessian the boundary multiplier is the root of a one-dimensional
secular equation, found by a safeguarded bracketing solve plus Newton
refinement.  The degenerate branch, where the multiplier is pinned at an
extreme eigenvalue and the gradient has no component on that eigenspace, is
completed along the corresponding eigenvector.  A brute-force lattice oracle
is provided as an independent cross-check for low dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .poly import QuadraticPolynomial

__all__ = [
    "BallExtremum",
    "extremize_on_ball",
    "max_abs_on_ball",
    "grid_oracle",
    "lipschitz_on_ball",
]

GRID_BUDGET = 10_000_000
GRID_MAX_DIM = 4
_CHUNK_POINTS = 1_000_000


@dataclass(frozen=True)
class BallExtremum:
    """Global extrema of a quadratic over a closed ball.

    ``solver_residual`` is the largest stationarity residual of the two
    one-sided solves, scaled by the coefficient magnitude.
    """

    max_value: float
    argmax: np.ndarray
    min_value: float
    argmin: np.ndarray
    solver_residual: float


def _lex_smaller(a: np.ndarray, b: np.ndarray) -> bool:
    for x, y in zip(a, b):
        if x < y:
            return True
        if x > y:
            return False
    return False


def _ball_min(g: np.ndarray, H: np.ndarray, r: float):
    """Global minimizer of g.z + z^T H z / 2 over ||z|| <= r.

    Returns (z, mu, residual) with mu >= 0 the boundary multiplier (0 for
    interior solutions) and residual = ||(H + mu I) z + g||.
    """
    n = g.size
    w, Q = np.linalg.eigh(H)
    gh = Q.T @ g
    lam_min = float(w[0])
    h_scale = float(np.max(np.abs(w)))
    g_scale = float(np.linalg.norm(g))

    candidates = []  # (z, mu)

    # Interior stationary point: H must be PSD and g in its range.
    pos_tol = 1e-13 * max(1.0, h_scale)
    if lam_min >= -pos_tol:
        pos = w > pos_tol
        if np.all(np.abs(gh[~pos]) <= 1e-13 * max(1.0, g_scale)):
            zh = np.zeros(n)
            zh[pos] = -gh[pos] / w[pos]
            nz = float(np.linalg.norm(zh))
            if nz <= r * (1.0 + 1e-12):
                if nz > r:
                    zh *= r / nz
                candidates.append((Q @ zh, 0.0))

    mu_lo = max(0.0, -lam_min)
    cluster = w <= lam_min + 1e-10 * max(1.0, abs(lam_min))
    g_cluster = float(np.linalg.norm(gh[cluster]))
    degenerate = g_cluster <= 1e-11 * max(1.0, g_scale)

    gh_eff = gh.copy()
    if degenerate:
        # No gradient component on the extreme eigenspace: drop it so the
        # secular function stays finite when mu hits -lam_min exactly.
        gh_eff[cluster] = 0.0
    active = gh_eff != 0.0

    def step(mu: float) -> np.ndarray:
        d = w + mu
        t = np.zeros(n)
        with np.errstate(divide="ignore", over="ignore"):
            t[active] = gh_eff[active] / d[active]
        return t

    def step_norm(mu: float) -> float:
        t = step(mu)
        return float(np.sqrt(np.sum(np.square(t))))

    def secular(mu: float) -> float:
        # Decreasing in mu: 1/r near the pole, negative once the step is
        # shorter than the radius.
        s = step_norm(mu)
        if s == 0.0:
            return -1.0 / r
        if not np.isfinite(s):
            return 1.0 / r
        return 1.0 / r - 1.0 / s

    boundary_done = False
    if degenerate:
        s0 = step_norm(mu_lo)
        if s0 < r * (1.0 - 1e-14):
            # Multiplier pinned at the extreme eigenvalue: complete the step
            # to the sphere along an extreme eigenvector.
            tau = float(np.sqrt(max(r * r - s0 * s0, 0.0)))
            zbar = Q @ (-step(mu_lo))
            u = Q[:, 0]
            candidates.append((zbar + tau * u, mu_lo))
            candidates.append((zbar - tau * u, mu_lo))
            boundary_done = True

    if not boundary_done:
        lo = mu_lo if degenerate else mu_lo + max(1e-300, 1e-13 * max(1.0, mu_lo))
        f_lo = secular(lo)
        if f_lo >= 0.0:
            # The step at lo reaches the sphere: a boundary multiplier exists.
            if f_lo == 0.0:
                mu = lo
            else:
                hi = max(1.0, 2.0 * mu_lo, g_scale / r, 2.0 * h_scale)
                for _ in range(200):
                    if secular(hi) < 0.0:
                        break
                    hi *= 4.0
                else:
                    raise RuntimeError("failed to bracket the boundary multiplier")
                mu = float(
                    brentq(secular, lo, hi, xtol=1e-14 * max(1.0, hi), rtol=8.9e-16)
                )
            # Newton refinement on 1/||z(mu)|| - 1/r, nearly linear in mu.
            for _ in range(3):
                t = step(mu)
                s2 = float(t @ t)
                if not np.isfinite(s2) or s2 <= 0.0:
                    break
                s = np.sqrt(s2)
                fval = 1.0 / s - 1.0 / r
                d = w + mu
                fder = float(np.sum(np.square(t[active]) / d[active])) / (s2 * s)
                if not np.isfinite(fder) or fder <= 0.0:
                    break
                mu_new = mu - fval / fder
                if not np.isfinite(mu_new) or mu_new <= mu_lo:
                    break
                mu = mu_new
            z = Q @ (-step(mu))
            nz = float(np.linalg.norm(z))
            if nz > 0.0:
                z *= r / nz
            candidates.append((z, mu))

    if not candidates:
        # g = 0 and H = 0 lands here only if the interior branch was somehow
        # skipped; the center is then optimal anyway.
        candidates.append((np.zeros(n), 0.0))

    def value(z: np.ndarray) -> float:
        return float(g @ z + 0.5 * z @ (H @ z))

    best_z, best_mu = candidates[0]
    best_v = value(best_z)
    for z, mu in candidates[1:]:
        v = value(z)
        tie = 1e-14 * max(1.0, abs(best_v))
        if v < best_v - tie:
            best_z, best_mu, best_v = z, mu, v
        elif abs(v - best_v) <= tie and _lex_smaller(z, best_z):
            best_z, best_mu = z, mu

    residual = float(np.linalg.norm(H @ best_z + best_mu * best_z + g))
    return best_z, best_mu, residual


def extremize_on_ball(
    m: QuadraticPolynomial, center, radius: float, tol: float = 1e-10
) -> BallExtremum:
    """Global max and min of ``m`` over the closed ball B(center, radius).

    Parameters
    ----------
    m : QuadraticPolynomial
    center : array_like, shape (m.dim,)
    radius : float
        Positive ball radius.
    tol : float
        Cap on the scaled stationarity residual; exceeding it raises.

    Returns
    -------
    BallExtremum
        Reported values are evaluations of ``m`` at the returned arguments,
        which lie in the closed ball.
    """
    radius = float(radius)
    if not np.isfinite(radius) or radius <= 0.0:
        raise ValueError(f"radius must be positive and finite, got {radius}")
    center = np.asarray(center, dtype=float).ravel()
    if center.shape != (m.dim,):
        raise ValueError(f"center must have shape ({m.dim},), got {center.shape}")
    if not (
        np.isfinite(m.constant)
        and np.all(np.isfinite(m.gradient))
        and np.all(np.isfinite(m.hessian))
        and np.all(np.isfinite(center))
    ):
        raise ValueError("polynomial coefficients and center must be finite")

    g0 = m.grad(center)
    H = m.hessian
    scale = max(1.0, float(np.linalg.norm(g0)) + float(np.linalg.norm(H, 2)) * radius)

    zmin, _, res_min = _ball_min(g0, H, radius)
    zmax, _, res_max = _ball_min(-g0, -H, radius)
    residual = max(res_min, res_max) / scale
    if residual > tol:
        raise RuntimeError(
            f"stationarity residual {residual:.3e} exceeds tol {tol:.3e}"
        )

    argmin = center + zmin
    argmax = center + zmax
    return BallExtremum(
        max_value=m.eval(argmax),
        argmax=argmax,
        min_value=m.eval(argmin),
        argmin=argmin,
        solver_residual=residual,
    )


def max_abs_on_ball(m: QuadraticPolynomial, center, radius: float, tol: float = 1e-10):
    """Maximum of |m| over the ball; returns (value, argument).

    Ties between the max and min branches are broken toward the
    lexicographically smaller argument.
    """
    ext = extremize_on_ball(m, center, radius, tol=tol)
    vmax = abs(ext.max_value)
    vmin = abs(ext.min_value)
    gap = 1e-12 * max(1.0, vmax, vmin)
    if vmax > vmin + gap:
        return vmax, ext.argmax
    if vmin > vmax + gap:
        return vmin, ext.argmin
    if _lex_smaller(ext.argmin, ext.argmax):
        return vmin, ext.argmin
    return vmax, ext.argmax


def lipschitz_on_ball(m: QuadraticPolynomial, center, radius: float) -> float:
    """Lipschitz constant of m on the ball: ||g|| + ||H|| (||center|| + radius)."""
    center = np.asarray(center, dtype=float).ravel()
    return float(
        np.linalg.norm(m.gradient)
        + np.linalg.norm(m.hessian, 2) * (np.linalg.norm(center) + float(radius))
    )


def grid_oracle(m: QuadraticPolynomial, center, radius: float, resolution: float):
    """Brute-force max of |m| over lattice points of the ball.

    Enumerates the lattice center + resolution * k, k integer, restricted to
    the closed ball, in lexicographic order, and returns (value, argument)
    with ties resolved to the first, lexicographically smallest, argument.
    The 2n axis points on the sphere are evaluated as well; without them the
    one-dimensional boundary gap makes the Lip * resolution agreement with
    the exact solver sharp rather than conservative.  Intended as an
    independent low-dimensional cross-check: n is capped at GRID_MAX_DIM and
    the lattice at GRID_BUDGET points.
    """
    n = m.dim
    if n > GRID_MAX_DIM:
        raise ValueError(f"grid oracle supports n <= {GRID_MAX_DIM}, got n = {n}")
    radius = float(radius)
    resolution = float(resolution)
    if radius <= 0.0 or not np.isfinite(radius):
        raise ValueError(f"radius must be positive and finite, got {radius}")
    if resolution <= 0.0 or not np.isfinite(resolution):
        raise ValueError(f"resolution must be positive and finite, got {resolution}")
    center = np.asarray(center, dtype=float).ravel()
    if center.shape != (n,):
        raise ValueError(f"center must have shape ({n},), got {center.shape}")

    k = int(np.floor(radius / resolution + 1e-12))
    side = 2 * k + 1
    if float(side) ** n > GRID_BUDGET:
        raise ValueError(f"lattice of {side}^{n} points exceeds {GRID_BUDGET}")
    axis = np.arange(-k, k + 1, dtype=float) * resolution
    r2 = radius * radius * (1.0 + 1e-12)

    if n == 1:
        trailing = np.zeros((1, 0))
    else:
        mesh = np.meshgrid(*([axis] * (n - 1)), indexing="ij")
        trailing = np.column_stack([a.ravel() for a in mesh])
    rows_per_chunk = max(1, _CHUNK_POINTS // max(1, len(trailing)))

    best_val = -np.inf
    best_arg = None
    for start in range(0, side, rows_per_chunk):
        lead = axis[start : start + rows_per_chunk]
        # Lexicographic order: leading coordinate outer, trailing block inner.
        Z = np.column_stack(
            [
                np.repeat(lead, len(trailing)),
                np.tile(trailing, (len(lead), 1)),
            ]
        )
        keep = np.einsum("ij,ij->i", Z, Z) <= r2
        if not np.any(keep):
            continue
        Z = Z[keep]
        vals = np.abs(m.eval_batch(center + Z))
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_arg = center + Z[i]
    axis_pts = center + radius * np.vstack([np.eye(n), -np.eye(n)])
    axis_vals = np.abs(m.eval_batch(axis_pts))
    i = int(np.argmax(axis_vals))
    if axis_vals[i] > best_val:
        best_val = float(axis_vals[i])
        best_arg = axis_pts[i]
    if best_arg is None:
        best_arg = center.copy()
        best_val = abs(m.eval(center))
    return best_val, best_arg
