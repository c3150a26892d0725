"""Sample sets, interpolation systems, Lagrange polynomials, poisedness.

All linear solves run on a shifted and scaled copy of the sample set (points
mapped to (y - y0) / delta, so the set lives in the unit ball around the
origin) and the resulting coefficients are pulled back through the exact
affine substitution.  This keeps conditioning independent of where the set
sits and how small delta is, and makes the poisedness verdict scale
invariant.  The absolute-coordinate matrices remain available through
``interpolation_matrix`` and ``mfn_system_matrix``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .ball import max_abs_on_ball
from .bounds import constants_from_lambda
from .poly import (
    BasisPart,
    BasisSelector,
    QuadraticPolynomial,
    basis_matrix,
    natural_basis,
    space_dim,
)

__all__ = [
    "COND_THRESHOLD",
    "SampleSet",
    "MatrixKind",
    "PoisednessKind",
    "PoisednessCertificate",
    "NotPoisedError",
    "design_matrix",
    "interpolation_matrix",
    "mfn_system_matrix",
    "mfn_poised",
    "lagrange_determined",
    "lagrange_mfn",
    "mfn_lambda_vector",
    "lambda_poisedness",
    "generate_poised_set",
    "normalized_points",
]

COND_THRESHOLD = 1e12


class NotPoisedError(Exception):
    """The interpolation system is singular or numerically unusable."""

    def __init__(self, message: str, condition: float = np.inf):
        super().__init__(message)
        self.condition = float(condition)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """p+1 pairwise-distinct points in the closed ball around the first one.

    Row 0 of ``points`` is the base point y0 and doubles as the ball center;
    ``radius`` is the ball radius delta.
    """

    points: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError(f"points must be 2-D, got shape {pts.shape}")
        if pts.shape[0] < 2:
            raise ValueError("need at least two sample points")
        if pts.shape[1] < 1:
            raise ValueError("points need at least one coordinate")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        radius = float(self.radius)
        if not np.isfinite(radius) or radius <= 0.0:
            raise ValueError(f"radius must be positive and finite, got {radius}")
        if np.unique(pts, axis=0).shape[0] != pts.shape[0]:
            raise ValueError("sample points must be pairwise distinct")
        dist = np.linalg.norm(pts - pts[0], axis=1)
        if np.any(dist > radius * (1.0 + 1e-9)):
            worst = int(np.argmax(dist))
            raise ValueError(
                f"point {worst} lies at distance {dist[worst]:.6g} from the "
                f"base point, outside the ball of radius {radius:.6g}"
            )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "radius", radius)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def p(self) -> int:
        return self.points.shape[0] - 1

    @property
    def y0(self) -> np.ndarray:
        return self.points[0]

    def shifted(self) -> np.ndarray:
        """Rows y^i - y0 for i = 1..p, shape (p, n)."""
        return self.points[1:] - self.points[0]


def normalized_points(sample_set: SampleSet) -> np.ndarray:
    """All p+1 points mapped to (y - y0) / radius; row 0 becomes the origin."""
    return (sample_set.points - sample_set.points[0]) / sample_set.radius


class MatrixKind(Enum):
    LIN = "lin"
    LIN_SCALED = "lin_scaled"
    QUAD = "quad"
    QUAD_SCALED = "quad_scaled"
    UNDER = "under"
    UNDER_SCALED = "under_scaled"


def design_matrix(kind: MatrixKind, sample_set: SampleSet) -> np.ndarray:
    """Design matrix of the shifted displacements y^i - y0, i = 1..p.

    LIN/LIN_SCALED need p = n and stack the displacements row-wise, the
    scaled variant divided by the radius.  QUAD/QUAD_SCALED need p = q and
    evaluate the constant-free basis on the displacements; the scaled
    variant divides the affine columns by the radius and the second-order
    columns by its square.  UNDER/UNDER_SCALED are the n < p < q analogue of
    the linear pair with a rectangular (p, n) matrix.
    """
    n, p = sample_set.n, sample_set.p
    q = space_dim(2, n) - 1
    delta = sample_set.radius
    D = sample_set.shifted()
    if kind in (MatrixKind.LIN, MatrixKind.LIN_SCALED):
        if p != n:
            raise ValueError(f"kind {kind.name} needs p = n, got p={p}, n={n}")
        M = D.copy()
        if kind is MatrixKind.LIN_SCALED:
            M /= delta
        return M
    if kind in (MatrixKind.QUAD, MatrixKind.QUAD_SCALED):
        if p != q:
            raise ValueError(f"kind {kind.name} needs p = q = {q}, got p={p}")
        M = basis_matrix(BasisSelector(2, BasisPart.AFFINE_FREE), D)
        if kind is MatrixKind.QUAD_SCALED:
            M[:, :n] /= delta
            M[:, n:] /= delta * delta
        return M
    if kind in (MatrixKind.UNDER, MatrixKind.UNDER_SCALED):
        if not (n < p < q):
            raise ValueError(f"kind {kind.name} needs n < p < q, got n={n}, p={p}, q={q}")
        M = D.copy()
        if kind is MatrixKind.UNDER_SCALED:
            M /= delta
        return M
    raise ValueError(f"unknown matrix kind {kind!r}")


def interpolation_matrix(selector: BasisSelector, sample_set: SampleSet) -> np.ndarray:
    """Matrix with entry (i, j) = phi_j(y^i) in absolute coordinates."""
    return basis_matrix(selector, sample_set.points)


def mfn_system_matrix(sample_set: SampleSet) -> np.ndarray:
    """Saddle-point matrix [[Mq Mq^T, Ml], [Ml^T, 0]] in absolute coordinates.

    Its nonsingularity is the poisedness condition for minimum-norm
    quadratic interpolation.
    """
    n, p = sample_set.n, sample_set.p
    if p < n:
        raise ValueError(f"need p >= n, got p={p}, n={n}")
    Ml = interpolation_matrix(BasisSelector(2, BasisPart.LINEAR_PART), sample_set)
    Mq = interpolation_matrix(BasisSelector(2, BasisPart.QUADRATIC_PART), sample_set)
    return np.block(
        [[Mq @ Mq.T, Ml], [Ml.T, np.zeros((n + 1, n + 1))]]
    )


def _normalized_mfn_system(sample_set: SampleSet):
    """Blocks and saddle matrix of the shifted/scaled set."""
    n = sample_set.n
    Yh = normalized_points(sample_set)
    Ml = basis_matrix(BasisSelector(2, BasisPart.LINEAR_PART), Yh)
    Mq = basis_matrix(BasisSelector(2, BasisPart.QUADRATIC_PART), Yh)
    F = np.block([[Mq @ Mq.T, Ml], [Ml.T, np.zeros((n + 1, n + 1))]])
    return Ml, Mq, F


def mfn_poised(sample_set: SampleSet, cond_threshold: float = COND_THRESHOLD) -> bool:
    """Whether the minimum-norm interpolation system is usable.

    Checked on the shifted/scaled copy of the set so the verdict does not
    depend on translation or on the size of the radius.
    """
    if sample_set.p < sample_set.n:
        return False
    _, _, F = _normalized_mfn_system(sample_set)
    cond = float(np.linalg.cond(F))
    return bool(np.isfinite(cond) and cond <= cond_threshold)


def _pullback(poly_hat: QuadraticPolynomial, sample_set: SampleSet) -> QuadraticPolynomial:
    # poly_hat lives on the normalized set; return x -> poly_hat((x - y0)/delta).
    delta = sample_set.radius
    return poly_hat.compose_affine(-sample_set.y0 / delta, 1.0 / delta)


def lagrange_determined(sample_set: SampleSet, degree: int):
    """Lagrange basis for determined interpolation of the given degree.

    Solves the square system on the shifted/scaled set and pulls each
    polynomial back; l_j(y^i) = delta_ij by construction.
    """
    n, p = sample_set.n, sample_set.p
    if degree == 1:
        if p != n:
            raise ValueError(f"degree-1 basis needs p = n, got p={p}, n={n}")
        selector = BasisSelector(1, BasisPart.FULL)
    elif degree == 2:
        q = space_dim(2, n) - 1
        if p != q:
            raise ValueError(f"degree-2 basis needs p = q = {q}, got p={p}")
        selector = BasisSelector(2, BasisPart.FULL)
    else:
        raise ValueError(f"degree must be 1 or 2, got {degree}")

    M = basis_matrix(selector, normalized_points(sample_set))
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > COND_THRESHOLD:
        raise NotPoisedError(
            f"interpolation system condition {cond:.3e} exceeds {COND_THRESHOLD:.1e}",
            condition=cond,
        )
    A = np.linalg.solve(M, np.eye(p + 1))
    polys = []
    for j in range(p + 1):
        if degree == 1:
            poly_hat = QuadraticPolynomial(
                n, float(A[0, j]), A[1:, j].copy(), np.zeros((n, n))
            )
        else:
            poly_hat = QuadraticPolynomial.from_coeffs(A[:, j], n)
        polys.append(_pullback(poly_hat, sample_set))
    return polys


def _check_mfn_shape(sample_set: SampleSet) -> int:
    n, p = sample_set.n, sample_set.p
    q = space_dim(2, n) - 1
    if not (n < p < q):
        raise ValueError(
            f"minimum-norm interpolation needs n < p < q, got n={n}, p={p}, q={q}"
        )
    return q


def _mfn_factorization(sample_set: SampleSet):
    Ml, Mq, F = _normalized_mfn_system(sample_set)
    cond = float(np.linalg.cond(F))
    if not np.isfinite(cond) or cond > COND_THRESHOLD:
        raise NotPoisedError(
            f"saddle system condition {cond:.3e} exceeds {COND_THRESHOLD:.1e}",
            condition=cond,
        )
    return Ml, Mq, lu_factor(F), cond


def lagrange_mfn(sample_set: SampleSet):
    """Minimum-norm Lagrange basis for n < p < q.

    Each l_j minimizes the Euclidean norm of its second-order coefficients
    subject to l_j(y^i) = delta_ij.  All p+1 polynomials come from a single
    factorization of the saddle system.
    """
    _check_mfn_shape(sample_set)
    n, p = sample_set.n, sample_set.p
    Ml, Mq, lu, _ = _mfn_factorization(sample_set)
    rhs = np.vstack([np.eye(p + 1), np.zeros((n + 1, p + 1))])
    sol = lu_solve(lu, rhs)
    mult = sol[: p + 1]
    alpha_lin = sol[p + 1 :]
    alpha_quad = Mq.T @ mult
    polys = []
    for j in range(p + 1):
        coeffs = np.concatenate([alpha_lin[:, j], alpha_quad[:, j]])
        polys.append(_pullback(QuadraticPolynomial.from_coeffs(coeffs, n), sample_set))
    return polys


def mfn_lambda_vector(sample_set: SampleSet, x) -> np.ndarray:
    """Weight vector of the minimum-norm interpolant at x.

    Solves the equality-constrained least-squares problem whose solution
    coincides with the vector of minimum-norm Lagrange values at x; its sup
    norm over the ball is the poisedness constant.
    """
    _check_mfn_shape(sample_set)
    p = sample_set.p
    x = np.asarray(x, dtype=float).ravel()
    if x.shape != (sample_set.n,):
        raise ValueError(f"x must have shape ({sample_set.n},), got {x.shape}")
    Ml, Mq, lu, _ = _mfn_factorization(sample_set)
    xh = (x - sample_set.y0) / sample_set.radius
    phi_lin = natural_basis(BasisSelector(2, BasisPart.LINEAR_PART), xh)
    phi_quad = natural_basis(BasisSelector(2, BasisPart.QUADRATIC_PART), xh)
    rhs = np.concatenate([Mq @ phi_quad, phi_lin])
    sol = lu_solve(lu, rhs)
    return sol[: p + 1]


class PoisednessKind(Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    MFN = "mfn"


@dataclass(frozen=True)
class PoisednessCertificate:
    """Measured poisedness constant and the matrix-norm check it implies.

    ``matrix_norm`` is the spectral norm of the inverse (or pseudoinverse)
    of the scaled design matrix for the kind; ``norm_bound`` is the cap that
    the measured constant places on it.
    """

    kind: PoisednessKind
    lam: float
    per_point_max: tuple
    matrix_norm: float
    norm_bound: float
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.name,
            "lambda": self.lam,
            "per_point_max": list(self.per_point_max),
            "matrix_norm": self.matrix_norm,
            "norm_bound": self.norm_bound,
            "satisfied": self.satisfied,
        }


def _lagrange_for_kind(sample_set: SampleSet, kind: PoisednessKind):
    if kind is PoisednessKind.LINEAR:
        return lagrange_determined(sample_set, 1)
    if kind is PoisednessKind.QUADRATIC:
        return lagrange_determined(sample_set, 2)
    if kind is PoisednessKind.MFN:
        return lagrange_mfn(sample_set)
    raise ValueError(f"unknown poisedness kind {kind!r}")


def lambda_poisedness(sample_set: SampleSet, kind: PoisednessKind) -> PoisednessCertificate:
    """Measure the poisedness constant by maximizing each Lagrange polynomial.

    The constant is max_j max_{x in ball} |l_j(x)|, computed exactly by the
    ball extremizer.  The certificate also records the scaled design
    matrix's inverse (or pseudoinverse) norm and the cap implied by the
    measured constant.
    """
    polys = _lagrange_for_kind(sample_set, kind)
    per_point = tuple(
        float(max_abs_on_ball(l, sample_set.y0, sample_set.radius)[0]) for l in polys
    )
    lam = max(per_point)

    n, p = sample_set.n, sample_set.p
    q = space_dim(2, n) - 1
    if kind is PoisednessKind.LINEAR:
        sv = np.linalg.svd(design_matrix(MatrixKind.LIN_SCALED, sample_set), compute_uv=False)
    elif kind is PoisednessKind.QUADRATIC:
        sv = np.linalg.svd(design_matrix(MatrixKind.QUAD_SCALED, sample_set), compute_uv=False)
    else:
        sv = np.linalg.svd(design_matrix(MatrixKind.UNDER_SCALED, sample_set), compute_uv=False)
    smin = float(sv[-1])
    matrix_norm = np.inf if smin == 0.0 else 1.0 / smin
    norm_bound = constants_from_lambda(kind, lam, n=n, p=p, q=q)
    return PoisednessCertificate(
        kind=kind,
        lam=float(lam),
        per_point_max=per_point,
        matrix_norm=float(matrix_norm),
        norm_bound=float(norm_bound),
        satisfied=bool(matrix_norm <= norm_bound + 1e-9),
    )


def _unit_ball_points(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    u = rng.standard_normal((count, n))
    norms = np.linalg.norm(u, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    radii = rng.uniform(size=(count, 1)) ** (1.0 / n)
    return u / norms * radii


def generate_poised_set(
    n: int,
    p: int,
    delta: float,
    lambda_max: float,
    seed: int,
    center=None,
    max_iters: int = 200,
) -> SampleSet:
    """Draw a sample set in the ball and improve it until it certifies.

    Points are drawn uniformly in the unit ball (so the shape of the set is
    the same for every delta at a fixed seed), scaled and translated.  While
    the measured constant exceeds ``lambda_max``, the non-center point whose
    Lagrange polynomial peaks highest is replaced by that polynomial's own
    maximizer; the center stays fixed because it anchors the ball.

    The interpolation kind is inferred from (n, p): p = n is degree 1,
    p = q is degree 2, n < p < q is minimum-norm.
    """
    if lambda_max <= 1.0:
        raise ValueError(f"lambda_max must exceed 1, got {lambda_max}")
    q = space_dim(2, n) - 1
    if p == n:
        kind = PoisednessKind.LINEAR
    elif p == q:
        kind = PoisednessKind.QUADRATIC
    elif n < p < q:
        kind = PoisednessKind.MFN
    else:
        raise ValueError(
            f"p={p} fits no interpolation kind for n={n} (p=n, p={q}, or n<p<{q})"
        )
    delta = float(delta)
    if delta <= 0.0 or not np.isfinite(delta):
        raise ValueError(f"delta must be positive and finite, got {delta}")
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float).ravel()
    if center.shape != (n,):
        raise ValueError(f"center must have shape ({n},), got {center.shape}")

    rng = np.random.default_rng(seed)
    points = np.vstack([center, center + delta * _unit_ball_points(rng, p, n)])
    best = np.inf
    for _ in range(max_iters):
        try:
            sample_set = SampleSet(points, delta)
            polys = _lagrange_for_kind(sample_set, kind)
        except (NotPoisedError, ValueError):
            points = np.vstack(
                [center, center + delta * _unit_ball_points(rng, p, n)]
            )
            continue
        maxima = [max_abs_on_ball(l, center, delta) for l in polys]
        values = np.array([v for v, _ in maxima])
        lam = float(values.max())
        best = min(best, lam)
        if lam <= lambda_max:
            return sample_set
        # Replace the worst non-center point by its polynomial's maximizer.
        j = 1 + int(np.argmax(values[1:]))
        points = points.copy()
        points[j] = maxima[j][1]
    raise RuntimeError(
        f"could not reach lambda <= {lambda_max} in {max_iters} iterations; "
        f"best found {best:.6g}"
    )
