"""Quadratic polynomials over R^n and the natural monomial basis."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "BasisPart",
    "BasisSelector",
    "QuadraticPolynomial",
    "space_dim",
    "natural_basis",
    "basis_matrix",
    "weighted_sum",
]


def space_dim(degree: int, n: int) -> int:
    """Dimension of the space of polynomials of the given degree over R^n."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if degree == 1:
        return n + 1
    if degree == 2:
        return (n * n + 3 * n) // 2 + 1
    raise ValueError(f"degree must be 1 or 2, got {degree}")


class BasisPart(Enum):
    """Slice of the natural monomial basis.

    FULL is 1, x_1..x_n, x_1^2/2, x_1 x_2, ..., x_n^2/2 (or just the affine
    monomials at degree 1).  LINEAR_PART is the affine slice 1, x_1..x_n.
    QUADRATIC_PART is the pure second-order slice.  AFFINE_FREE drops the
    constant from FULL, i.e. x_1..x_n followed by the second-order slice.
    """

    FULL = "full"
    LINEAR_PART = "linear_part"
    QUADRATIC_PART = "quadratic_part"
    AFFINE_FREE = "affine_free"


@dataclass(frozen=True)
class BasisSelector:
    """Selects a slice of the natural basis; degree only matters for FULL."""

    degree: int = 2
    part: BasisPart = BasisPart.FULL

    def __post_init__(self) -> None:
        if self.degree not in (1, 2):
            raise ValueError(f"degree must be 1 or 2, got {self.degree}")
        if not isinstance(self.part, BasisPart):
            raise TypeError(f"part must be a BasisPart, got {self.part!r}")

    def length(self, n: int) -> int:
        """Number of basis functions for dimension n."""
        q = space_dim(2, n) - 1
        if self.part is BasisPart.FULL:
            return space_dim(self.degree, n)
        if self.part is BasisPart.LINEAR_PART:
            return n + 1
        if self.part is BasisPart.QUADRATIC_PART:
            return q - n
        return q


def _second_order_block(X: np.ndarray) -> np.ndarray:
    # Columns ordered x_i^2/2 then x_i x_j (j > i), i ascending.
    m, n = X.shape
    cols = []
    for i in range(n):
        cols.append(0.5 * X[:, i] * X[:, i])
        for j in range(i + 1, n):
            cols.append(X[:, i] * X[:, j])
    if not cols:
        return np.empty((m, 0))
    return np.column_stack(cols)


def basis_matrix(selector: BasisSelector, points: np.ndarray) -> np.ndarray:
    """Evaluate the selected basis at each row of ``points``.

    Returns an array of shape (len(points), selector.length(n)).
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"points must be 2-D, got shape {X.shape}")
    m, n = X.shape
    if n < 1:
        raise ValueError("points must have at least one coordinate")
    part = selector.part
    if part is BasisPart.LINEAR_PART or (
        part is BasisPart.FULL and selector.degree == 1
    ):
        return np.column_stack([np.ones(m), X])
    if part is BasisPart.QUADRATIC_PART:
        return _second_order_block(X)
    if part is BasisPart.AFFINE_FREE:
        return np.column_stack([X, _second_order_block(X)])
    return np.column_stack([np.ones(m), X, _second_order_block(X)])


def natural_basis(selector: BasisSelector, x: np.ndarray) -> np.ndarray:
    """Evaluate the selected basis slice at a single point."""
    x = np.asarray(x, dtype=float).ravel()
    return basis_matrix(selector, x[None, :])[0]


@dataclass(frozen=True, eq=False)
class QuadraticPolynomial:
    """m(x) = constant + gradient . x + x^T hessian x / 2.

    The Hessian is symmetrized on construction and stored symmetrically.
    """

    dim: int
    constant: float
    gradient: np.ndarray
    hessian: np.ndarray

    def __post_init__(self) -> None:
        n = int(self.dim)
        if n < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        c = float(self.constant)
        g = np.array(self.gradient, dtype=float).reshape(-1)
        H = np.array(self.hessian, dtype=float)
        if g.shape != (n,):
            raise ValueError(f"gradient must have shape ({n},), got {g.shape}")
        if H.shape != (n, n):
            raise ValueError(f"hessian must have shape ({n},{n}), got {H.shape}")
        H = 0.5 * (H + H.T)
        g.setflags(write=False)
        H.setflags(write=False)
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "constant", c)
        object.__setattr__(self, "gradient", g)
        object.__setattr__(self, "hessian", H)

    @classmethod
    def zero(cls, n: int) -> "QuadraticPolynomial":
        return cls(n, 0.0, np.zeros(n), np.zeros((n, n)))

    @classmethod
    def from_coeffs(cls, alpha: np.ndarray, n: int) -> "QuadraticPolynomial":
        """Build from coefficients over the FULL degree-2 basis.

        The coefficient of x_i^2/2 is H_ii and the coefficient of x_i x_j is
        H_ij = H_ji, so the stored Hessian reproduces the monomial weights.
        """
        a = np.asarray(alpha, dtype=float).ravel()
        expected = space_dim(2, n)
        if a.shape != (expected,):
            raise ValueError(
                f"expected {expected} coefficients for n={n}, got {a.shape[0]}"
            )
        c = a[0]
        g = a[1 : n + 1].copy()
        H = np.zeros((n, n))
        k = n + 1
        for i in range(n):
            H[i, i] = a[k]
            k += 1
            for j in range(i + 1, n):
                H[i, j] = a[k]
                H[j, i] = a[k]
                k += 1
        return cls(n, c, g, H)

    def coeffs(self) -> np.ndarray:
        """Coefficients over the FULL degree-2 basis (inverse of from_coeffs)."""
        n = self.dim
        out = np.empty(space_dim(2, n))
        out[0] = self.constant
        out[1 : n + 1] = self.gradient
        k = n + 1
        for i in range(n):
            out[k] = self.hessian[i, i]
            k += 1
            for j in range(i + 1, n):
                out[k] = self.hessian[i, j]
                k += 1
        return out

    def _check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.shape != (self.dim,):
            raise ValueError(f"point must have shape ({self.dim},), got {x.shape}")
        return x

    def eval(self, x) -> float:
        x = self._check_point(x)
        return float(self.constant + self.gradient @ x + 0.5 * x @ (self.hessian @ x))

    __call__ = eval

    def grad(self, x) -> np.ndarray:
        x = self._check_point(x)
        return self.gradient + self.hessian @ x

    def eval_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        HX = X @ self.hessian
        return self.constant + X @ self.gradient + 0.5 * np.einsum("ij,ij->i", X, HX)

    def grad_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return self.gradient + X @ self.hessian

    def compose_affine(self, offset, scale: float) -> "QuadraticPolynomial":
        """Polynomial x -> self(offset + scale * x).

        Exact coefficient substitution; used to pull solutions computed on a
        shifted and scaled sample set back to original coordinates.
        """
        o = self._check_point(offset)
        s = float(scale)
        H = (s * s) * self.hessian
        g = s * (self.gradient + self.hessian @ o)
        c = self.eval(o)
        return QuadraticPolynomial(self.dim, c, g, H)

    def __add__(self, other: "QuadraticPolynomial") -> "QuadraticPolynomial":
        if not isinstance(other, QuadraticPolynomial):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return QuadraticPolynomial(
            self.dim,
            self.constant + other.constant,
            self.gradient + other.gradient,
            self.hessian + other.hessian,
        )

    def __sub__(self, other: "QuadraticPolynomial") -> "QuadraticPolynomial":
        if not isinstance(other, QuadraticPolynomial):
            return NotImplemented
        return self + (-1.0) * other

    def __rmul__(self, w: float) -> "QuadraticPolynomial":
        w = float(w)
        return QuadraticPolynomial(
            self.dim, w * self.constant, w * self.gradient, w * self.hessian
        )

    def __neg__(self) -> "QuadraticPolynomial":
        return (-1.0) * self


def weighted_sum(polys, weights) -> QuadraticPolynomial:
    """Linear combination sum_j weights[j] * polys[j]."""
    polys = list(polys)
    w = np.asarray(weights, dtype=float).ravel()
    if not polys:
        raise ValueError("need at least one polynomial")
    if w.shape != (len(polys),):
        raise ValueError(f"expected {len(polys)} weights, got {w.shape[0]}")
    n = polys[0].dim
    c = 0.0
    g = np.zeros(n)
    H = np.zeros((n, n))
    for wj, pj in zip(w, polys):
        if pj.dim != n:
            raise ValueError("dimension mismatch among polynomials")
        c += wj * pj.constant
        g += wj * pj.gradient
        H += wj * pj.hessian
    return QuadraticPolynomial(n, c, g, H)
