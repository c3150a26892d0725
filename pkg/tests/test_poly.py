import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfobounds import (
    BasisPart,
    BasisSelector,
    QuadraticPolynomial,
    basis_matrix,
    natural_basis,
    space_dim,
    weighted_sum,
)

from conftest import fd_gradient, random_quadratic


@pytest.mark.parametrize(
    "degree,n,expected",
    [(1, 1, 2), (1, 4, 5), (2, 1, 3), (2, 2, 6), (2, 3, 10), (2, 5, 21)],
)
def test_space_dim(degree, n, expected):
    assert space_dim(degree, n) == expected


def test_natural_basis_order_n2():
    # column order is frozen: 1, x1, x2, x1^2/2, x1*x2, x2^2/2
    x = np.array([2.0, 3.0])
    phi = natural_basis(BasisSelector(2, BasisPart.FULL), x)
    assert np.allclose(phi, [1.0, 2.0, 3.0, 2.0, 6.0, 4.5])


def test_natural_basis_order_n3_cross_terms():
    # cross terms iterate as x1x2, x1x3, x2x3 between the halved squares
    x = np.array([2.0, 3.0, 5.0])
    phi = natural_basis(BasisSelector(2, BasisPart.FULL), x)
    expected = [1.0, 2.0, 3.0, 5.0, 2.0, 6.0, 10.0, 4.5, 15.0, 12.5]
    assert np.allclose(phi, expected)


def test_basis_parts_are_slices_of_full():
    x = np.array([0.7, -1.2, 0.4])
    full = natural_basis(BasisSelector(2, BasisPart.FULL), x)
    lin = natural_basis(BasisSelector(2, BasisPart.LINEAR_PART), x)
    quad = natural_basis(BasisSelector(2, BasisPart.QUADRATIC_PART), x)
    free = natural_basis(BasisSelector(2, BasisPart.AFFINE_FREE), x)
    n = 3
    assert np.allclose(lin, full[: n + 1])
    assert np.allclose(quad, full[n + 1 :])
    assert np.allclose(free, full[1:])


def test_selector_lengths():
    n = 4
    q1 = space_dim(2, n)
    assert BasisSelector(2, BasisPart.FULL).length(n) == q1
    assert BasisSelector(2, BasisPart.LINEAR_PART).length(n) == n + 1
    assert BasisSelector(2, BasisPart.QUADRATIC_PART).length(n) == q1 - n - 1
    assert BasisSelector(2, BasisPart.AFFINE_FREE).length(n) == q1 - 1
    assert BasisSelector(1, BasisPart.FULL).length(n) == n + 1


def test_basis_matrix_rows_match_pointwise(rng):
    pts = rng.standard_normal((7, 3))
    for part in BasisPart:
        sel = BasisSelector(2, part)
        M = basis_matrix(sel, pts)
        assert M.shape == (7, sel.length(3))
        for i, x in enumerate(pts):
            assert np.allclose(M[i], natural_basis(sel, x))


def test_coeff_roundtrip(rng):
    for n in (1, 2, 3, 5):
        m = random_quadratic(rng, n)
        m2 = QuadraticPolynomial.from_coeffs(m.coeffs(), n)
        assert np.allclose(m2.constant, m.constant)
        assert np.allclose(m2.gradient, m.gradient)
        assert np.allclose(m2.hessian, m.hessian)


def test_eval_equals_coeff_dot_basis(rng):
    # the two evaluation routes (c + g.x + x'Hx/2 versus coeffs . basis)
    # must agree, pinning the coefficient <-> Hessian mapping
    for n in (1, 2, 4):
        m = random_quadratic(rng, n)
        sel = BasisSelector(2, BasisPart.FULL)
        for _ in range(10):
            x = rng.standard_normal(n)
            assert np.isclose(m(x), float(m.coeffs() @ natural_basis(sel, x)))


def test_halved_square_convention():
    # the coefficient of x_i^2/2 is H_ii itself
    m = QuadraticPolynomial.from_coeffs(np.array([0.0, 0.0, 0.0, 4.0, 0.0, 0.0]), 2)
    assert np.isclose(m.hessian[0, 0], 4.0)
    assert np.isclose(m(np.array([1.0, 0.0])), 2.0)


def test_asymmetric_hessian_is_symmetrized():
    m = QuadraticPolynomial(2, 0.0, np.zeros(2), np.array([[0.0, 2.0], [0.0, 0.0]]))
    assert np.allclose(m.hessian, [[0.0, 1.0], [1.0, 0.0]])
    assert np.isclose(m(np.array([1.0, 1.0])), 1.0)


def test_arrays_read_only(rng):
    m = random_quadratic(rng, 2)
    with pytest.raises(ValueError):
        m.gradient[0] = 1.0
    with pytest.raises(ValueError):
        m.hessian[0, 0] = 1.0


def test_batch_eval_matches_scalar(rng):
    m = random_quadratic(rng, 3)
    X = rng.standard_normal((20, 3))
    assert np.allclose(m.eval_batch(X), [m(x) for x in X])
    G = m.grad_batch(X)
    for i, x in enumerate(X):
        assert np.allclose(G[i], m.grad(x))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 4))
def test_gradient_finite_difference(seed, n):
    rng = np.random.default_rng(seed)
    m = random_quadratic(rng, n)
    x = rng.standard_normal(n)
    fd = fd_gradient(m, x)
    assert np.allclose(m.grad(x), fd, atol=1e-5, rtol=1e-5)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_compose_affine_pointwise(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    m = random_quadratic(rng, n)
    offset = rng.standard_normal(n)
    scale = float(rng.uniform(0.1, 3.0))
    composed = m.compose_affine(offset, scale)
    for _ in range(5):
        x = rng.standard_normal(n)
        assert np.isclose(composed(x), m(offset + scale * x), rtol=1e-10, atol=1e-10)


def test_compose_affine_roundtrip(rng):
    m = random_quadratic(rng, 3)
    offset = rng.standard_normal(3)
    scale = 0.25
    back = m.compose_affine(offset, scale).compose_affine(-offset / scale, 1.0 / scale)
    assert np.allclose(back.coeffs(), m.coeffs(), atol=1e-12)


def test_arithmetic_operators(rng):
    m1 = random_quadratic(rng, 2)
    m2 = random_quadratic(rng, 2)
    x = rng.standard_normal(2)
    assert np.isclose((m1 + m2)(x), m1(x) + m2(x))
    assert np.isclose((m1 - m2)(x), m1(x) - m2(x))
    assert np.isclose((2.5 * m1)(x), 2.5 * m1(x))
    assert np.isclose((-m1)(x), -m1(x))


def test_weighted_sum(rng):
    polys = [random_quadratic(rng, 2) for _ in range(4)]
    w = rng.standard_normal(4)
    combo = weighted_sum(polys, w)
    x = rng.standard_normal(2)
    assert np.isclose(combo(x), sum(wi * p(x) for wi, p in zip(w, polys)))


def test_zero_polynomial():
    z = QuadraticPolynomial.zero(3)
    assert z(np.ones(3)) == 0.0
    assert np.allclose(z.coeffs(), 0.0)


def test_dimension_mismatch_raises(rng):
    m = random_quadratic(rng, 2)
    with pytest.raises(ValueError):
        m(np.ones(3))
