import numpy as np
import pytest

from dfobounds import QuadraticPolynomial


def random_quadratic(rng, n, scale=1.0):
    """A random quadratic polynomial with symmetric Hessian."""
    B = rng.standard_normal((n, n)) * scale
    return QuadraticPolynomial(
        n,
        float(rng.standard_normal()) * scale,
        rng.standard_normal(n) * scale,
        0.5 * (B + B.T),
    )


def fd_gradient(f, x, h=1e-6):
    """Central-difference gradient of a scalar callable."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def simplex_set():
    from dfobounds import SampleSet

    points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    return SampleSet(points, 1.0)


@pytest.fixture
def cross_set():
    """Four points whose product values isolate the x1*x2 monomial."""
    from dfobounds import SampleSet

    points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    return SampleSet(points, np.sqrt(2.0))
