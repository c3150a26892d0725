import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfobounds import (
    ModelKind,
    NotPoisedError,
    QuadraticPolynomial,
    RelaxationError,
    RelaxationSpec,
    SampleSet,
    fit_model,
    fit_relaxed,
    generate_poised_set,
    interpolation_residual,
    space_dim,
)

from conftest import random_quadratic


def coeff_scale(poly):
    return max(1.0, float(np.max(np.abs(poly.coeffs()))))


class TestDeterminedFits:
    def test_linear_reproduces_affine(self, rng):
        ss = generate_poised_set(3, 3, 0.5, 10.0, seed=0)
        g = rng.standard_normal(3)
        f = QuadraticPolynomial(3, 1.5, g, np.zeros((3, 3)))
        fit = fit_model(ModelKind.LIN_DET, ss, f.eval_batch(ss.points))
        assert np.allclose(fit.model.constant, 1.5, atol=1e-10)
        assert np.allclose(fit.model.gradient, g, atol=1e-10)
        assert np.allclose(fit.model.hessian, 0.0)
        assert fit.residual <= 1e-10

    def test_quadratic_reproduces_quadratic(self, rng):
        q = space_dim(2, 2) - 1
        ss = generate_poised_set(2, q, 0.7, 20.0, seed=3)
        target = random_quadratic(rng, 2)
        fit = fit_model(ModelKind.QUAD_DET, ss, target.eval_batch(ss.points))
        assert np.max(np.abs(fit.model.coeffs() - target.coeffs())) <= 1e-7 * coeff_scale(target)

    def test_condition_reported(self):
        ss = generate_poised_set(2, 2, 0.5, 10.0, seed=1)
        fit = fit_model(ModelKind.LIN_DET, ss, np.ones(3))
        assert np.isfinite(fit.condition) and fit.condition >= 1.0

    def test_not_poised_raises(self):
        collinear = SampleSet(np.array([[0.0, 0.0], [0.4, 0.0], [0.9, 0.0]]), 1.0)
        with pytest.raises(NotPoisedError):
            fit_model(ModelKind.LIN_DET, collinear, np.zeros(3))

    def test_cardinality_guard(self, cross_set):
        with pytest.raises(ValueError):
            fit_model(ModelKind.LIN_DET, cross_set, np.zeros(5))

    def test_value_length_guard(self, simplex_set):
        with pytest.raises(ValueError):
            fit_model(ModelKind.LIN_DET, simplex_set, np.zeros(5))
        with pytest.raises(ValueError):
            fit_model(ModelKind.LIN_DET, simplex_set, np.array([1.0, np.inf, 0.0]))


class TestMfnFits:
    def test_cross_product_recovery(self, cross_set):
        values = cross_set.points[:, 0] * cross_set.points[:, 1]
        fit = fit_model(ModelKind.MFN, cross_set, values)
        assert np.max(np.abs(fit.model.hessian - [[0.0, 1.0], [1.0, 0.0]])) <= 1e-10
        assert abs(fit.model.constant) <= 1e-10
        assert np.max(np.abs(fit.model.gradient)) <= 1e-10

    def test_affine_recovery(self, rng):
        # an affine interpolant is feasible with zero quadratic block, so the
        # minimum-norm solution returns it exactly
        ss = generate_poised_set(3, 5, 0.6, 20.0, seed=8)
        g = rng.standard_normal(3)
        f = QuadraticPolynomial(3, -0.3, g, np.zeros((3, 3)))
        fit = fit_model(ModelKind.MFN, ss, f.eval_batch(ss.points))
        assert np.max(np.abs(fit.model.hessian)) <= 1e-8
        assert np.allclose(fit.model.gradient, g, atol=1e-8)
        assert np.isclose(fit.model.constant, -0.3, atol=1e-8)

    def test_interpolates(self, rng):
        ss = generate_poised_set(2, 4, 0.5, 20.0, seed=4)
        values = rng.standard_normal(5)
        fit = fit_model(ModelKind.MFN, ss, values)
        assert interpolation_residual(fit.model, ss, values) <= 1e-9

    def test_quadratic_block_minimality(self, rng):
        # adding any interpolant of zero data cannot shrink the quadratic
        # coefficient block, and the optimum is orthogonal to that null space
        ss = generate_poised_set(2, 4, 0.5, 20.0, seed=12)
        values = rng.standard_normal(5)
        fit = fit_model(ModelKind.MFN, ss, values)
        n1 = ss.n + 1
        alpha_opt = fit.model.coeffs()[n1:]
        for _ in range(10):
            z = random_quadratic(rng, 2)
            null_fit = fit_model(ModelKind.MFN, ss, z.eval_batch(ss.points))
            null_dir = z - null_fit.model
            assert interpolation_residual(null_dir, ss, np.zeros(5)) <= 1e-8
            alpha_null = null_dir.coeffs()[n1:]
            combined = np.linalg.norm(alpha_opt + alpha_null)
            assert combined >= np.linalg.norm(alpha_opt) - 1e-10
            assert abs(alpha_opt @ alpha_null) <= 1e-8 * max(
                1.0, np.linalg.norm(alpha_opt) * np.linalg.norm(alpha_null)
            )

    def test_shift_scale_equivariance(self, rng):
        # fitting translated and dilated data gives the pullback model
        ss = generate_poised_set(2, 4, 0.5, 20.0, seed=2)
        values = rng.standard_normal(5)
        fit = fit_model(ModelKind.MFN, ss, values)
        shift = np.array([10.0, -3.0])
        moved = SampleSet(ss.points + shift, ss.radius)
        fit2 = fit_model(ModelKind.MFN, moved, values)
        x = rng.standard_normal(2)
        assert np.isclose(fit.model(x), fit2.model(x + shift), atol=1e-8)


class TestRelaxedFits:
    def test_envelope_respected(self, rng):
        ss = generate_poised_set(2, 4, 0.5, 20.0, seed=5)
        values = rng.standard_normal(5)
        kappa = 0.3
        spec = RelaxationSpec(kappa=kappa, noise_seed=7)
        fit = fit_relaxed(ModelKind.MFN, ss, values, spec)
        # the model interpolates surrogate values within kappa * delta^2
        assert fit.residual <= kappa * ss.radius**2 * (1 + 1e-9) + 1e-12

    def test_explicit_gamma(self, cross_set):
        values = np.array([0.0, 0.0, 0.0, 1.0])
        gamma = values + np.array([0.001, -0.001, 0.0005, 0.0])
        spec = RelaxationSpec(kappa=0.001, gamma=gamma)
        fit = fit_relaxed(ModelKind.MFN, cross_set, values, spec)
        assert interpolation_residual(fit.model, cross_set, gamma) <= 1e-9

    def test_violating_gamma_raises_with_index(self, cross_set):
        values = np.array([0.0, 0.0, 0.0, 1.0])
        gamma = values.copy()
        gamma[2] += 10.0
        with pytest.raises(RelaxationError) as err:
            fit_relaxed(
                ModelKind.MFN, cross_set, values, RelaxationSpec(kappa=0.01, gamma=gamma)
            )
        assert err.value.index == 2
        assert "2" in str(err.value)

    def test_noise_seed_deterministic(self, rng):
        ss = generate_poised_set(2, 5, 0.5, 20.0, seed=9)
        values = rng.standard_normal(6)
        a = fit_relaxed(ModelKind.QUAD_DET, ss, values, RelaxationSpec(0.1, noise_seed=3))
        b = fit_relaxed(ModelKind.QUAD_DET, ss, values, RelaxationSpec(0.1, noise_seed=3))
        c = fit_relaxed(ModelKind.QUAD_DET, ss, values, RelaxationSpec(0.1, noise_seed=4))
        assert np.array_equal(a.model.coeffs(), b.model.coeffs())
        assert not np.allclose(a.model.coeffs(), c.model.coeffs())

    def test_zero_kappa_matches_exact_fit(self, rng):
        ss = generate_poised_set(2, 4, 0.5, 20.0, seed=10)
        values = rng.standard_normal(5)
        exact = fit_model(ModelKind.MFN, ss, values)
        relaxed = fit_relaxed(ModelKind.MFN, ss, values, RelaxationSpec(0.0))
        assert np.allclose(relaxed.model.coeffs(), exact.model.coeffs(), atol=1e-9)

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            RelaxationSpec(kappa=-0.1)
        with pytest.raises(ValueError):
            RelaxationSpec(kappa=0.1, gamma=np.array([np.nan]))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_lin_det_recovery_property(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    ss = generate_poised_set(n, n, 0.5, 25.0, seed=seed)
    f = QuadraticPolynomial(
        n, float(rng.standard_normal()), rng.standard_normal(n), np.zeros((n, n))
    )
    fit = fit_model(ModelKind.LIN_DET, ss, f.eval_batch(ss.points))
    assert np.max(np.abs(fit.model.coeffs() - f.coeffs())) <= 1e-8 * coeff_scale(f)
