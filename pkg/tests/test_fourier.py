import numpy as np
import pytest
from scipy import integrate

from qrff.fourier import (
    NormComputationError,
    compute_norms,
    gaussian_model,
    get_model,
    laplace_model,
    reconstruct_f,
    shifted_gaussian_model,
)
from qrff.rng import make_rng
from qrff.sampling import cauchy_density


class TestGaussianModel:
    def test_l1_is_one(self):
        report = compute_norms(gaussian_model(1))
        assert report.l1 == pytest.approx(1.0, abs=1e-9)

    def test_l1_quadrature_agrees(self):
        report = compute_norms(gaussian_model(1), prefer_closed_form=False)
        assert report.l1 == pytest.approx(1.0, abs=1e-8)
        assert report.method == "quadrature"

    def test_b2_against_quadrature_oracle(self):
        oracle, _ = integrate.quad(lambda s: s * s * np.exp(-np.pi * s * s), -20, 20)
        report = compute_norms(gaussian_model(1))
        assert report.b2 == pytest.approx(np.sqrt(oracle), abs=1e-9)
        quad_report = compute_norms(gaussian_model(1), include_b2=True,
                                    prefer_closed_form=False)
        assert quad_report.b2 == pytest.approx(np.sqrt(oracle), abs=1e-8)

    def test_self_dual_in_2d(self):
        model = gaussian_model(2)
        xi = np.array([[0.3, -0.5], [1.0, 0.2]])
        expected = np.exp(-np.pi * np.sum(xi**2, axis=1))
        np.testing.assert_allclose(model.eval_fhat(xi), expected, atol=1e-15)

    def test_l1_in_2d_by_quadrature(self):
        report = compute_norms(gaussian_model(2), prefer_closed_form=False)
        assert report.l1 == pytest.approx(1.0, abs=1e-5)


class TestLaplaceModel:
    def test_fhat_at_zero(self):
        # quadrature oracle: integral of exp(-2*pi*|x|) is 1/pi
        oracle, _ = integrate.quad(lambda s: np.exp(-2 * np.pi * abs(s)), -30, 30)
        model = laplace_model()
        assert model.eval_fhat(np.array([[0.0]]))[0].real == pytest.approx(oracle, abs=1e-10)

    def test_l1_by_quadrature(self):
        report = compute_norms(laplace_model(), prefer_closed_form=False)
        assert report.l1 == pytest.approx(1.0, abs=1e-6)

    def test_inversion_at_zero(self):
        assert reconstruct_f(laplace_model(), 0.0, tol=1e-9) == pytest.approx(1.0, abs=1e-6)

    def test_b2_diverges(self):
        with pytest.raises(NormComputationError, match="b2"):
            compute_norms(laplace_model(), include_b2=True)


class TestHermitianSymmetry:
    @pytest.mark.parametrize("model", [gaussian_model(1), laplace_model(),
                                       shifted_gaussian_model(1.0), gaussian_model(2)])
    def test_fhat_conjugate_symmetry(self, model):
        rng = make_rng(0)
        xi = rng.normal(scale=2.0, size=(100, model.dim))
        plus = model.eval_fhat(xi)
        minus = model.eval_fhat(-xi)
        np.testing.assert_allclose(minus, np.conj(plus), atol=1e-10)


class TestInversion:
    @pytest.mark.parametrize("model", [gaussian_model(1), laplace_model(),
                                       shifted_gaussian_model(0.7)])
    def test_reconstruction_matches_f(self, model):
        rng = make_rng(1)
        for x in rng.uniform(-1.5, 1.5, size=10):
            direct = model.eval_f(np.array([[x]]))[0]
            assert reconstruct_f(model, x) == pytest.approx(direct, abs=1e-6)


class TestL2Bar:
    def test_laplace_cauchy_is_exactly_two(self):
        # |fhat|^2/density = (1/pi)/(1+s^2), integrating to 1; times 2 gives 2
        report = compute_norms(laplace_model(), density=cauchy_density(1))
        assert report.l2bar**2 == pytest.approx(2.0, abs=1e-6)

    def test_gaussian_cauchy_against_oracle(self):
        oracle, _ = integrate.quad(
            lambda s: 2 * np.pi * (1 + s * s) * np.exp(-2 * np.pi * s * s), -20, 20
        )
        report = compute_norms(gaussian_model(1), density=cauchy_density(1))
        assert report.l2bar**2 == pytest.approx(oracle, abs=1e-8)


class TestModelRegistry:
    def test_get_model(self):
        assert get_model("gaussian", 2).dim == 2
        assert get_model("laplace").name == "laplace"

    def test_unknown_model(self):
        with pytest.raises(ValueError, match="unknown model"):
            get_model("nope")

    def test_laplace_rejects_high_dim(self):
        with pytest.raises(ValueError, match="one-dimensional"):
            get_model("laplace", dim=2)


class TestNormReport:
    def test_rejects_negative(self):
        from qrff.fourier import NormReport
        with pytest.raises(ValueError):
            NormReport(l1=-1.0, b2=None, l2bar=None, method="closed-form", tolerance=1e-9)
