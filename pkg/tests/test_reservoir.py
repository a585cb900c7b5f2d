import numpy as np
import pytest

from qrff.fourier import gaussian_model, laplace_model
from qrff.identities import random_draw
from qrff.reservoir import (
    AbsoluteContinuityError,
    RankDeficiencyError,
    ReservoirCircuit,
    block_probability_pairs,
    feature_matrix,
    features,
    features_closed_form,
    fit_readout,
    load_dataset,
    optimal_weights,
    predict,
    save_dataset,
    training_rmse,
)
from qrff.rng import make_rng
from qrff.sampling import ReservoirDraw, cauchy_density, sample_reservoir


def circuit_from(a, b):
    return ReservoirCircuit(ReservoirDraw(np.asarray(a, float), np.asarray(b), seed=-1))


class TestFeatures:
    def test_zero_weights_give_unit_feature(self):
        circ = circuit_from([[0.0]], [0])
        np.testing.assert_allclose(features(circ, np.array([1.7])), [1.0], atol=1e-14)

    def test_half_frequency_gives_minus_one(self):
        circ = circuit_from([[0.5]], [0])
        np.testing.assert_allclose(features(circ, np.array([1.0])), [-1.0], atol=1e-12)

    def test_bounded_by_inverse_n(self):
        rng = make_rng(0)
        for _ in range(30):
            n = int(rng.integers(1, 9))
            circ = ReservoirCircuit(random_draw(rng, n, 2))
            phi = features(circ, rng.normal(size=2))
            assert np.max(np.abs(phi)) <= 1.0 / n + 1e-14

    def test_statevector_matches_closed_form(self):
        rng = make_rng(1)
        for _ in range(25):
            n = int(rng.integers(1, 9))
            d = int(rng.integers(1, 4))
            circ = ReservoirCircuit(random_draw(rng, n, d))
            x = rng.normal(size=d)
            np.testing.assert_allclose(
                features(circ, x), features_closed_form(circ, x)[0], atol=1e-12
            )

    def test_feature_matrix_methods_agree(self):
        rng = make_rng(2)
        circ = ReservoirCircuit(random_draw(rng, 5, 2))
        xs = rng.normal(size=(10, 2))
        np.testing.assert_allclose(
            feature_matrix(circ, xs, "statevector"),
            feature_matrix(circ, xs, "closed-form"),
            atol=1e-12,
        )

    def test_unknown_method(self):
        circ = circuit_from([[0.0]], [0])
        with pytest.raises(ValueError, match="method"):
            feature_matrix(circ, np.zeros((1, 1)), "magic")


class TestBlockPairs:
    def test_pair_sums_equal_inverse_n(self):
        rng = make_rng(3)
        circ = ReservoirCircuit(random_draw(rng, 2, 1))
        pairs = block_probability_pairs(circ, rng.normal(size=1))
        np.testing.assert_allclose(pairs.sum(axis=1), [0.5, 0.5], atol=1e-12)

    def test_odd_entry_closed_form(self):
        rng = make_rng(4)
        for _ in range(10):
            n = int(rng.integers(1, 6))
            circ = ReservoirCircuit(random_draw(rng, n, 1))
            x = rng.normal(size=1)
            pairs = block_probability_pairs(circ, x)
            angles = (np.pi / 2) * circ.draw.b + 2 * np.pi * circ.draw.a[:, 0] * x[0]
            np.testing.assert_allclose(
                pairs[:, 1], np.sin(angles / 2) ** 2 / n, atol=1e-12
            )

    def test_all_outcomes_sum_to_one(self):
        rng = make_rng(5)
        circ = ReservoirCircuit(random_draw(rng, 3, 1))
        pairs = block_probability_pairs(circ, rng.normal(size=1))
        assert pairs.sum() == pytest.approx(1.0, abs=1e-12)


class TestOptimalWeights:
    def test_imaginary_branch_is_zero_for_real_transform(self):
        model = gaussian_model(1)
        draw = ReservoirDraw(np.array([[0.3], [1.2]]), np.array([1, 1]), seed=-1)
        w = optimal_weights(draw, model, cauchy_density(1))
        np.testing.assert_allclose(w.w, 0.0, atol=1e-15)

    def test_value_at_origin(self):
        # density(0) = 1/pi, fhat(0) = 1, B = 0  ->  w = 2 / (1/pi) = 2*pi
        model = gaussian_model(1)
        draw = ReservoirDraw(np.array([[0.0]]), np.array([0]), seed=-1)
        w = optimal_weights(draw, model, cauchy_density(1))
        assert w.w[0] == pytest.approx(2 * np.pi, abs=1e-12)

    def test_monte_carlo_unbiased(self):
        model = gaussian_model(1)
        density = cauchy_density(1)
        x = np.array([[0.3]])
        target = model.eval_f(x)[0]
        n, seeds = 4, 2000
        vals = np.empty(seeds)
        for k in range(seeds):
            draw = sample_reservoir(density, n, 1, seed=(53, k))
            w = optimal_weights(draw, model, density)
            circ = ReservoirCircuit(draw)
            vals[k] = predict(circ, w, x, method="closed-form")[0]
        se = vals.std(ddof=1) / np.sqrt(seeds)
        assert abs(vals.mean() - target) <= 4 * se

    def test_provenance(self):
        model = gaussian_model(1)
        draw = sample_reservoir(cauchy_density(1), 3, 1, seed=1)
        assert optimal_weights(draw, model, cauchy_density(1)).provenance == "optimal-analytic"


class TestFitReadout:
    def test_recovers_generating_weights(self):
        rng = make_rng(6)
        circ = ReservoirCircuit(random_draw(rng, 6, 1))
        w_star = rng.normal(size=6)
        xs = rng.uniform(-2, 2, size=(40, 1))
        ys = feature_matrix(circ, xs, "closed-form") @ w_star
        fitted = fit_readout(circ, xs, ys, ridge=0.0, method="closed-form")
        np.testing.assert_allclose(fitted.w, w_star, atol=1e-8)

    def test_zero_targets_zero_weights(self):
        rng = make_rng(7)
        circ = ReservoirCircuit(random_draw(rng, 4, 1))
        xs = rng.uniform(-1, 1, size=(20, 1))
        for ridge in (0.0, 1e-6, None):
            fitted = fit_readout(circ, xs, np.zeros(20), ridge=ridge, method="closed-form")
            np.testing.assert_allclose(fitted.w, 0.0, atol=1e-10)

    def test_never_worse_than_optimal_weights_on_training_data(self):
        model = gaussian_model(1)
        density = cauchy_density(1)
        rng = make_rng(8)
        for seed in range(5):
            draw = sample_reservoir(density, 16, 1, seed=(59, seed))
            circ = ReservoirCircuit(draw)
            xs = rng.uniform(-2, 2, size=(128, 1))
            ys = model.eval_f(xs)
            fitted = fit_readout(circ, xs, ys, ridge=0.0, method="closed-form")
            analytic = optimal_weights(draw, model, density)
            assert (training_rmse(circ, fitted, xs, ys, "closed-form")
                    <= training_rmse(circ, analytic, xs, ys, "closed-form") + 1e-12)

    def test_rank_deficiency_raises(self):
        # duplicate frequency rows make the design singular at ridge 0
        circ = circuit_from([[1.0], [1.0]], [0, 0])
        xs = np.array([[0.1], [0.7], [-0.4]])
        ys = np.array([0.5, 0.2, 0.1])
        with pytest.raises(RankDeficiencyError, match="rank"):
            fit_readout(circ, xs, ys, ridge=0.0, method="closed-form")
        fitted = fit_readout(circ, xs, ys, ridge=1e-8, method="closed-form")
        assert np.all(np.isfinite(fitted.w))

    def test_fewer_samples_than_features_raises_at_zero_ridge(self):
        rng = make_rng(9)
        circ = ReservoirCircuit(random_draw(rng, 8, 1))
        xs = rng.uniform(-1, 1, size=(3, 1))
        with pytest.raises(RankDeficiencyError):
            fit_readout(circ, xs, np.ones(3), ridge=0.0, method="closed-form")

    def test_negative_ridge_rejected(self):
        circ = circuit_from([[1.0]], [0])
        with pytest.raises(ValueError, match="ridge"):
            fit_readout(circ, np.zeros((1, 1)), np.zeros(1), ridge=-1.0)

    def test_mismatched_lengths(self):
        circ = circuit_from([[1.0]], [0])
        with pytest.raises(ValueError, match="targets"):
            fit_readout(circ, np.zeros((3, 1)), np.zeros(2))


class TestAbsoluteContinuity:
    def test_zero_density_at_live_frequency(self):
        class BoxDensity:
            dim = 1

            def density(self, xi):
                xi = np.atleast_2d(xi)
                return np.where(np.abs(xi[:, 0]) <= 1.0, 0.5, 0.0)

        model = gaussian_model(1)
        draw = ReservoirDraw(np.array([[3.0]]), np.array([0]), seed=-1)
        with pytest.raises(AbsoluteContinuityError, match="vanishes"):
            optimal_weights(draw, model, BoxDensity())


class TestDatasetIO:
    def test_roundtrip(self, tmp_path):
        rng = make_rng(10)
        xs = rng.normal(size=(12, 3))
        ys = rng.normal(size=12)
        path = tmp_path / "data.csv"
        save_dataset(path, xs, ys)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert header == "x1,x2,x3,y"
        xs2, ys2 = load_dataset(path)
        np.testing.assert_allclose(xs2, xs, atol=1e-15)
        np.testing.assert_allclose(ys2, ys, atol=1e-15)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n", encoding="utf-8")
        with pytest.raises(ValueError, match="header"):
            load_dataset(path)

    def test_target_function_dataset(self, tmp_path):
        model = laplace_model()
        xs = np.linspace(-1, 1, 9).reshape(-1, 1)
        path = tmp_path / "laplace.csv"
        save_dataset(path, xs, model.eval_f(xs))
        xs2, ys2 = load_dataset(path)
        np.testing.assert_allclose(ys2, model.eval_f(xs2), atol=1e-15)
