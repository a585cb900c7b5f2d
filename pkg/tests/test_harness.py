import numpy as np
import pytest

from qrff.harness import (
    ConfigError,
    ErrorMeasure,
    ExperimentConfig,
    fit_loglog_slope,
    l2_error,
    load_measure_file,
    parse_config,
    records_to_csv,
    run_scaling_experiment,
    strip_timing,
    sup_error,
    summarize,
    CSV_COLUMNS,
)


class TestErrorMeasure:
    def test_uniform_range_and_shape(self):
        mu = ErrorMeasure("uniform", dim=2, half_width=1.5)
        xs = mu.sample(500, seed=0)
        assert xs.shape == (500, 2)
        assert np.all(np.abs(xs) <= 1.5)

    def test_gaussian(self):
        xs = ErrorMeasure("gaussian", dim=1).sample(4000, seed=1)
        assert abs(xs.mean()) < 0.1 and abs(xs.std() - 1) < 0.1

    def test_dirac_mixture(self):
        mu = ErrorMeasure("dirac", points=np.array([[0.0], [1.0]]),
                          weights=np.array([0.25, 0.75]))
        xs = mu.sample(8000, seed=2)
        assert set(np.unique(xs)) == {0.0, 1.0}
        assert abs((xs == 1.0).mean() - 0.75) < 0.03

    def test_dirac_weights_must_sum_to_one(self):
        with pytest.raises(ConfigError, match="weights"):
            ErrorMeasure("dirac", points=np.array([[0.0]]), weights=np.array([0.5]))

    def test_unknown_kind(self):
        with pytest.raises(ConfigError, match="kind"):
            ErrorMeasure("lebesgue")

    def test_measure_file(self, tmp_path):
        path = tmp_path / "points.csv"
        path.write_text("x1,w\n0.0,1\n2.0,3\n", encoding="utf-8")
        mu = load_measure_file(path)
        xs = mu.sample(4000, seed=3)
        assert abs((xs == 2.0).mean() - 0.75) < 0.03


class TestL2Error:
    def test_identical_functions(self):
        mu = ErrorMeasure("uniform")
        est, se = l2_error(lambda x: x[:, 0], lambda x: x[:, 0], mu, 100, seed=0)
        assert est == 0.0 and se == 0.0

    def test_constant_offset(self):
        mu = ErrorMeasure("uniform")
        est, se = l2_error(lambda x: x[:, 0], lambda x: x[:, 0] + 0.3, mu, 2000, seed=1)
        assert abs(est - 0.3) <= max(3 * se, 1e-12)

    def test_linear_difference_oracle(self):
        # |a x| has L2(uniform[-1,1]) norm a/sqrt(3)
        mu = ErrorMeasure("uniform")
        est, se = l2_error(lambda x: 2.0 * x[:, 0], lambda x: np.zeros(len(x)),
                           mu, 40_000, seed=2)
        assert abs(est - 2 / np.sqrt(3)) <= 4 * se


class TestSupError:
    def test_identical(self):
        assert sup_error(lambda x: x[:, 0], lambda x: x[:, 0], 1.0, 101) == 0.0

    def test_constant_offset_exact(self):
        got = sup_error(lambda x: x[:, 0], lambda x: x[:, 0] - 0.7, 1.0, 101)
        assert got == pytest.approx(0.7, abs=1e-15)

    def test_refinement_monotone(self):
        fa = lambda x: np.sin(7 * x[:, 0])
        fb = lambda x: np.zeros(len(x))
        coarse = sup_error(fa, fb, 1.0, 51)
        fine = sup_error(fa, fb, 1.0, 101)
        assert fine >= coarse

    def test_2d_grid(self):
        fa = lambda x: x[:, 0] * x[:, 1]
        fb = lambda x: np.zeros(len(x))
        assert sup_error(fa, fb, 1.0, 41, dim=2) == pytest.approx(1.0, abs=1e-12)


class TestSlopeFit:
    def test_exact_power_law(self):
        ns = np.array([4, 16, 64, 256])
        vals = 3.0 / np.sqrt(ns)
        assert fit_loglog_slope(ns, vals) == pytest.approx(-0.5, abs=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            fit_loglog_slope(np.array([1, 2]), np.array([0.0, 1.0]))


class TestConfig:
    def test_defaults_valid(self):
        cfg = parse_config({})
        assert cfg.mode == "trainable" and cfg.schema_version == 1

    def test_roundtrip_through_dict(self):
        cfg = parse_config({"mode": "reservoir-optimal", "n_values": [8, 32],
                            "density": "t3", "num_seeds": 5})
        again = parse_config(cfg.to_dict())
        assert again.n_values == (8, 32) and again.density == "t3"

    @pytest.mark.parametrize("raw,field", [
        ({"mode": "quantum"}, "mode"),
        ({"model": "bessel"}, "model"),
        ({"n_values": []}, "n_values"),
        ({"n_values": [0]}, "n_values"),
        ({"num_seeds": 0}, "num_seeds"),
        ({"density": "weibull"}, "density"),
        ({"schema_version": 99}, "schema_version"),
        ({"measure": {"kind": "file"}}, "measure.file"),
    ])
    def test_validation_names_field(self, raw, field):
        with pytest.raises(ConfigError, match=field.split(".")[0]):
            parse_config(raw)


def tiny_config(**overrides):
    raw = {
        "experiment_id": "tiny",
        "mode": "trainable",
        "model": "gaussian",
        "n_values": [4, 16],
        "num_seeds": 3,
        "master_seed": 7,
        "best_of": 3,
        "selection_points": 200,
        "mc_points": 400,
    }
    raw.update(overrides)
    return parse_config(raw)


class TestScalingExperiment:
    def test_single_record(self):
        cfg = tiny_config(n_values=[4], num_seeds=1)
        records, summary = run_scaling_experiment(cfg)
        assert len(records) == 1
        assert records[0].n == 4 and records[0].mode == "trainable"
        assert summary["groups"][0]["slope"] is None

    def test_record_count_and_bounds(self):
        cfg = tiny_config()
        records, _ = run_scaling_experiment(cfg)
        assert len(records) == 6
        for rec in records:
            assert rec.l2_error >= 0
            assert rec.theory_bound == pytest.approx(1 / np.sqrt(rec.n))

    def test_reservoir_modes_run(self):
        for mode in ("reservoir-optimal", "reservoir-fitted"):
            cfg = tiny_config(mode=mode, n_values=[8], num_seeds=2)
            records, _ = run_scaling_experiment(cfg)
            assert len(records) == 2
            assert all(r.theory_bound > 0 for r in records)

    def test_deterministic_csv(self):
        cfg = tiny_config(num_seeds=2)
        rec1, _ = run_scaling_experiment(cfg)
        rec2, _ = run_scaling_experiment(cfg)
        assert strip_timing(records_to_csv(rec1)) == strip_timing(records_to_csv(rec2))

    def test_sup_fields_emitted(self):
        cfg = tiny_config(n_values=[4], num_seeds=1, sup={"half_width": 1.0, "grid": 51})
        records, _ = run_scaling_experiment(cfg)
        assert records[0].sup_error is not None and records[0].sup_grid == 51


class TestCsvFormat:
    def test_header_and_quoting(self):
        cfg = tiny_config(n_values=[4], num_seeds=1, experiment_id='a,"b"')
        records, _ = run_scaling_experiment(cfg)
        text = records_to_csv(records)
        lines = text.split("\r\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[1].startswith('"a,""b"""')  # RFC-4180 quoting

    def test_strip_timing_removes_column(self):
        cfg = tiny_config(n_values=[4], num_seeds=1)
        records, _ = run_scaling_experiment(cfg)
        stripped = strip_timing(records_to_csv(records))
        assert "wall_time_ms" not in stripped.split("\r\n")[0]

    def test_summary_groups(self):
        cfg = tiny_config()
        records, summary = run_scaling_experiment(cfg)
        assert summarize(records) == summary
        group = summary["groups"][0]
        assert group["n"] == [4, 16] and len(group["mean_l2_error"]) == 2
