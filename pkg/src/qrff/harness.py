"""Experiment orchestration: error metrics, scaling runs, CSV emission.

A scaling run sweeps circuit sizes n and seeds for one mode (trainable
circuit with best-of-K selection, reservoir with analytic weights, or
reservoir with a fitted readout), measures Monte-Carlo L2 errors against the
target, attaches the matching theory bound, and emits one CSV row per run
plus a JSON summary with the fitted log-log slope of mean error versus n.

Everything is deterministic given the config and master seed: per-run
generators derive from the entropy tuple (master_seed, mode, n, seed_index,
stream) and rows are written in sorted order, so repeated runs produce
byte-identical CSVs up to the wall-time column.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import bounds, circuit, reservoir, sampling
from .fourier import compute_norms, get_model
from .rng import SeedLike, derive_seed, make_rng

SCHEMA_VERSION = 1

MODES = ("trainable", "reservoir-optimal", "reservoir-fitted")

CSV_COLUMNS = [
    "experiment_id", "mode", "model", "n", "seed", "mc_points",
    "l2_error", "l2_stderr", "sup_error", "M", "grid",
    "theory_bound", "wall_time_ms",
]

# stream indices within one run's seed path
_STREAM_PARAMS = 0
_STREAM_SELECT = 1
_STREAM_MEASURE = 2
_STREAM_TRAIN = 3


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending field."""


# ---------------------------------------------------------------------------
# error measures and metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorMeasure:
    """Probability measure on R^d used to weight the approximation error.

    Kinds: "uniform" on the hypercube [-half_width, half_width]^d,
    "gaussian" (standard normal), "dirac" (a finite mixture of point
    masses), or "file" (atoms with optional weights loaded from a points
    file with header x1,...,xd[,w]).
    """

    kind: str
    dim: int = 1
    half_width: float = 1.0
    points: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "gaussian", "dirac", "file"):
            raise ConfigError(f"measure.kind: unknown kind '{self.kind}'")
        if self.kind == "uniform" and self.half_width <= 0:
            raise ConfigError("measure.half_width: must be positive")
        if self.kind in ("dirac", "file"):
            pts = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
            object.__setattr__(self, "points", pts)
            if self.weights is None:
                w = np.full(pts.shape[0], 1.0 / pts.shape[0])
            else:
                w = np.asarray(self.weights, dtype=np.float64)
            if w.shape != (pts.shape[0],) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
                raise ConfigError("measure.weights: need nonnegative weights summing to 1")
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "dim", pts.shape[1])

    def sample(self, size: int, seed: SeedLike) -> np.ndarray:
        rng = make_rng(seed)
        if self.kind == "uniform":
            return rng.uniform(-self.half_width, self.half_width, size=(size, self.dim))
        if self.kind == "gaussian":
            return rng.standard_normal((size, self.dim))
        idx = rng.choice(self.points.shape[0], size=size, p=self.weights)
        return self.points[idx]


def load_measure_file(path: str | Path) -> ErrorMeasure:
    """Atoms from a points file: header x1,...,xd optionally followed by w."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = [c.strip() for c in fh.readline().strip().split(",")]
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if header[-1] == "w":
        weights = data[:, -1]
        total = weights.sum()
        if total <= 0:
            raise ConfigError(f"measure file {path}: weights must have positive sum")
        return ErrorMeasure("file", points=data[:, :-1], weights=weights / total)
    return ErrorMeasure("file", points=data)


def l2_error(
    fn_a: Callable[[np.ndarray], np.ndarray],
    fn_b: Callable[[np.ndarray], np.ndarray],
    measure: ErrorMeasure,
    num_points: int,
    seed: SeedLike,
) -> tuple[float, float]:
    """Monte-Carlo estimate of the L2(measure) distance, with delta-method SE."""
    xs = measure.sample(num_points, seed)
    sq = (np.asarray(fn_a(xs)) - np.asarray(fn_b(xs))) ** 2
    mean_sq = float(sq.mean())
    estimate = float(np.sqrt(mean_sq))
    if estimate == 0.0 or num_points < 2:
        return estimate, 0.0
    se_mean_sq = float(sq.std(ddof=1) / np.sqrt(num_points))
    return estimate, se_mean_sq / (2.0 * estimate)


def sup_error(
    fn_a: Callable[[np.ndarray], np.ndarray],
    fn_b: Callable[[np.ndarray], np.ndarray],
    half_width: float,
    grid_per_dim: int,
    dim: int = 1,
) -> float:
    """Max absolute difference on a tensor grid over [-M, M]^d.

    A grid maximum lower-bounds the true sup, which is the conservative
    direction when checking empirical sup <= theoretical bound.
    """
    if grid_per_dim < 2:
        raise ValueError("grid_per_dim must be >= 2")
    if grid_per_dim**dim > 1 << 22:
        raise ValueError("grid too large; reduce grid_per_dim or dim")
    side = np.linspace(-half_width, half_width, grid_per_dim)
    if dim == 1:
        xs = side.reshape(-1, 1)
    else:
        xs = np.stack(np.meshgrid(*([side] * dim)), axis=-1).reshape(-1, dim)
    return float(np.max(np.abs(np.asarray(fn_a(xs)) - np.asarray(fn_b(xs)))))


def fit_loglog_slope(ns: np.ndarray, values: np.ndarray) -> float:
    """Least-squares slope of log(values) against log(ns)."""
    ns = np.asarray(ns, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if ns.size < 2:
        raise ValueError("need at least two sizes to fit a slope")
    if np.any(values <= 0):
        raise ValueError("values must be positive for a log-log fit")
    return float(np.polyfit(np.log(ns), np.log(values), 1)[0])


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Validated scaling-experiment configuration (see README for the schema)."""

    experiment_id: str = "scaling"
    mode: str = "trainable"
    model: str = "gaussian"
    dim: int = 1
    n_values: tuple[int, ...] = (4, 16, 64, 256)
    num_seeds: int = 50
    master_seed: int = 0
    amplitude: float | None = None
    best_of: int = 20
    selection_points: int = 2000
    density: str = "cauchy"
    measure_kind: str = "uniform"
    measure_half_width: float = 1.0
    measure_file: str | None = None
    mc_points: int = 4000
    sup_half_width: float | None = None
    sup_grid: int = 1001
    fast_eval: bool = True
    train_samples: int = 256
    train_ridge: float | None = None
    schema_version: int = SCHEMA_VERSION

    def measure(self) -> ErrorMeasure:
        if self.measure_kind == "file":
            return load_measure_file(self.measure_file)
        return ErrorMeasure(self.measure_kind, self.dim, self.measure_half_width)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "experiment_id": self.experiment_id,
            "mode": self.mode,
            "model": self.model,
            "dim": self.dim,
            "n_values": list(self.n_values),
            "num_seeds": self.num_seeds,
            "master_seed": self.master_seed,
            "amplitude": self.amplitude,
            "best_of": self.best_of,
            "selection_points": self.selection_points,
            "density": self.density,
            "measure": {
                "kind": self.measure_kind,
                "half_width": self.measure_half_width,
                "file": self.measure_file,
            },
            "mc_points": self.mc_points,
            "sup": {"half_width": self.sup_half_width, "grid": self.sup_grid},
            "fast_eval": self.fast_eval,
            "train": {"num_samples": self.train_samples, "ridge": self.train_ridge},
        }


def parse_config(raw: dict) -> ExperimentConfig:
    """Build a validated config from a parsed JSON document."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be an object")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported version {version}")

    cfg = ExperimentConfig(schema_version=version)
    simple = {
        "experiment_id": str, "mode": str, "model": str, "dim": int,
        "num_seeds": int, "master_seed": int, "best_of": int,
        "selection_points": int, "density": str, "mc_points": int,
        "fast_eval": bool,
    }
    for key, caster in simple.items():
        if key in raw:
            try:
                setattr(cfg, key, caster(raw[key]))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{key}: {exc}") from exc
    if "amplitude" in raw and raw["amplitude"] is not None:
        cfg.amplitude = float(raw["amplitude"])
    if "n_values" in raw:
        try:
            cfg.n_values = tuple(int(n) for n in raw["n_values"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"n_values: {exc}") from exc
    measure = raw.get("measure", {})
    if measure:
        cfg.measure_kind = measure.get("kind", cfg.measure_kind)
        cfg.measure_half_width = float(measure.get("half_width", cfg.measure_half_width))
        cfg.measure_file = measure.get("file")
    sup = raw.get("sup", {})
    if sup and sup.get("half_width") is not None:
        cfg.sup_half_width = float(sup["half_width"])
        cfg.sup_grid = int(sup.get("grid", cfg.sup_grid))
    train = raw.get("train", {})
    if train:
        cfg.train_samples = int(train.get("num_samples", cfg.train_samples))
        if train.get("ridge") is not None:
            cfg.train_ridge = float(train["ridge"])

    _validate_config(cfg)
    return cfg


def _validate_config(cfg: ExperimentConfig) -> None:
    if cfg.mode not in MODES:
        raise ConfigError(f"mode: '{cfg.mode}' is not one of {MODES}")
    if cfg.model not in ("gaussian", "laplace", "shifted-gaussian"):
        raise ConfigError(f"model: unknown model '{cfg.model}'")
    if cfg.dim < 1:
        raise ConfigError("dim: must be >= 1")
    if not cfg.n_values or any(n < 1 for n in cfg.n_values):
        raise ConfigError("n_values: need a nonempty list of positive sizes")
    if cfg.num_seeds < 1:
        raise ConfigError("num_seeds: must be >= 1")
    if cfg.best_of < 1:
        raise ConfigError("best_of: must be >= 1")
    if cfg.mc_points < 2:
        raise ConfigError("mc_points: must be >= 2")
    if cfg.selection_points < 2:
        raise ConfigError("selection_points: must be >= 2")
    if cfg.train_samples < 1:
        raise ConfigError("train.num_samples: must be >= 1")
    if cfg.measure_kind == "file" and not cfg.measure_file:
        raise ConfigError("measure.file: required when measure.kind is 'file'")
    try:
        sampling.parse_density(cfg.density, cfg.dim)
    except ValueError as exc:
        raise ConfigError(f"density: {exc}") from exc


# ---------------------------------------------------------------------------
# scaling experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentRecord:
    """One row of a scaling run."""

    experiment_id: str
    mode: str
    model: str
    n: int
    seed: int
    mc_points: int
    l2_error: float
    l2_stderr: float
    sup_error: float | None
    sup_half_width: float | None
    sup_grid: int | None
    theory_bound: float
    wall_time_ms: float

    def as_row(self) -> list[str]:
        def fmt(v) -> str:
            if v is None:
                return ""
            if isinstance(v, float):
                return f"{v:.12g}"
            return str(v)

        return [
            self.experiment_id, self.mode, self.model, str(self.n), str(self.seed),
            str(self.mc_points), fmt(self.l2_error), fmt(self.l2_stderr),
            fmt(self.sup_error), fmt(self.sup_half_width),
            "" if self.sup_grid is None else str(self.sup_grid),
            fmt(self.theory_bound), fmt(self.wall_time_ms),
        ]


def _mode_code(mode: str) -> int:
    return MODES.index(mode)


def _trainable_predictor(theta: circuit.CircuitParams, amplitude: float, fast: bool):
    if fast:
        return lambda xs: circuit.closed_form_batch(theta, xs, amplitude)
    return lambda xs: np.array(
        [circuit.evaluate(theta, x, amplitude) for x in np.atleast_2d(xs)]
    )


def _reservoir_predictor(circ, weights, fast: bool):
    method = "closed-form" if fast else "statevector"
    return lambda xs: reservoir.predict(circ, weights, xs, method=method)


def run_scaling_experiment(config: ExperimentConfig) -> tuple[list[ExperimentRecord], dict]:
    """Execute the configured sweep; returns (records, summary)."""
    model = get_model(config.model, config.dim)
    measure = config.measure()
    mode_id = _mode_code(config.mode)

    plan = None
    density = None
    amplitude = config.amplitude
    if config.mode == "trainable":
        plan = sampling.build_plan(model)
        if amplitude is None:
            amplitude = plan.l1
        theory_const = plan.l1
    else:
        density = sampling.parse_density(config.density, config.dim)
        theory_const = compute_norms(model, density=density).l2bar

    target = model.eval_f
    records: list[ExperimentRecord] = []
    for n in config.n_values:
        for seed_idx in range(config.num_seeds):
            base = (config.master_seed, mode_id, n, seed_idx)
            started = time.perf_counter()
            if config.mode == "trainable":
                predictor = _run_trainable(plan, n, amplitude, config, base)
                bound = bounds.bound_l2_trainable(theory_const, n)
            elif config.mode == "reservoir-optimal":
                draw = sampling.sample_reservoir(
                    density, n, config.dim, derive_seed(*base, _STREAM_PARAMS)
                )
                weights = reservoir.optimal_weights(draw, model, density)
                predictor = _reservoir_predictor(
                    reservoir.ReservoirCircuit(draw), weights, config.fast_eval
                )
                bound = bounds.bound_l2_reservoir(theory_const, n)
            else:
                predictor = _run_reservoir_fitted(model, density, measure, n, config, base)
                bound = bounds.bound_l2_reservoir(theory_const, n)

            est, stderr = l2_error(
                target, predictor, measure, config.mc_points,
                derive_seed(*base, _STREAM_MEASURE),
            )
            sup_val = None
            if config.sup_half_width is not None:
                sup_val = sup_error(
                    target, predictor, config.sup_half_width, config.sup_grid, config.dim
                )
            elapsed_ms = (time.perf_counter() - started) * 1e3
            records.append(
                ExperimentRecord(
                    experiment_id=config.experiment_id,
                    mode=config.mode,
                    model=config.model,
                    n=n,
                    seed=seed_idx,
                    mc_points=config.mc_points,
                    l2_error=est,
                    l2_stderr=stderr,
                    sup_error=sup_val,
                    sup_half_width=config.sup_half_width,
                    sup_grid=config.sup_grid if config.sup_half_width is not None else None,
                    theory_bound=bound,
                    wall_time_ms=elapsed_ms,
                )
            )

    records.sort(key=lambda r: (r.mode, r.model, r.n, r.seed))
    summary = summarize(records)
    return records, summary


def _run_trainable(plan, n, amplitude, config: ExperimentConfig, base: tuple):
    """Best-of-K parameter draw, selected by estimated L2(measure) error."""
    measure = config.measure()
    select_seed = derive_seed(*base, _STREAM_SELECT)
    xs = measure.sample(config.selection_points, select_seed)
    target_vals = plan.model.eval_f(xs)
    best_theta, best_err = None, np.inf
    for k in range(config.best_of):
        theta = sampling.sample_theta(
            plan, n, amplitude, derive_seed(*base, _STREAM_PARAMS, k)
        )
        preds = circuit.closed_form_batch(theta, xs, amplitude)
        err = float(np.mean((preds - target_vals) ** 2))
        if err < best_err:
            best_theta, best_err = theta, err
    return _trainable_predictor(best_theta, amplitude, config.fast_eval)


def _run_reservoir_fitted(model, density, measure, n, config: ExperimentConfig, base: tuple):
    draw = sampling.sample_reservoir(
        density, n, config.dim, derive_seed(*base, _STREAM_PARAMS)
    )
    circ = reservoir.ReservoirCircuit(draw)
    xs = measure.sample(config.train_samples, derive_seed(*base, _STREAM_TRAIN))
    ys = model.eval_f(xs)
    method = "closed-form" if config.fast_eval else "statevector"
    weights = reservoir.fit_readout(circ, xs, ys, ridge=config.train_ridge, method=method)
    return _reservoir_predictor(circ, weights, config.fast_eval)


def summarize(records: list[ExperimentRecord]) -> dict:
    """Mean error per n and the fitted log-log slope, per (mode, model)."""
    groups: dict[tuple[str, str], dict[int, list[float]]] = {}
    for rec in records:
        groups.setdefault((rec.mode, rec.model), {}).setdefault(rec.n, []).append(rec.l2_error)
    out = {"schema_version": SCHEMA_VERSION, "groups": []}
    for (mode, model), by_n in sorted(groups.items()):
        ns = sorted(by_n)
        means = [float(np.mean(by_n[n])) for n in ns]
        entry = {
            "mode": mode,
            "model": model,
            "n": ns,
            "mean_l2_error": means,
            "slope": fit_loglog_slope(np.array(ns), np.array(means)) if len(ns) >= 2 else None,
        }
        out["groups"].append(entry)
    return out


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------


def records_to_csv(records: list[ExperimentRecord]) -> str:
    """RFC-4180 CSV text, rows in canonical sorted order."""
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for rec in sorted(records, key=lambda r: (r.mode, r.model, r.n, r.seed)):
        writer.writerow(rec.as_row())
    return buf.getvalue()


def write_outputs(
    records: list[ExperimentRecord], summary: dict, out_dir: str | Path,
    config: ExperimentConfig | None = None,
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "records.csv"
    csv_path.write_text(records_to_csv(records), encoding="utf-8", newline="")
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if config is not None:
        (out_dir / "config.json").write_text(
            json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return csv_path


def strip_timing(csv_text: str) -> str:
    """Drop the wall-time column (the only nondeterministic field)."""
    rows = list(csv.reader(io.StringIO(csv_text)))
    idx = rows[0].index("wall_time_ms")
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    for row in rows:
        writer.writerow(row[:idx] + row[idx + 1 :])
    return buf.getvalue()
