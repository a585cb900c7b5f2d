"""Command-line interface.

Subcommands: verify-identities, sample-theta, eval, train, scaling, bounds,
plot.  Exit codes: 0 success, 1 usage/validation error, 2 runtime failure.
The default output directory comes from $QRFF_OUTPUT_DIR (falling back to
the working directory).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import circuit, harness, reservoir, sampling
from .fourier import get_model
from .identities import run_all
from .params import CircuitParams


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on usage errors, matching the contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _output_dir(override: str | None) -> Path:
    if override:
        return Path(override)
    return Path(os.environ.get("QRFF_OUTPUT_DIR", "."))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qrff", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify-identities", help="run the circuit/closed-form identity suites")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sample-theta", help="draw trainable-circuit parameters for a model")
    p.add_argument("--model", default="gaussian")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--amplitude", type=float, default=None,
                   help="output scale R (default: the model's L1 norm)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write parameters JSON here (default stdout)")

    p = sub.add_parser("eval", help="evaluate a sampled circuit at input points")
    p.add_argument("--theta", required=True, help="parameters JSON from sample-theta")
    p.add_argument("--points", required=True,
                   help="comma-separated values (d=1) or semicolon-separated vectors")
    p.add_argument("--amplitude", type=float, default=None,
                   help="output scale R (default: the value stored with theta)")
    p.add_argument("--shots", type=int, default=None,
                   help="estimate probabilities from this many shots instead of exactly")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", help="fit a reservoir readout to a dataset")
    p.add_argument("--data", required=True, help="CSV with header x1,...,xd,y")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--density", default="cauchy")
    p.add_argument("--ridge", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fast-closed-form", action="store_true",
                   help="use the cosine fast path instead of simulating the circuit")
    p.add_argument("--out", default=None, help="write fitted model JSON here (default stdout)")

    p = sub.add_parser("scaling", help="run a scaling experiment from a config file")
    p.add_argument("--config", default=None, help="JSON config (omit with --dump-config)")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override master_seed")
    p.add_argument("--dump-config", action="store_true", help="print default config and exit")

    p = sub.add_parser("bounds", help="evaluate a theoretical error bound")
    p.add_argument("--theorem", required=True,
                   choices=["l2-trainable", "l2-reservoir", "linf-trainable",
                            "linf-reservoir", "mixture-constant"])
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--l1", type=float, default=1.0)
    p.add_argument("--l2bar", type=float, default=1.0)
    p.add_argument("--b2", type=float, default=0.0)
    p.add_argument("--half-width", type=float, default=1.0)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--sup-ratio", type=float, default=1.0)
    p.add_argument("--freq-moment", type=float, default=1.0,
                   help="E[||A||^2]^(1/2) of the frequency density")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--sobolev", type=float, default=1.0)

    p = sub.add_parser("plot", help="emit plot data and a gnuplot script from a records CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", default=None, help="output directory")

    return parser


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------


def _cmd_verify(args) -> int:
    results = run_all(args.trials, args.seed)
    width = max(len(r.name) for r in results)
    print(f"{'suite':<{width}}  {'trials':>6}  {'max dev':>12}  {'tol':>8}  status")
    ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        ok &= r.passed
        print(f"{r.name:<{width}}  {r.trials:>6}  {r.max_deviation:>12.3e}  "
              f"{r.tolerance:>8.0e}  {status}")
    return 0 if ok else 2


def _cmd_sample_theta(args) -> int:
    model = get_model(args.model, args.dim)
    plan = sampling.build_plan(model)
    amplitude = args.amplitude if args.amplitude is not None else plan.l1
    theta = sampling.sample_theta(plan, args.n, amplitude, args.seed)
    payload = {
        "model": args.model, "dim": args.dim, "n": args.n,
        "amplitude": amplitude, "seed": args.seed, **theta.to_dict(),
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _parse_points(spec: str) -> np.ndarray:
    if ";" in spec:
        rows = [[float(v) for v in row.split(",")] for row in spec.split(";") if row.strip()]
        return np.array(rows)
    return np.array([[float(v)] for v in spec.split(",") if v.strip()])


def _cmd_eval(args) -> int:
    payload = json.loads(Path(args.theta).read_text(encoding="utf-8"))
    theta = CircuitParams.from_dict(payload)
    amplitude = args.amplitude if args.amplitude is not None else payload.get("amplitude", 1.0)
    points = _parse_points(args.points)
    if points.shape[1] != theta.d:
        print(f"error: points have dimension {points.shape[1]}, circuit expects {theta.d}",
              file=sys.stderr)
        return 1
    for i, x in enumerate(points):
        value = circuit.evaluate(theta, x, amplitude, shots=args.shots,
                                 seed=(args.seed, i))
        coords = ",".join(f"{v:g}" for v in x)
        print(f"f({coords}) = {value:.12g}")
    return 0


def _cmd_train(args) -> int:
    xs, ys = reservoir.load_dataset(args.data)
    density = sampling.parse_density(args.density, xs.shape[1])
    draw = sampling.sample_reservoir(density, args.n, xs.shape[1], args.seed)
    circ = reservoir.ReservoirCircuit(draw)
    method = "closed-form" if args.fast_closed_form else "statevector"
    weights = reservoir.fit_readout(circ, xs, ys, ridge=args.ridge, method=method)
    rmse = reservoir.training_rmse(circ, weights, xs, ys, method=method)
    payload = {
        "n": args.n, "density": args.density, "seed": args.seed,
        "a": draw.a.tolist(), "b": draw.b.tolist(),
        "w": weights.w.tolist(), "provenance": weights.provenance,
        "training_rmse": rmse,
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out} (training RMSE {rmse:.6g})")
    else:
        print(text)
    return 0


def _cmd_scaling(args) -> int:
    if args.dump_config:
        print(json.dumps(harness.ExperimentConfig().to_dict(), indent=2, sort_keys=True))
        return 0
    if not args.config:
        print("error: --config is required (or use --dump-config)", file=sys.stderr)
        return 1
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        raw["master_seed"] = args.seed
    config = harness.parse_config(raw)
    records, summary = harness.run_scaling_experiment(config)
    out_dir = _output_dir(args.out) / config.experiment_id
    csv_path = harness.write_outputs(records, summary, out_dir, config)
    print(f"wrote {csv_path} ({len(records)} records)")
    for group in summary["groups"]:
        slope = group["slope"]
        slope_txt = f"{slope:+.3f}" if slope is not None else "n/a"
        print(f"  {group['mode']}/{group['model']}: log-log slope {slope_txt}")
    return 0


def _cmd_bounds(args) -> int:
    if args.theorem == "l2-trainable":
        value = bounds_mod.bound_l2_trainable(args.l1, args.n)
    elif args.theorem == "l2-reservoir":
        value = bounds_mod.bound_l2_reservoir(args.l2bar, args.n)
    elif args.theorem == "linf-trainable":
        value = bounds_mod.bound_linf_trainable(args.l1, args.b2, args.half_width,
                                                args.dim, args.n)
    elif args.theorem == "linf-reservoir":
        value = bounds_mod.bound_linf_reservoir(args.sup_ratio, args.freq_moment,
                                                args.l2bar, args.half_width,
                                                args.dim, args.n)
    else:
        value = bounds_mod.mixture_constant(args.delta, args.nu, args.dim, args.sobolev)
    print(f"{value:.12g}")
    return 0


GNUPLOT_TEMPLATE = """\
# Scaling of mean L2 error vs n (log-log), one series per mode/model.
# Render with: gnuplot plot_scaling.gp   (or read the .tsv with any tool)
set logscale xy
set xlabel "n"
set ylabel "mean L2 error"
set key outside
set datafile separator "\\t"
set terminal svg size 800,600
set output "scaling.svg"
plot for [i=0:*] "scaling_data.tsv" index i using 1:2 with linespoints \\
     title columnheader(1), \\
     for [i=0:*] "scaling_data.tsv" index i using 1:3 with lines dashtype 2 \\
     title columnheader(1)." bound"
"""


def _cmd_plot(args) -> int:
    text = Path(args.csv).read_text(encoding="utf-8")
    import csv as _csv
    import io as _io

    rows = list(_csv.DictReader(_io.StringIO(text)))
    if not rows:
        print("error: CSV has no data rows", file=sys.stderr)
        return 1
    groups: dict[tuple[str, str], dict[int, list[tuple[float, float]]]] = {}
    for row in rows:
        key = (row["mode"], row["model"])
        groups.setdefault(key, {}).setdefault(int(row["n"]), []).append(
            (float(row["l2_error"]), float(row["theory_bound"]))
        )
    out_dir = _output_dir(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    data_path = out_dir / "scaling_data.tsv"
    with data_path.open("w", encoding="utf-8") as fh:
        for (mode, model), by_n in sorted(groups.items()):
            fh.write(f'"{mode}/{model}"\tmean_l2_error\ttheory_bound\n')
            for n in sorted(by_n):
                errs = [e for e, _ in by_n[n]]
                bound = by_n[n][0][1]
                fh.write(f"{n}\t{np.mean(errs):.12g}\t{bound:.12g}\n")
            fh.write("\n\n")
    script_path = out_dir / "plot_scaling.gp"
    script_path.write_text(GNUPLOT_TEMPLATE, encoding="utf-8")
    print(f"wrote {data_path} and {script_path}")
    return 0


COMMANDS = {
    "verify-identities": _cmd_verify,
    "sample-theta": _cmd_sample_theta,
    "eval": _cmd_eval,
    "train": _cmd_train,
    "scaling": _cmd_scaling,
    "bounds": _cmd_bounds,
    "plot": _cmd_plot,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, harness.ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
