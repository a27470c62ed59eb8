"""Command-line interface.

Subcommands::

    sgcv smooth INPUT --window N --pmax P [--target-index K] [--out PATH]
    sgcv experiment {vs-n,vs-var,biasvar,robustness,demo} [flags] [--out PREFIX]
    sgcv bench [--sizes 5,10,15,20] [--reps R] [--seed S] [--out PATH]

File formats (UTF-8, comma separated, ``\\n`` line ends, floats written as the
shortest repr that round-trips):

* smooth input: header with columns ``t`` and ``y`` (``x_true`` optional,
  ignored); ``t`` strictly increasing with uniform spacing (relative 1e-9).
* smooth output: ``t,y,order,y_smooth``; rows without a full window carry
  empty ``order`` and ``y_smooth`` fields.
* experiment CSV (vs-n, vs-var, robustness): ``axis_value,method,prob,stderr,trials``.
  Robustness axis values are ``N;sigma_i_sq;p_i``. The JSON twin holds the
  config and every per-method histogram of selected orders (index = order).
* biasvar CSV: ``order,residual_norm,mean_gamma,tpe``.
* demo CSV: ``t,x_true,y,order,y_smooth``.
* bench CSV: ``N,conventional_us,efficient_nogs_us,efficient_gs_us,speedup_nogs,speedup_gs``.

Exit codes: 0 success, 1 usage error (bad flag, unknown experiment, bench size
below 5), 2 series violates a smoothing precondition, 3 malformed CSV,
4 CV implementations disagree before benchmarking.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

EXIT_USAGE, EXIT_PRECONDITION, EXIT_MALFORMED, EXIT_MISMATCH = 1, 2, 3, 4
EXPERIMENTS = ("vs-n", "vs-var", "biasvar", "robustness", "demo")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sgcv", description="Leave-one-out polynomial order selection for SG smoothing.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sm = sub.add_parser("smooth", help="smooth a CSV series with per-sample CV order selection")
    sm.add_argument("input", type=Path)
    sm.add_argument("--window", type=int, required=True)
    sm.add_argument("--pmax", type=int, required=True)
    sm.add_argument("--target-index", type=int, default=None,
                    help="1-based target sample inside the window (default: centre; odd window required)")
    sm.add_argument("--out", type=Path, default=None, help="output CSV (default: stdout)")

    ex = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    ex.add_argument("name", help="one of: " + ", ".join(EXPERIMENTS))
    ex.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields")
    ex.add_argument("--trials", type=int, default=None)
    ex.add_argument("--seed", type=int, default=0)
    ex.add_argument("--n", type=_int_list, default=None, help="window size(s), comma separated")
    ex.add_argument("--var", type=_float_list, default=None, help="nominal noise variance(s)")
    ex.add_argument("--sigw2", type=float, default=1.0, help="nominal noise variance (robustness)")
    ex.add_argument("--sigi2", type=_float_list, default=None, help="impulsive variance(s)")
    ex.add_argument("--pi", type=_float_list, default=None, help="impulsive probability(ies)")
    ex.add_argument("--window", type=int, default=5, help="demo window length")
    ex.add_argument("--pmax", type=int, default=3, help="demo maximum order")
    ex.add_argument("--period", type=float, default=0.5, help="demo sample period")
    ex.add_argument("--out", type=Path, default=None, help="output prefix (writes PREFIX.csv, PREFIX.json)")

    be = sub.add_parser("bench", help="time conventional vs efficient CV")
    be.add_argument("--sizes", type=_int_list, default=[5, 10, 15, 20])
    be.add_argument("--reps", type=int, default=1000)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--out", type=Path, default=None, help="output CSV (default: bench.csv)")
    return parser


def read_series(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Parse a t,y CSV. Raises ``ValueError`` on malformed content."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"t", "y"} <= {f.strip() for f in reader.fieldnames}:
            raise ValueError("CSV header must contain columns 't' and 'y'")
        t, y = [], []
        for lineno, row in enumerate(reader, start=2):
            row = {(k or "").strip(): v for k, v in row.items()}
            try:
                t.append(float(row["t"]))
                y.append(float(row["y"]))
            except (TypeError, ValueError):
                raise ValueError(f"line {lineno}: non-numeric t or y") from None
    t, y = np.array(t), np.array(y)
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite values in t or y")
    return t, y


def _check_uniform(t: np.ndarray) -> None:
    if t.size < 2:
        return
    dt = np.diff(t)
    if np.any(dt <= 0):
        raise UsageError("t must be strictly increasing")
    if np.max(np.abs(dt - dt.mean())) > 1e-9 * abs(dt.mean()):
        raise UsageError("t must be uniformly spaced (relative tolerance 1e-9)")


def _fmt(v: float) -> str:
    return repr(float(v))


def cmd_smooth(args) -> int:
    from .selection import smooth_series

    try:
        t, y = read_series(args.input)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: malformed CSV: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        _check_uniform(t)
        if args.target_index is None and args.window % 2 == 0:
            raise UsageError("--window must be odd unless --target-index is given")
        if args.window < 3 or not 0 <= args.pmax <= args.window - 2:
            raise UsageError("need --window >= 3 and 0 <= --pmax <= window - 2")
        if y.size < args.window:
            raise UsageError(f"series has {y.size} rows, fewer than the window ({args.window})")
        orders, smoothed = smooth_series(y, args.window, args.pmax, args.target_index)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION

    lines = ["t,y,order,y_smooth"]
    for ti, yi, o, s in zip(t, y, orders, smoothed):
        lines.append(f"{_fmt(ti)},{_fmt(yi)},," if o < 0 else f"{_fmt(ti)},{_fmt(yi)},{o},{_fmt(s)}")
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
        valid = orders[orders >= 0]
        counts = np.bincount(valid, minlength=args.pmax + 1)
        print(f"smoothed {valid.size}/{y.size} samples; order counts " +
              ", ".join(f"{p}:{c}" for p, c in enumerate(counts)))
    return 0


def _experiment_config(args):
    from .experiments import DEFAULT_TRIALS, N_GRID, VARIANCE_GRID, ExperimentConfig

    trials = args.trials
    if args.config is not None:
        fields = json.loads(args.config.read_text())
        if trials is not None:
            fields["trials"] = trials
        fields.setdefault("seed", args.seed)
        return ExperimentConfig(**fields)
    trials = DEFAULT_TRIALS if trials is None else trials
    if args.name == "vs-n":
        var = args.var[0] if args.var else 1.0
        return ExperimentConfig.vs_n(args.n or N_GRID, noise_var=var, trials=trials, seed=args.seed)
    if args.name == "vs-var":
        n = args.n[0] if args.n else 6
        return ExperimentConfig.vs_variance(args.var or VARIANCE_GRID, window_len=n, trials=trials, seed=args.seed)
    settings = [(n, si, p) for n in (args.n or [16]) for si in (args.sigi2 or [10.0, 100.0])
                for p in (args.pi or [0.01, 0.1])]
    return ExperimentConfig.robustness(settings, sigma_w_sq=args.sigw2, trials=trials, seed=args.seed)


def cmd_experiment(args) -> int:
    from . import experiments as ex

    if args.name not in EXPERIMENTS:
        print(f"error: unknown experiment {args.name!r}; choose from {', '.join(EXPERIMENTS)}", file=sys.stderr)
        return EXIT_USAGE
    prefix = args.out or Path(args.name)
    try:
        if args.name == "biasvar":
            n = args.n[0] if args.n else 16
            var = args.var[0] if args.var else 1.0
            trace = ex.run_bias_variance_trace(n, args.seed, var)
            Path(f"{prefix}.csv").write_text(trace.to_csv())
            print(f"biasvar N={n}: CV-selected order {trace.best_order}")
            return 0
        if args.name == "demo":
            var = args.var[0] if args.var else 0.01
            demo = ex.run_kinematic_demo(args.window, args.pmax, args.period, var, args.seed)
            Path(f"{prefix}.csv").write_text(demo.to_csv())
            valid = demo.orders[demo.orders >= 0]
            print(f"demo: {valid.size} samples smoothed, order counts {np.bincount(valid).tolist()}")
            return 0
        report = ex.run_experiment(_experiment_config(args), args.name)
    except (ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    Path(f"{prefix}.csv").write_text(report.to_csv())
    Path(f"{prefix}.json").write_text(report.to_json())
    for pt in report.points:
        summary = "  ".join(f"{m}={pt.stats[m].prob:.3f}" for m in report.config.methods)
        print(f"{pt.axis_value}: {summary}")
    return 0


def cmd_bench(args) -> int:
    from .bench import ImplementationMismatch, run_bench

    if not args.sizes or any(n < 5 for n in args.sizes):
        print("error: benchmark sizes must all be >= 5", file=sys.stderr)
        return EXIT_USAGE
    if args.reps < 1:
        print("error: --reps must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run_bench(args.sizes, args.reps, args.seed)
    except ImplementationMismatch as exc:
        print(f"error: {exc}; no timings reported", file=sys.stderr)
        return EXIT_MISMATCH
    out = args.out or Path("bench.csv")
    out.write_text(report.to_csv())
    print(f"{report.environment}; median of {report.reps} reps")
    for r in report.rows:
        print(f"N={r.n:3d}  conventional {r.conventional_us:10.1f} us  "
              f"precomputed x{r.speedup_nogs:7.1f}  with QR x{r.speedup_gs:7.1f}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"smooth": cmd_smooth, "experiment": cmd_experiment, "bench": cmd_bench}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
