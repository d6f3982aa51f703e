"""Command-line interface.

Exit status: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, ValidationError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _csv_floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _csv_words(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="revshare", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    def scenario_opts(sp):
        sp.add_argument("--scenario", help="scenario config file (default: shipped default)")
        sp.add_argument("--dump-config", metavar="PATH", help="also write the loaded scenario here")

    def seed_opts(sp, required=False):
        sp.add_argument("--reps", type=int, default=200, help="replications per ensemble")
        sp.add_argument("--seed", type=int, required=required, help="64-bit base seed")
        sp.add_argument("--workers", type=int, default=1, help="replication threads")

    sp = sub.add_parser("fluid", help="one fluid run -> trajectory CSV")
    scenario_opts(sp)
    sp.add_argument("--out", help="trajectory CSV (default: stdout)")

    sp = sub.add_parser("stoch", help="stochastic ensemble -> summary CSV")
    scenario_opts(sp)
    seed_opts(sp)
    sp.add_argument("--out", help="summary CSV (default: stdout)")
    sp.add_argument("--event-log", metavar="PATH", help="write per-event log CSV")

    sp = sub.add_parser("sweep", help="share-fraction sweep -> sweep CSV")
    scenario_opts(sp)
    seed_opts(sp)
    sp.add_argument("--engine", choices=("fluid", "stochastic"), default="fluid")
    sp.add_argument("--step", type=float, default=0.025)
    sp.add_argument("--max-delta", type=float, default=1.0)
    sp.add_argument("--out", help="sweep CSV (default: stdout)")

    sp = sub.add_parser("scale", help="scaling experiment -> report CSV + text table")
    scenario_opts(sp)
    seed_opts(sp)
    sp.add_argument("--sizes", type=_csv_floats, required=True, help="e.g. 500,2000,8000")
    sp.add_argument("--regimes", type=_csv_words, default=["efficient-bass"])
    sp.add_argument("--engine", choices=("fluid", "stochastic"), default="fluid",
                    help="stochastic also runs the fluid engine for comparison")
    sp.add_argument("--step", type=float, default=0.025)
    sp.add_argument("--max-delta", type=float, default=1.0)
    sp.add_argument("--out", help="report CSV")

    sp = sub.add_parser("plot", help="trajectory or sweep CSV -> SVG")
    sp.add_argument("input", help="CSV written by fluid or sweep")
    sp.add_argument("--out", required=True, help="SVG path")

    sp = sub.add_parser("validate", help="run the built-in invariant checks")
    sp.add_argument("--seed", type=int, default=20240601)
    return p


def _scenario(args):
    from .scenario import default_scenario, dump_scenario, load_scenario

    scn = load_scenario(args.scenario) if args.scenario else default_scenario()
    if args.dump_config:
        dump_scenario(scn, args.dump_config)
    return scn


def _emit(text, out):
    from ._io import atomic_write_text

    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _cmd_fluid(args):
    from ._io import csv_text
    from .fluid import TRAJECTORY_COLUMNS, integrate

    scn = _scenario(args)
    traj = integrate(scn.initial_state, scn)
    _emit(csv_text(TRAJECTORY_COLUMNS, traj.rows()), args.out)


def _need_seed(args):
    if args.seed is None:
        raise UsageError("revshare: error: --seed is required for stochastic runs")
    if args.reps < 1:
        raise UsageError("revshare: error: --reps must be >= 1")


def _cmd_stoch(args):
    from ._io import csv_text
    from .stochastic import SUMMARY_COLUMNS, simulate_ensemble, write_event_log

    _need_seed(args)
    scn = _scenario(args)
    run = simulate_ensemble(scn, args.seed, args.reps, workers=args.workers)
    _emit(csv_text(SUMMARY_COLUMNS, run.summary_rows()), args.out)
    if args.event_log:
        write_event_log(scn, args.seed, args.reps, args.event_log)
    print(
        f"net revenue: mean {run.mean_net:.6g}, std err {run.stderr_net:.3g} "
        f"over {run.replication_count} replications",
        file=sys.stderr,
    )


def _cmd_sweep(args):
    from ._io import csv_text
    from .economics import SWEEP_COLUMNS, delta_grid, sweep_delta

    if args.engine == "stochastic":
        _need_seed(args)
    scn = _scenario(args)
    res = sweep_delta(scn, delta_grid(args.step, args.max_delta), args.engine,
                      reps=args.reps, seed=args.seed, workers=args.workers)
    _emit(csv_text(SWEEP_COLUMNS, res.rows()), args.out)
    flag = " (baseline ~0, ratio capped)" if res.capped else ""
    print(
        f"best delta {res.best_delta:g}: net {res.best_net:.6g} vs {res.baseline_net:.6g} "
        f"without sharing, gain ratio {res.gain_ratio:.4g}{flag}",
        file=sys.stderr,
    )


def _cmd_scale(args):
    from .economics import delta_grid, scaling_experiment

    if args.engine == "stochastic":
        _need_seed(args)
    scn = _scenario(args)
    engines = ("fluid",) if args.engine == "fluid" else ("fluid", "stochastic")
    rep = scaling_experiment(scn, args.sizes, args.regimes, engines,
                             deltas=delta_grid(args.step, args.max_delta),
                             reps=args.reps, seed=args.seed, workers=args.workers)
    if args.out:
        rep.to_csv(args.out)
    print(rep.text_table())


def _cmd_plot(args):
    from .plotting import plot_csv

    kind = plot_csv(args.input, args.out)
    print(f"wrote {kind} plot to {args.out}", file=sys.stderr)


def _cmd_validate(args):
    from .checks import run_checks

    results = run_checks(seed=args.seed)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    if not all(ok for _, ok, _ in results):
        raise RuntimeError("validation failed")


_COMMANDS = {
    "fluid": _cmd_fluid,
    "stoch": _cmd_stoch,
    "sweep": _cmd_sweep,
    "scale": _cmd_scale,
    "plot": _cmd_plot,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage() + "revshare: error: a command is required")
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ValidationError, ValueError, RuntimeError, OSError) as exc:
        print(f"revshare: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
