"""Command-line entry point.

Subcommands
-----------
run       full experiment from a config file
fronts    fronts and gaps of a reward table read from a text file
optimism  Monte-Carlo joint-optimism frequency on a fresh estimator
bound     confidence radii and the cumulative-regret bound curve

Exit status is 0 on success, 1 on usage or configuration errors and 2 on
runtime or numerical failures (including failed experiment instances).
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import harness, pareto
from .errors import ArgumentError, ConfigurationError, MoltsError
from .linalg import RlsState
from .policies import PolicyConfig, confidence_radius, min_samples, optimism_frequency, regret_bound_curve, total_radius

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _samples(text):
    if text == "auto":
        return "auto"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("sample count must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="molts", description="Multi-objective linear contextual bandit simulator.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment grid")
    run.add_argument("--config", required=True, help="flat key = value config file")
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--algo", action="append", metavar="LABEL",
                     help="algorithm label (mol-ts, mol-ts-m<k>, mol-ucb, eps-greedy); repeatable")
    run.add_argument("--rounds", type=int, help="horizon")
    run.add_argument("--instances", type=int, help="number of instances")
    run.add_argument("--out", help="output directory")
    run.add_argument("--m", type=_samples, help="draws per objective for mol-ts: auto or an integer")
    run.add_argument("--plots", action="store_true", default=None, help="also write SVG plots")
    run.add_argument("--workers", type=int, help="worker processes")

    fronts = sub.add_parser("fronts", help="print fronts and gaps of a reward table")
    fronts.add_argument("table", help="text file, one arm per line, objectives separated by spaces")

    opt = sub.add_parser("optimism", help="Monte-Carlo joint-optimism frequency")
    opt.add_argument("--L", dest="objectives", type=int, default=4, help="number of objectives")
    opt.add_argument("--m", type=_samples, default="auto", help="draws per objective")
    opt.add_argument("--dim", type=int, default=5)
    opt.add_argument("--trials", type=int, default=100_000)
    opt.add_argument("--p", type=float, default=0.15, help="target optimism probability")
    opt.add_argument("--delta", type=float, default=0.05)
    opt.add_argument("--seed", type=int, default=0)

    bound = sub.add_parser("bound", help="print radii and the regret bound curve")
    bound.add_argument("--dim", type=int, default=5)
    bound.add_argument("--L", dest="objectives", type=int, default=4)
    bound.add_argument("--rounds", type=int, default=10_000)
    bound.add_argument("--m", type=_samples, default="auto")
    bound.add_argument("--delta", type=float, default=0.05)
    bound.add_argument("--p", type=float, default=0.15)
    bound.add_argument("--regularizer", type=float, default=1.0)
    bound.add_argument("--noise-bound", type=float, default=1.0)
    bound.add_argument("--max-gap", type=float, default=1.0, help="largest per-round gap")
    bound.add_argument("--points", type=int, default=10, help="rows of the printed curve")
    return parser


def _cmd_run(args) -> int:
    cfg = harness.load_config(args.config, master_seed=args.seed, horizon=args.rounds,
                              num_instances=args.instances, out_dir=args.out, num_samples=args.m,
                              emit_plots=args.plots, workers=args.workers,
                              algorithms=tuple(args.algo) if args.algo else None)
    start = time.perf_counter()
    result = harness.run_experiment(cfg)
    summary = harness.write_outputs(result)
    elapsed = time.perf_counter() - start
    T = cfg.horizon
    print(f"{'algo':<14} {'PR(T)':>12} {'EPR(T)':>12}  (mean +- std over {cfg.num_instances} instances)")
    for algo in summary.algorithms:
        pr, epr = summary.series[(algo, "pr")], summary.series[(algo, "epr")]
        print(f"{algo:<14} {pr[0][T - 1]:12.3f} {epr[0][T - 1]:12.3f}  +- {epr[1][T - 1]:.3f}")
    print(f"wrote {Path(cfg.out_dir) / 'summary.csv'} in {elapsed:.1f}s")
    for f in result.failures:
        print(f"FAILED {f.label} instance {f.instance}: {f.error}", file=sys.stderr)
    return EXIT_RUNTIME if result.failures else EXIT_OK


def read_table(path) -> np.ndarray:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read table {path}: {exc}") from exc
    rows = []
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(v) for v in line.replace(",", " ").split()])
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: {exc}") from exc
    if not rows or len({len(r) for r in rows}) != 1:
        raise ConfigurationError(f"{path}: expected a non-empty table with equal-length rows")
    return pareto.as_table(rows)


def _fmt_set(front):
    return "{" + ",".join(str(a) for a in front) + "}"


def _cmd_fronts(args) -> int:
    table = read_table(args.table)
    pf = pareto.pareto_front(table)
    ef = pareto.effective_front(table)
    print(f"pareto front: {_fmt_set(pf)}")
    print(f"effective front: {_fmt_set(ef)}")
    print("arm pareto_gap effective_gap")
    for a in range(table.shape[0]):
        print(f"{a} {pareto.pareto_gap(table, a):.6g} {pareto.effective_gap(table, a):.6g}")
    return EXIT_OK


def _cmd_optimism(args) -> int:
    if args.objectives < 1 or args.dim < 1 or args.trials < 1:
        raise ConfigurationError("--L, --dim and --trials must be positive")
    cfg = PolicyConfig(num_samples=args.m, optimism_p=args.p, delta=args.delta)
    m = cfg.resolved_samples(args.objectives)
    state = RlsState(args.dim, args.objectives, cfg.regularizer)
    rng = np.random.default_rng(args.seed)
    x = rng.standard_normal(args.dim)
    x /= np.linalg.norm(x)
    freq = optimism_frequency(state, x, cfg, args.trials, rng)
    floor = args.p - 3.0 * np.sqrt(args.p * (1 - args.p) / args.trials)
    print(f"L={args.objectives} M={m} (auto would be {min_samples(args.objectives, args.p)}) trials={args.trials}")
    print(f"frequency={freq:.5f} threshold={floor:.5f} {'ok' if freq >= floor else 'below'}")
    return EXIT_OK


def _cmd_bound(args) -> int:
    cfg = PolicyConfig(num_samples=args.m, optimism_p=args.p, delta=args.delta, regularizer=args.regularizer,
                       noise_bound=args.noise_bound, horizon=args.rounds)
    c1 = confidence_radius(args.rounds, cfg, args.dim, args.objectives)
    ct = total_radius(cfg, args.dim, args.objectives)
    print(f"M={cfg.resolved_samples(args.objectives)} c1(T)={c1:.6g} c_T={ct:.6g}")
    ts = np.unique(np.linspace(1, args.rounds, max(args.points, 1)).round().astype(int))
    curve = regret_bound_curve(ts, cfg, args.dim, args.objectives, args.max_gap)
    print("round bound")
    for t, b in zip(ts, curve):
        print(f"{t} {b:.6g}")
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "fronts": _cmd_fronts, "optimism": _cmd_optimism, "bound": _cmd_bound}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ConfigurationError, ArgumentError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MoltsError, ArithmeticError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
