"""Command line entry point: ``loosecore <subcommand> ...``.

Exit status is 0 on success, 1 on a usage error and 2 when the command
itself fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analytic
from .cores import padded_core_from_reduced, reduced_core, write_round_labels
from .errors import LooseCoreError
from .factor_graph import build_factor_graph
from .harness.experiment import ExperimentConfig, load_config, run_experiment
from .harness.extremal import (
    DEFAULT_EDGE_CAP,
    brute_force_longest_cycle,
    brute_force_longest_path,
    certificate_bound,
)
from .harness.scan import crossing_scan, default_grid
from .hypergraph import Hypergraph, ModelParams, loose_cycle, sample_hypergraph, union


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _table(rows: list[tuple[str, object]]) -> str:
    width = max(len(k) for k, _ in rows)
    lines = []
    for key, val in rows:
        if isinstance(val, float):
            val = f"{val:.12g}"
        lines.append(f"{key:<{width}}  {val}")
    return "\n".join(lines) + "\n"


def _model_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("-r", type=int, default=3, help="uniformity (default 3)")
    p.add_argument("-n", type=int, required=required, help="vertex count")
    g = p.add_mutually_exclusive_group()
    g.add_argument("-d", type=float, help="degree parameter; p = d / C(n-1, r-1)")
    g.add_argument("-p", type=float, help="edge probability")


def _model(args) -> ModelParams:
    if args.p is not None:
        return ModelParams.from_probability(args.r, args.n, args.p, args.seed)
    if args.d is None:
        raise UsageError("one of -d or -p is required")
    return ModelParams.from_degree(args.r, args.n, args.d, args.seed)


def _hypergraph(args) -> Hypergraph:
    if getattr(args, "input", None):
        return Hypergraph.load(args.input)
    if args.n is None:
        raise UsageError("give --input or -n with -d/-p")
    return sample_hypergraph(_model(args))


# ------------------------------------------------------------- commands


def cmd_generate(args) -> None:
    _emit(sample_hypergraph(_model(args)).to_text(), args.out)


def cmd_core(args) -> None:
    H = _hypergraph(args)
    G = build_factor_graph(H)
    R = padded_core_from_reduced(G, reduced_core(G, mode="synchronous"))
    var_nz, fac_nz = R.nonisolated_counts()
    J = args.max_degree
    stats = {
        "n": G.n,
        "m": G.m,
        "r": G.r,
        "rounds_to_fixpoint": R.rounds,
        "reduced_core_variables": var_nz,
        "reduced_core_factors": fac_nz,
        "loose_core_vertices": int(np.count_nonzero(R.padded_variable_degrees)),
        "loose_core_edges": int(np.count_nonzero(R.padded_factor_degrees)),
        "core_order": int(np.count_nonzero(R.padded_variable_degrees)) / max(G.n, 1),
        "core_size": int(np.count_nonzero(R.padded_factor_degrees)) / max(G.n, 1),
        "certificate": certificate_bound(G, R),
        "zeta": (np.bincount(np.minimum(R.variable_degrees, J + 1), minlength=J + 2) / max(G.n, 1)).tolist(),
        "mu": (np.bincount(np.minimum(R.padded_variable_degrees, J + 1), minlength=J + 2) / max(G.n, 1)).tolist(),
    }
    if args.rounds_csv:
        write_round_labels(G, R, args.rounds_csv)
    if args.json:
        _emit(json.dumps(stats, indent=2) + "\n", args.out)
    else:
        rows = [(k, v) for k, v in stats.items() if not isinstance(v, list)]
        _emit(_table(rows), args.out)


def cmd_predict(args) -> None:
    params = analytic.derived_params(args.r, args.d, args.tol)
    coeff, which = analytic.cycle_bound_coeff(args.r, args.d, args.tol)
    data = params.to_dict()
    data["cycle_bound"] = coeff
    data["cycle_bound_attained_by"] = which
    if args.json:
        _emit(json.dumps(data, indent=2) + "\n", args.out)
    else:
        note = "  (boundary d = d*: rho* = 0 by convention)" if params.at_threshold else ""
        _emit(_table(list(data.items())) + (note + "\n" if note else ""), args.out)


def cmd_experiment(args) -> None:
    overrides = {
        "r": args.r,
        "n": args.n,
        "d": args.d,
        "p": args.p,
        "trials": args.trials,
        "seed": args.seed,
        "rounds": args.rounds,
        "max_degree": args.max_degree,
        "workers": args.workers,
        "out": args.out,
    }
    if args.config:
        cfg = load_config(args.config, **overrides)
    else:
        if args.n is None:
            raise UsageError("give --config or -n")
        values = {k: v for k, v in overrides.items() if v is not None}
        if args.p is not None:
            values["d"] = None
        cfg = ExperimentConfig(**values)
    report = run_experiment(cfg)
    if args.csv:
        report.write_histogram_csv(args.csv)
    if args.json or cfg.format == "json" and args.out:
        _emit(report.to_json(timings=args.timings), cfg.out)
    else:
        agg = report.aggregate()
        tv = report.tv()
        p = report.predictions
        rows = [
            ("trials", agg["trials_completed"]),
            ("mean m", agg["m"]["mean"]),
            ("mean core order v/n", agg["core_order"]["mean"]),
            ("alpha", p.alpha),
            ("mean core size e/n", agg["core_size"]["mean"]),
            ("beta", p.beta),
            ("TV zeta", tv["zeta"]["mean_histogram"]),
            ("TV zeta_hat", tv["zeta_hat"]["mean_histogram"]),
            ("TV mu", tv["mu"]["mean_histogram"]),
            ("mean rounds to fixpoint", agg["rounds_to_fixpoint"]["mean"]),
        ]
        _emit(_table(rows), cfg.out)
    if report.interrupted:
        raise KeyboardInterrupt


def cmd_extremal(args) -> None:
    if args.planted_cycle is not None:
        H = loose_cycle(args.planted_cycle, args.r)
        if args.n is not None and (args.d is not None or args.p is not None):
            noise = sample_hypergraph(_model(args))
            H = union(Hypergraph(noise.n, H.r, H.edges), noise)
    else:
        H = _hypergraph(args)
    G = build_factor_graph(H)
    R = reduced_core(G)
    data = {
        "n": H.n,
        "m": H.m,
        "longest_path": brute_force_longest_path(H, args.cap),
        "longest_cycle": brute_force_longest_cycle(H, args.cap),
        "certificate": certificate_bound(G, R),
    }
    if args.json:
        _emit(json.dumps(data, indent=2) + "\n", args.out)
    else:
        _emit(_table(list(data.items())), args.out)


def cmd_scan(args) -> None:
    grid = default_grid(args.r, args.d_max, args.step)
    table = crossing_scan(args.r, grid)
    if args.json:
        _emit(json.dumps(table.to_dict(), indent=2) + "\n", args.out)
        return
    lines = [f"r = {args.r}, d* = {analytic.d_star(args.r):.12g}, {len(grid)} grid points"]
    lines.append(f"sign of beta - gamma: {table.sign_pattern() or '0'}")
    if table.crossings:
        for c in table.crossings:
            lines.append(f"crossing in [{c.lo:.10f}, {c.hi:.10f}]")
    else:
        lines.append("no sign change")
    _emit("\n".join(lines) + "\n", args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loosecore", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--out", help="write output here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", parents=[common], help="sample and save a hypergraph")
    _model_args(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("core", parents=[common], help="core statistics of a hypergraph")
    _model_args(p, required=False)
    p.add_argument("--input", help="hypergraph text file (otherwise sample one)")
    p.add_argument("--rounds-csv", help="write per-node disabling rounds as CSV")
    p.add_argument("--max-degree", type=int, default=30)
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("predict", parents=[common], help="analytic parameters for (r, d)")
    p.add_argument("-r", type=int, default=3)
    p.add_argument("-d", type=float, required=True)
    p.add_argument("--tol", type=float, default=analytic.DEFAULT_TOL)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("experiment", parents=[common], help="Monte Carlo trials")
    p.set_defaults(seed=None)
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("-r", type=int)
    p.add_argument("-n", type=int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("-d", type=float)
    g.add_argument("-p", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--rounds", type=int, help="also record histograms of G_rounds")
    p.add_argument("--max-degree", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--csv", help="write one row per (trial, j) here")
    p.add_argument("--timings", action="store_true", help="include wall-clock times in JSON")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("extremal", parents=[common], help="exact longest loose path/cycle")
    _model_args(p, required=False)
    p.add_argument("--input", help="hypergraph text file")
    p.add_argument("--planted-cycle", type=int, help="use a loose cycle of this length")
    p.add_argument("--cap", type=int, default=DEFAULT_EDGE_CAP, help="maximum edge count")
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("scan", parents=[common], help="sign of beta - gamma over d")
    p.add_argument("-r", type=int, default=4)
    p.add_argument("--d-max", type=float, default=10.0)
    p.add_argument("--step", type=float, default=0.01)
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"loosecore: error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("loosecore: interrupted; partial results written", file=sys.stderr)
        return 2
    except (LooseCoreError, OSError) as exc:
        print(f"loosecore: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
