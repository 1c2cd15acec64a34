"""Command line interface: generate, suite, solve, knapsack, oracle, bench."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bnp import BnpConfig, solve_bnp
from .generator import ALPHAS, CASES, GeneratorConfig, generate, generate_suite
from .instance import ValidationError, read_instance, write_instance, write_solution


def _on_off(v: str) -> bool:
    if v not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return v == "on"


def _solver_args(p: argparse.ArgumentParser, default_limit: float) -> None:
    p.add_argument("--time-limit", type=float, default=default_limit)
    p.add_argument("--pricing", choices=["exact", "hybrid"], default="hybrid")
    p.add_argument("--breakpoints", choices=["equidistant", "adaptive"], default="equidistant")
    p.add_argument("--colsel", type=_on_off, default=True, metavar="{on,off}")
    p.add_argument("--root-time-budget", type=float, default=None)
    p.add_argument("--pricing-time-limit", type=float, default=None,
                   help="per pricing call (default: n * 0.015 s)")


def _config(args) -> BnpConfig:
    return BnpConfig(time_limit=args.time_limit, pricing=args.pricing,
                     breakpoints=args.breakpoints, colsel=args.colsel,
                     root_time_budget=args.root_time_budget,
                     pricing_time_limit=args.pricing_time_limit,
                     seed=getattr(args, "seed", 0))


def cmd_generate(args) -> int:
    inst = generate(GeneratorConfig(args.n, args.alpha, args.case, args.seed, args.capacity))
    write_instance(inst, args.out)
    return 0


def cmd_suite(args) -> int:
    paths = generate_suite(args.dir, args.n, tuple(args.alphas), tuple(args.cases),
                           range(args.seeds), args.capacity)
    print(f"wrote {len(paths)} instances to {args.dir}")
    return 0


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    rep, bins = solve_bnp(inst, _config(args))
    stats = rep.to_dict()
    if args.out:
        write_solution(args.out, rep.objective, rep.dual_bound_raw, bins, stats)
    if args.report:
        Path(args.report).write_text(json.dumps(stats, indent=1) + "\n")
    print(f"status={rep.status} objective={rep.objective} dual_bound={rep.dual_bound} "
          f"nodes={rep.nodes} columns={rep.columns} time={rep.time:.2f}s")
    return 0


def cmd_knapsack(args) -> int:
    from .knapsack import read_knapsack, solve_knapsack
    prob = read_knapsack(args.instance)
    res = solve_knapsack(prob, args.method, args.time_limit)
    out = {"status": res.status, "value": res.value, "dual_bound": res.dual_bound,
           "items": list(res.items), "nodes": res.nodes, "cuts": res.cuts,
           "lp_solves": res.lp_solves, "time": res.time}
    print(json.dumps(out))
    return 0


def cmd_oracle(args) -> int:
    from . import oracle
    if args.what == "binpack":
        count, bins = oracle.exact_bin_packing(read_instance(args.instance))
        out = {"objective": count, "bins": [list(b) for b in bins]}
    elif args.what == "compact-lp":
        inst = read_instance(args.instance)
        val, ok = oracle.kelley_compact_relaxation(inst, inst.n)
        out = {"value": val, "converged": ok}
    else:
        from .knapsack import enumerate_knapsack, read_knapsack
        res = enumerate_knapsack(read_knapsack(args.instance))
        out = {"value": res.value, "items": list(res.items), "optimal_sets": res.nodes}
    print(json.dumps(out))
    return 0


def cmd_bench(args) -> int:
    from .harness import aggregate_path, run_benchmark
    rows = run_benchmark(args.dir, _config(args), args.jobs, args.csv)
    failed = [r["instance"] for r in rows if r.get("_error")]
    print(f"{len(rows)} instances, {sum(r['solved'] for r in rows)} solved, "
          f"{len(failed)} failed; rows in {args.csv}, aggregates in {aggregate_path(args.csv)}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smbp", description="Submodular bin packing tools")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate one benchmark instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--case", choices=list(CASES), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--capacity", type=float, default=72.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("suite", help="generate a cases x alphas x seeds suite")
    p.add_argument("--dir", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alphas", type=float, nargs="+", default=list(ALPHAS))
    p.add_argument("--cases", nargs="+", choices=list(CASES), default=list(CASES))
    p.add_argument("--seeds", type=int, default=6, help="seeds 0..S-1")
    p.add_argument("--capacity", type=float, default=72.0)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("solve", help="solve an instance by branch-and-price")
    p.add_argument("--instance", required=True)
    _solver_args(p, 60.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("knapsack", help="solve a submodular knapsack file")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=["pwl", "pwl-adaptive", "enum", "greedy"], default="pwl")
    p.add_argument("--time-limit", type=float, default=None)
    p.set_defaults(func=cmd_knapsack)

    p = sub.add_parser("oracle", help="brute-force reference values")
    p.add_argument("--instance", required=True)
    p.add_argument("--what", choices=["binpack", "knapsack", "compact-lp"], required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="solve a directory of instances")
    p.add_argument("--dir", required=True)
    _solver_args(p, 120.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
