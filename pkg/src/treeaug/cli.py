"""Command line interface.

Verbs: gen, solve, exact, lp, verify, bench.  Exit codes: 0 success,
1 infeasible instance or violated verification, 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .bench import BenchmarkSuite, csv_lines, run_benchmark, summarize, verify_solution
from .errors import InfeasibleInstanceError, ParseError, TreeAugError
from .exact import brute_force_opt, few_leaf_opt, make_bundle_oracle
from .generate import TOPOLOGIES, GenParams, generate_instance
from .instance_io import parse_instance, write_instance, write_solution
from .lp import build_bundle_lp, build_cut_lp, dump_lp, solve_lp
from .pipeline import Config, solve_tap, solve_wtap


def _config_flags(parser):
    parser.add_argument("--eps", default="1", help="accuracy parameter (rational)")
    parser.add_argument("--m", default=None, help="cost ceiling M (rational >= 1)")
    parser.add_argument("--gamma", type=int, default=None, help="bundle size override")
    parser.add_argument("--alpha", default=None, help="split threshold override")
    parser.add_argument("--beta", default=None, help="simplicity threshold override")
    parser.add_argument("--mode", choices=("wtap", "tap"), default=None)
    parser.add_argument("--bundle-cap", type=int, default=None)
    parser.add_argument("--oracle-limit", type=int, default=22)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", default=None, help="output path (default stdout)")


def _build_config(args, instance=None):
    mode = args.mode
    if mode is None:
        mode = getattr(instance, "kind", "wtap") if instance is not None else "wtap"
    m = args.m
    if m is None:
        if instance is not None and instance.links:
            m = max(link.cost for link in instance.links.values())
            m = max(m, Fraction(1))
        else:
            m = Fraction(1)
    return Config(
        eps=Fraction(args.eps),
        m=Fraction(m),
        mode=mode,
        gamma=args.gamma,
        alpha=Fraction(args.alpha) if args.alpha is not None else None,
        beta=Fraction(args.beta) if args.beta is not None else None,
        bundle_cap=args.bundle_cap,
    )


def _write_out(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read(path):
    with open(path) as fh:
        return fh.read()


def _cmd_gen(args):
    params = GenParams(
        n=args.n,
        topology=args.topology,
        density=args.density,
        cost_max=1 if (args.mode == "tap") else int(args.m or 1),
        mode=args.mode or "wtap",
    )
    inst = generate_instance(params, args.seed)
    _write_out(args, write_instance(inst))
    return 0


def _cmd_solve(args):
    instance = parse_instance(_read(args.instance))
    config = _build_config(args, instance)
    if args.trace:
        config.collect_trace = True
    if config.mode == "tap":
        solution, report = solve_tap(instance, config, instance_id=args.instance)
    else:
        solution, report = solve_wtap(instance, config, instance_id=args.instance)
    if args.sol:
        with open(args.sol, "w") as fh:
            fh.write(write_solution(instance, solution.links))
    _write_out(args, report.to_json() + "\n")
    return 0


def _cmd_exact(args):
    instance = parse_instance(_read(args.instance))
    if len(instance.tree.leaves()) <= args.leaf_limit:
        sol = few_leaf_opt(instance, k_limit=args.leaf_limit)
    else:
        sol = brute_force_opt(instance, limit=args.oracle_limit)
    payload = {
        "method": sol.method,
        "cost": str(sol.cost),
        "links": [
            [instance.links[lid].u, instance.links[lid].v, str(instance.links[lid].cost)]
            for lid in sorted(sol.links)
        ],
    }
    _write_out(args, json.dumps(payload, sort_keys=True) + "\n")
    return 0


def _cmd_lp(args):
    instance = parse_instance(_read(args.instance))
    from .graph import shadow_complete

    completed = shadow_complete(instance)
    if args.gamma:
        oracle = make_bundle_oracle(completed)
        lp = build_bundle_lp(completed, args.gamma, oracle, cap=args.bundle_cap)
    else:
        lp = build_cut_lp(completed)
    if args.dump_lp:
        with open(args.dump_lp, "w") as fh:
            dump_lp(lp, fh)
    sol = solve_lp(lp)
    payload = {
        "status": sol.status,
        "value": str(sol.objective_value) if sol.status == "optimal" else None,
        "gamma": args.gamma or 0,
        "constraints": len(lp.constraints),
        "truncated": lp.truncated,
    }
    _write_out(args, json.dumps(payload, sort_keys=True) + "\n")
    return 0


def _cmd_verify(args):
    verdict, code = verify_solution(_read(args.instance), _read(args.solution))
    print(verdict)
    return code


def _cmd_bench(args):
    config = _build_config(args)
    suite = BenchmarkSuite(
        topologies=tuple(args.topologies.split(",")),
        n_values=tuple(int(t) for t in args.n_list.split(",")),
        density=args.density,
        cost_max=int(args.m or 1),
        seeds=tuple(range(args.seed, args.seed + args.runs)),
        algorithms=tuple(args.algorithms.split(",")),
        mode=args.mode or "wtap",
        config=config,
        oracle_limit=args.oracle_limit,
    )
    out_fh = open(args.out, "w") if args.out else sys.stdout

    def sink(record):
        out_fh.write(json.dumps(record, sort_keys=True) + "\n")
        out_fh.flush()

    try:
        records = run_benchmark(suite, sink=sink)
    finally:
        if args.out:
            out_fh.close()
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("\n".join(csv_lines(records)) + "\n")
    print(json.dumps(summarize(records), sort_keys=True, indent=2), file=sys.stderr)
    bad = any("error" in r or not r.get("feasible", True) for r in records)
    return 1 if bad else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="treeaug", description="Tree augmentation solver and benchmark harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    _config_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--topology", choices=TOPOLOGIES, default="random_tree")
    p.add_argument("--density", type=float, default=1.5)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="run the approximation pipeline")
    _config_flags(p)
    p.add_argument("instance")
    p.add_argument("--sol", default=None, help="write the solution links here")
    p.add_argument("--trace", action="store_true", help="collect split trace")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("exact", help="solve exactly (oracle)")
    _config_flags(p)
    p.add_argument("instance")
    p.add_argument("--leaf-limit", type=int, default=16)
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("lp", help="solve the cut or bundle LP")
    _config_flags(p)
    p.add_argument("instance")
    p.add_argument("--dump-lp", default=None, help="write LP interchange text here")
    p.set_defaults(func=_cmd_lp)

    p = sub.add_parser("verify", help="check a solution file")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="run a benchmark suite")
    _config_flags(p)
    p.add_argument("--topologies", default="random_tree")
    p.add_argument("--n-list", default="8,10")
    p.add_argument("--density", type=float, default=1.5)
    p.add_argument("--runs", type=int, default=5, help="seeds per configuration")
    p.add_argument("--algorithms", default="pipeline,two_approx")
    p.add_argument("--csv", default=None, help="write plot data CSV here")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleInstanceError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except TreeAugError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
