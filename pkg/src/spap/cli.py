"""Command-line interface.

Exit status: 0 on success, 1 on invalid input, 2 when a search budget ran out.
"""

from __future__ import annotations

import argparse
import sys

from .approx import ApproxConfig, best_of_runs
from .harness import (
    Budget, grid, run_experiment_0, run_experiment_1, run_experiment_2, run_experiment_3, standin_instances,
)
from .instances import POPULARITY_MODES, COHORT_SHAPES, GenParams, derive_lecturer_prefs, generate
from .ipmodel import build_model, export_lp
from .model import InstanceError, parse_matching, read_instance, serialize_instance
from .solvers import BudgetExceeded, max_stable_oracle, normalize_mode, solve_exact
from .stability import is_stable

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _budget(args) -> Budget:
    return Budget(max_nodes=args.max_nodes, time_limit=args.time_limit)


def cmd_gen(args) -> int:
    params = GenParams(
        n1=args.n1, project_ratio=args.project_ratio, lecturer_ratio=args.lecturer_ratio,
        capacity_ratio=args.capacity_ratio, pref_min=args.pref_min, pref_max=args.pref_max,
        pref_len=args.pref_len, seed=args.seed,
    )
    inst = generate(params)
    if args.popularity:
        inst = derive_lecturer_prefs(inst, args.popularity, args.seed)
    _write(serialize_instance(inst), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    inst = read_instance(args.instance)
    verdict = is_stable(inst, parse_matching(args.matching))
    print("\n".join(verdict.lines()))
    return EXIT_INVALID if verdict.status == "infeasible" else EXIT_OK


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    if args.oracle:
        res = max_stable_oracle(inst, max_nodes=args.max_nodes)
    else:
        try:
            res = solve_exact(inst, normalize_mode(args.mode), max_nodes=args.max_nodes,
                              time_limit=args.time_limit)
        except BudgetExceeded as exc:
            print(f"budget exceeded after {exc.nodes} nodes", file=sys.stderr)
            if exc.incumbent is not None:
                print(f"incumbent={exc.size}")
                print(f"matching={exc.incumbent.literal()}")
            return EXIT_BUDGET
    print(f"size={res.size}")
    print(f"matching={res.matching.literal()}")
    if res.nodes_explored >= 0:
        print(f"nodes={res.nodes_explored}")
    print(f"time_ms={res.wall_time * 1000:.3f}")
    return EXIT_OK


def cmd_approx(args) -> int:
    inst = read_instance(args.instance)
    m = best_of_runs(inst, ApproxConfig(args.algo, args.runs, args.seed))
    print(f"size={len(m)}")
    print(f"matching={m.literal()}")
    return EXIT_OK


def cmd_export_lp(args) -> int:
    inst = read_instance(args.instance)
    _write(export_lp(build_model(inst, with_coalition=not args.no_coalition)), args.out)
    return EXIT_OK


def _report(report, args) -> int:
    if args.out:
        report.write_csv(args.out)
    print(report.format_summary())
    return EXIT_BUDGET if any(r.opt is None for r in report.rows) else EXIT_OK


def cmd_exp0(args) -> int:
    return _report(run_experiment_0(args.sizes, args.trials, _budget(args), args.seed), args)


def cmd_exp1(args) -> int:
    return _report(run_experiment_1(args.sizes, args.trials, args.runs, _budget(args), args.seed), args)


def cmd_exp2(args) -> int:
    return _report(run_experiment_2(args.n1, args.lengths, args.trials, args.runs, _budget(args), args.seed), args)


def cmd_exp3(args) -> int:
    if args.files:
        instances = [(path, read_instance(path)) for path in args.files]
    else:
        instances = standin_instances(args.years, args.seed)
    report = run_experiment_3(instances, args.modes, args.runs, _budget(args), args.seed)
    status = _report(report, args)
    header, body = grid(report)
    print()
    print("\t".join(header))
    for line in body:
        print("\t".join(line))
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spap", description="Maximum stable matchings for SPA-P instances.")
    sub = ap.add_subparsers(dest="command", required=True)

    def budget_flags(p):
        p.add_argument("--max-nodes", type=int, default=None, help="node limit for exact searches")
        p.add_argument("--time-limit", type=float, default=None, help="seconds per exact solve")

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--n1", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--project-ratio", type=float, default=0.5)
    g.add_argument("--lecturer-ratio", type=float, default=0.2)
    g.add_argument("--capacity-ratio", type=float, default=1.1)
    g.add_argument("--pref-min", type=int, default=2)
    g.add_argument("--pref-max", type=int, default=5)
    g.add_argument("--pref-len", type=int, default=None, help="exact list length (overrides min/max)")
    g.add_argument("--popularity", choices=POPULARITY_MODES, default=None,
                   help="reorder lecturer lists by project popularity")
    g.add_argument("--out", default=None)
    g.set_defaults(fn=cmd_gen)

    c = sub.add_parser("check", help="classify a matching as stable, blocking or coalition")
    c.add_argument("instance")
    c.add_argument("--matching", required=True, help='pairs "i:j", space separated')
    c.set_defaults(fn=cmd_check)

    s = sub.add_parser("solve", help="maximum stable matching")
    s.add_argument("instance")
    kind = s.add_mutually_exclusive_group()
    kind.add_argument("--exact", action="store_true", help="branch and bound (default)")
    kind.add_argument("--oracle", action="store_true", help="exhaustive enumeration (small instances)")
    s.add_argument("--mode", default="no-coalition",
                   choices=["with-coalition", "no-coalition", "no-coalition+rotate"])
    budget_flags(s)
    s.set_defaults(fn=cmd_solve)

    a = sub.add_parser("approx", help="run an approximation algorithm")
    a.add_argument("instance")
    a.add_argument("--algo", choices=["two", "three-halves"], default="three-halves")
    a.add_argument("--runs", type=int, default=1)
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(fn=cmd_approx)

    e = sub.add_parser("export-lp", help="write the integer program in LP format")
    e.add_argument("instance")
    e.add_argument("--no-coalition", action="store_true", help="omit the coalition rows")
    e.add_argument("--out", default=None)
    e.set_defaults(fn=cmd_export_lp)

    for name, fn, helptext in (("exp0", cmd_exp0, "exact solve with and without coalition rows"),
                               ("exp1", cmd_exp1, "five algorithms across sizes")):
        x = sub.add_parser(name, help=helptext)
        x.add_argument("--sizes", type=int, nargs="*", default=[10])
        x.add_argument("--trials", type=int, default=10)
        if name == "exp1":
            x.add_argument("--runs", type=int, default=100)
        x.add_argument("--seed", type=int, default=0)
        x.add_argument("--out", default=None, help="CSV path")
        budget_flags(x)
        x.set_defaults(fn=fn)

    x = sub.add_parser("exp2", help="five algorithms across preference-list lengths")
    x.add_argument("--n1", type=int, default=20)
    x.add_argument("--lengths", type=int, nargs="*", default=[2, 3, 4, 5, 6])
    x.add_argument("--trials", type=int, default=10)
    x.add_argument("--runs", type=int, default=100)
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--out", default=None, help="CSV path")
    budget_flags(x)
    x.set_defaults(fn=cmd_exp2)

    x = sub.add_parser("exp3", help="five algorithms under lecturer-list popularity modes")
    x.add_argument("--files", nargs="*", default=None, help="instance files (default: generated stand-ins)")
    x.add_argument("--years", type=int, nargs="*", default=list(COHORT_SHAPES), choices=list(COHORT_SHAPES))
    x.add_argument("--modes", nargs="*", default=list(POPULARITY_MODES), choices=POPULARITY_MODES)
    x.add_argument("--runs", type=int, default=100)
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--out", default=None, help="CSV path")
    budget_flags(x)
    x.set_defaults(fn=cmd_exp3)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage errors
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    try:
        return args.fn(args)
    except (InstanceError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
