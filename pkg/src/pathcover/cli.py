"""Command-line front end: ``pathcover solve|exact|verify|bench|inspect|gen``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .exact import BudgetExceeded, SearchBudget, exact_opt
from .graph import Graph, ParseError, parse_graph, serialize_graph
from .harness import (MODELS, gen_random, plan_trials, run_campaign, write_replay,
                      write_reports)
from .pipeline import AlgoConfig, Trace, solve

EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_VIOLATION = 4


def _read_graph(path: str) -> Graph:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_graph(text)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def cmd_solve(args) -> int:
    g = _read_graph(args.input)
    trace = Trace()
    sol = solve(g, AlgoConfig(), trace)
    if args.json:
        record = {"n": g.n, "m": g.m, "covered": sol.covered, "paths": sol.canonical(),
                  "branch_depth": trace.depth, "ops": list(trace.op_counts())}
        if args.trace:
            record["trace"] = trace.lines()
        print(json.dumps(record, sort_keys=True))
        return 0
    if args.trace:
        for line in trace.lines():
            print(f"# {line}")
    for path in sol.canonical():
        print(" ".join(map(str, path)))
    print(f"covered={sol.covered}")
    return 0


def cmd_exact(args) -> int:
    g = _read_graph(args.input)
    budget = SearchBudget(max_vertices=args.max_n, max_seconds=args.timeout)
    try:
        sol = exact_opt(g, args.k, budget)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    for path in sol.canonical():
        print(" ".join(map(str, path)))
    print(f"covered={sol.covered}")
    return 0


def _campaign(args, with_oracle: bool, name: str) -> int:
    plan = plan_trials(args.trials, _ints(args.n), _floats(args.p_grid),
                       args.models.split(","), args.seed)
    records = run_campaign(plan, with_oracle, audit=with_oracle, jobs=args.jobs,
                           inject_fault=getattr(args, "inject_fault", False))
    out = Path(args.out)
    summary = write_reports(records, out, name)
    bad = [r for r in records if r.violations]
    print(f"{name}: {summary['instances']} instances, {summary['violations']} violations, "
          f"max ratio {summary['max_ratio']}, branch-6 instances {summary['branch6_instances']}")
    print(f"reports: {out / (name + '.csv')} {out / (name + '.json')}")
    if bad:
        for r in bad[:10]:
            path = write_replay(r, out)
            print(f"violation seed={r.seed} n={r.n}: {r.violations[0]} -> {path}", file=sys.stderr)
        return EXIT_VIOLATION
    return 0


def cmd_verify(args) -> int:
    return _campaign(args, True, "verify")


def cmd_bench(args) -> int:
    return _campaign(args, False, "bench")


def cmd_inspect(args) -> int:
    g = _read_graph(args.input)
    trace = Trace()
    solve(g, AlgoConfig(keep_levels=True), trace)
    for line in trace.lines():
        print(line)
    for depth, level in enumerate(trace.details):
        print(f"== level {depth} after phase 2")
        print(level.analysis2.report())
        print(f"== level {depth} after local operations")
        print(level.local.analysis.report())
    return 0


def cmd_gen(args) -> int:
    g = gen_random(args.model, args.n, args.p, args.seed)
    text = f"# model={args.model} n={args.n} p={args.p} seed={args.seed}\n" + serialize_graph(g)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathcover",
                                     description="Cover vertices by disjoint paths of order >= 5.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the approximation algorithm")
    p.add_argument("input", help="edge-list file, or - for stdin")
    p.add_argument("--json", action="store_true", help="emit one JSON record")
    p.add_argument("--trace", action="store_true", help="include per-phase trace lines")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="solve exactly by exhaustive search")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=5, help="minimum path order (default 5)")
    p.add_argument("--max-n", type=int, default=None,
                   help="vertex cap (default: PATHCOVER_ORACLE_CAP or 18)")
    p.add_argument("--timeout", type=float, default=None, help="seconds before giving up")
    p.set_defaults(func=cmd_exact)

    for name, func, trials, n in (("verify", cmd_verify, 1000, "12"),
                                  ("bench", cmd_bench, 200, "10-60")):
        p = sub.add_parser(name, help=f"{name} campaign on random instances")
        p.add_argument("--trials", type=int, default=trials)
        p.add_argument("--n", default=n, help="vertex counts, e.g. 12 or 8-14 or 10,20")
        p.add_argument("--p-grid", default="0.1,0.2,0.3,0.5")
        p.add_argument("--models", default="gnp,planted,cores")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", default=f"{name}_report")
        if name == "verify":
            p.add_argument("--inject-fault", action="store_true",
                           help="truncate one output path to exercise the checks")
        p.set_defaults(func=func)

    p = sub.add_parser("inspect", help="print the component analysis")
    p.add_argument("input")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--model", choices=MODELS, default="gnp")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
