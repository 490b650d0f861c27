"""Random instance generators and the verify/bench campaigns behind the CLI."""

from __future__ import annotations

import csv
import io
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .audits import audit_level
from .exact import SearchBudget, exact_opt
from .graph import Graph, Solution, check_solution, serialize_graph
from .pipeline import AlgoConfig, Trace, ratio_holds, solve

CSV_COLUMNS = ("seed", "n", "m", "model", "alg", "opt", "branch_depth",
               "ops1", "ops2", "ops3", "ms")
MODELS = ("gnp", "planted", "cores")


def _shuffle(n: int, edges, rng: random.Random) -> Graph:
    perm = list(range(n))
    rng.shuffle(perm)
    return Graph(n, [(perm[a], perm[b]) for a, b in edges])


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    rng = random.Random(seed)
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def gen_planted(n: int, p: float, seed: int, lengths: Sequence[int] | None = None) -> tuple[Graph, int]:
    """Disjoint planted paths (orders 5..9 unless given) plus G(n, p) noise.

    Returns the graph and the number of vertices the planted paths cover,
    a lower bound on the optimum.
    """
    rng = random.Random(seed)
    if lengths is None:
        lengths = []
        left = n
        while left >= 5:
            k = min(rng.randint(5, 9), left)
            lengths.append(k)
            left -= k
    if sum(lengths) > n or any(k < 1 for k in lengths):
        raise ValueError("planted paths do not fit into n vertices")
    edges = set()
    start = 0
    for k in lengths:
        edges.update((start + i, start + i + 1) for i in range(k - 1))
        start += k
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.add((i, j))
    return _shuffle(n, edges, rng), sum(k for k in lengths if k >= 5)


def gen_cores(n: int, p: float, seed: int) -> Graph:
    """Centers (4-paths, 5-paths, edges) with 4-paths and edges hanging off
    them, plus ``p * n`` random extra edges.

    The shapes mimic the components the algorithm builds, so this model
    reaches the local operations and the recursive branch far more often
    than G(n, p).
    """
    rng = random.Random(seed)
    edges: set[tuple[int, int]] = set()
    used = 0

    def take(k: int) -> list[int]:
        nonlocal used
        vs = list(range(used, used + k))
        used += k
        return vs

    while used <= n - 6:
        kind = rng.choice((4, 5, 2))
        center = take(kind)
        edges.update(zip(center, center[1:]))
        for _ in range(rng.randint(1, 4)):
            if used + 4 > n:
                break
            anchor = rng.choice(center)
            if rng.random() < 0.67:
                s = take(4)
                edges.update(zip(s, s[1:]))
                edges.add((anchor, rng.choice(s[1:3])))
            else:
                s = take(2)
                edges.add((s[0], s[1]))
                edges.add((anchor, s[0]))
    extra = int(round(p * n))
    for _ in range(extra):
        if n < 2:
            break
        a, b = rng.sample(range(n), 2)
        edges.add((min(a, b), max(a, b)))
    return _shuffle(n, {(min(a, b), max(a, b)) for a, b in edges}, rng)


def gen_random(model: str, n: int, p: float, seed: int) -> Graph:
    if model == "gnp":
        return gen_gnp(n, p, seed)
    if model == "planted":
        return gen_planted(n, p, seed)[0]
    if model == "cores":
        return gen_cores(n, p, seed)
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


@dataclass
class Record:
    seed: int
    n: int
    m: int
    model: str
    p: float
    alg: int
    opt: int | None
    branch_depth: int
    ops1: int
    ops2: int
    ops3: int
    ms: float
    violations: list[str] = field(default_factory=list)
    solution: list[list[int]] = field(default_factory=list)

    def row(self) -> dict:
        d = {c: getattr(self, c) for c in CSV_COLUMNS}
        d["opt"] = "" if self.opt is None else self.opt
        d["ms"] = f"{self.ms:.3f}"
        return d


def _check(g: Graph, sol: Solution, trace: Trace, opt: int | None, audit: bool) -> list[str]:
    out = []
    problem = check_solution(g, sol)
    if problem is not None:
        out.append(f"invalid solution: {problem}")
    if opt is not None:
        alg = sol.covered
        if not ratio_holds(opt, alg):
            out.append(f"ratio violated: opt={opt} alg={alg}")
        top = trace.details[0] if trace.details else None
        if top is not None and top.phase1 is not None:
            if 5 * 2 * len(top.phase1.h.matching) < 4 * opt:
                out.append("|V(M)| below 4/5 opt")
            if 5 * len(top.ctx2.m_c_vertices) < 4 * opt:
                out.append("|V(M_C)| below 4/5 opt after phase 2")
            if 5 * len(top.ctx3.m_c_vertices) < 4 * opt:
                out.append("|V(M_C)| below 4/5 opt after phase 3")
            if top.decision.B == 0 and trace.depth == 0 and 32 * opt > 75 * alg:
                out.append(f"branch-5 bound violated: opt={opt} alg={alg}")
    if audit:
        for level in trace.details:
            out.extend(audit_level(level))
    return out


def run_trial(args: tuple) -> Record:
    """One verify/bench trial.

    ``args`` = (model, n, p, seed, with_oracle, audit, inject_fault); the
    fault flag truncates the first output path to four vertices so that the
    checking pipeline can be exercised end to end.
    """
    model, n, p, seed, with_oracle, audit, inject_fault = args
    g = gen_random(model, n, p, seed)
    cfg = AlgoConfig(audit=audit, keep_levels=audit or with_oracle)
    trace = Trace()
    t0 = time.perf_counter()
    sol = solve(g, cfg, trace)
    ms = (time.perf_counter() - t0) * 1000
    if inject_fault and sol.paths:
        sol = Solution([sol.paths[0][:4]] + sol.paths[1:])
    opt = exact_opt(g, 5, SearchBudget()).covered if with_oracle else None
    ops = trace.op_counts()
    rec = Record(seed, g.n, g.m, model, p, sol.covered, opt, trace.depth, *ops, ms,
                 solution=sol.canonical())
    if audit or with_oracle or inject_fault:
        rec.violations = _check(g, sol, trace, opt, audit)
    return rec


def plan_trials(trials: int, ns: Sequence[int], ps: Sequence[float], models: Sequence[str],
                seed: int) -> list[tuple[str, int, float, int]]:
    rng = random.Random(seed)
    plan = []
    for _ in range(trials):
        plan.append((rng.choice(list(models)), rng.choice(list(ns)), rng.choice(list(ps)),
                     rng.randrange(2 ** 31)))
    return plan


def run_campaign(plan, with_oracle: bool, audit: bool, jobs: int = 1,
                 inject_fault: bool = False) -> list[Record]:
    tasks = [(m, n, p, s, with_oracle, audit, inject_fault) for m, n, p, s in plan]
    if jobs <= 1:
        return [run_trial(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_trial, tasks, chunksize=8))


def write_reports(records: Sequence[Record], out_dir: Path, name: str) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.row())
    (out_dir / f"{name}.csv").write_text(buf.getvalue())
    summary = summarize(records)
    (out_dir / f"{name}.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def summarize(records: Sequence[Record]) -> dict:
    with_opt = [r for r in records if r.opt is not None]
    ratios = [r.opt / r.alg for r in with_opt if r.alg > 0]
    unbounded = sum(1 for r in with_opt if r.alg == 0 and r.opt > 0)
    return {
        "instances": len(records),
        "with_oracle": len(with_opt),
        "violations": sum(1 for r in records if r.violations),
        "branch6_instances": sum(1 for r in records if r.branch_depth > 0),
        "operations": [sum(r.ops1 for r in records), sum(r.ops2 for r in records),
                       sum(r.ops3 for r in records)],
        "max_ratio": max(ratios) if ratios else None,
        "mean_ratio": sum(ratios) / len(ratios) if ratios else None,
        "alg_zero_opt_positive": unbounded,
        "records": [
            {k: v for k, v in asdict(r).items() if k not in ("ms", "solution")}
            for r in records
        ],
    }


def write_replay(record: Record, out_dir: Path) -> Path:
    g = gen_random(record.model, record.n, record.p, record.seed)
    path = out_dir / f"violation_{record.model}_{record.n}_{record.seed}.txt"
    header = (f"# model={record.model} n={record.n} p={record.p} seed={record.seed}\n"
              + "".join(f"# {v}\n" for v in record.violations))
    path.write_text(header + serialize_graph(g))
    return path
