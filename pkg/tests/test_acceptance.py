"""One test per acceptance criterion; each records a PASS/FAIL line that is
printed in the terminal summary."""

import random
import time

import pytest

from pathcover.audits import (audit_critical, audit_invariant, audit_shape, audit_stable,
                              audit_trunks)
from pathcover.exact import exact_value
from pathcover.factor import build_rescue_graph, cover_weight, max_weight_cover
from pathcover.graph import Graph, check_solution
from pathcover.harness import gen_cores, gen_gnp, gen_planted, run_trial
from pathcover.pipeline import AlgoConfig, phase1, ratio_holds, solve, solve_with_trace

from conftest import record_acceptance
from oracles import brute_cover_weight

P_GRID = [round(0.05 * k, 2) for k in range(1, 11)]


def _instance(model, n, p, seed):
    if model == "gnp":
        return gen_gnp(n, p, seed)
    if model == "planted":
        return gen_planted(n, p, seed)[0]
    return gen_cores(n, p, seed)


def _feasibility_plan():
    plan = []
    for i in range(2000):
        n = 10 + (i * 7) % 51
        p = P_GRID[(i // 3) % len(P_GRID)]
        model = "planted" if i % 10 in (3, 7, 9) else "gnp"
        plan.append((model, n, p, 10_000 + i))
    return plan


def _small_plan():
    rng = random.Random(2024)
    plan = []
    for i in range(1000):
        model = ("gnp", "planted", "cores")[i % 3]
        n = rng.randint(6, 14)
        p = rng.choice([0.1, 0.15, 0.2, 0.3, 0.4, 0.5] if model == "gnp" else [0.0, 0.1, 0.2, 0.3])
        plan.append((model, n, p, rng.randrange(2 ** 31)))
    return plan


def _traced_plan():
    rng = random.Random(77)
    plan = []
    for i in range(600):
        model = ("gnp", "planted", "cores", "cores")[i % 4]
        n = rng.randint(10, 60)
        p = rng.choice(P_GRID) if model != "cores" else rng.choice([0.0, 0.05, 0.1, 0.2])
        plan.append((model, n, p, rng.randrange(2 ** 31)))
    return plan


def _ops_plan():
    """Sparse cores instances: critical components are common here, so the
    local operations get exercised."""
    rng = random.Random(88)
    return [("cores", rng.randint(20, 60), rng.choice([0.0, 0.03, 0.05, 0.08]),
             rng.randrange(2 ** 31)) for _ in range(3000)]


def _level_audits(trace):
    """Per-criterion violations and counters over every recursion level."""
    out = {k: [] for k in (5, 7, 8, 9, 10)}
    stats = {"states": 0, "ops": 0, "critical": 0, "trunks": 0, "levels": 0}
    for level in trace.details:
        stats["levels"] += 1
        p1 = level.phase1
        for state in p1.states:
            out[5] += audit_invariant(state)
        out[5] += audit_invariant(p1.h)
        stats["states"] += len(p1.states)
        final = level.local.analysis
        out[7] += audit_shape(p1.h, level.ctx2.cover)
        out[7] += audit_shape(p1.h, final.cover)
        out[7] += audit_stable(final)
        ops = level.local.ops
        stats["ops"] += len(ops)
        out[8] += [f"op did not lower g: {r.line()}" for r in ops if r.g_after >= r.g_before]
        if len(ops) > 12 * level.graph.n + 1:
            out[8].append(f"{len(ops)} operations on n={level.graph.n}")
        for an in (level.analysis2, final):
            out[9] += audit_trunks(an)
            out[10] += audit_critical(an)
            stats["critical"] += len(an.critical_members)
            stats["trunks"] += len(an.members)
    return out, stats


@pytest.fixture(scope="module")
def small_runs():
    rows = []
    for model, n, p, seed in _small_plan():
        g = _instance(model, n, p, seed)
        sol, trace = solve_with_trace(g, AlgoConfig(audit=True, keep_levels=True))
        top = trace.details[0]
        rows.append({
            "key": (model, n, p, seed), "g": g, "alg": sol.covered, "opt": exact_value(g),
            "valid": check_solution(g, sol) is None,
            "vm": 2 * len(top.phase1.h.matching),
            "mc2": len(top.ctx2.m_c_vertices), "mc3": len(top.ctx3.m_c_vertices),
            "depth": trace.depth, "B": top.decision.B, "trace": trace,
        })
    return rows


@pytest.fixture(scope="module")
def traced_runs():
    runs = []
    for model, n, p, seed in _traced_plan() + _ops_plan():
        g = _instance(model, n, p, seed)
        _, trace = solve_with_trace(g, AlgoConfig(audit=True, keep_levels=True))
        runs.append(trace)
    return runs


def _structure(small_runs, traced_runs):
    viol = {k: [] for k in (5, 7, 8, 9, 10)}
    stats = {}
    for trace in traced_runs + [r["trace"] for r in small_runs]:
        v, s = _level_audits(trace)
        for k in viol:
            viol[k] += v[k]
        for k, x in s.items():
            stats[k] = stats.get(k, 0) + x
    return viol, stats


@pytest.fixture(scope="module")
def structure(small_runs, traced_runs):
    return _structure(small_runs, traced_runs)


def test_criterion_01_feasibility():
    plan = _feasibility_plan()
    t0 = time.perf_counter()
    bad = []
    for model, n, p, seed in plan:
        g = _instance(model, n, p, seed)
        problem = check_solution(g, solve(g))
        if problem is not None:
            bad.append((model, n, p, seed, problem))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 300
    record_acceptance(1, ok, f"{len(plan)} instances, {len(bad)} invalid, {elapsed:.1f}s (limit 300s)")
    assert ok, bad[:5]


def test_criterion_02_ratio(small_runs):
    t0 = time.perf_counter()
    bad = [r["key"] for r in small_runs if not (r["valid"] and ratio_holds(r["opt"], r["alg"]))]
    worst = max((r["opt"] / r["alg"] for r in small_runs if r["alg"]), default=0)
    ok = not bad and len(small_runs) == 1000
    record_acceptance(2, ok, f"{len(small_runs)} instances n<=14, {len(bad)} violations, "
                             f"worst opt/alg={worst:.3f}")
    assert ok, bad[:5]
    assert time.perf_counter() - t0 < 600


def test_criterion_03_matching_bound(small_runs):
    bad = [r["key"] for r in small_runs if 5 * r["vm"] < 4 * r["opt"]]
    record_acceptance(3, not bad, f"5|V(M)| >= 4opt on {len(small_runs)} instances, {len(bad)} violations")
    assert not bad


def test_criterion_04_m_c_bound(small_runs):
    bad2 = [r["key"] for r in small_runs if 5 * r["mc2"] < 4 * r["opt"]]
    bad3 = [r["key"] for r in small_runs if 5 * r["mc3"] < 4 * r["opt"]]
    ok = not bad2 and not bad3
    record_acceptance(4, ok, f"after phase 2: {len(bad2)} violations, after phase 3: {len(bad3)}")
    assert ok


def test_criterion_05_invariant(structure, traced_runs):
    viol, stats = structure
    ok = not viol[5] and len(traced_runs) >= 200 and stats["states"] > 0
    record_acceptance(5, ok, f"{len(traced_runs)} traced instances (+1000 small), "
                             f"{stats['states']} phase-1 states checked, {len(viol[5])} violations")
    assert ok, viol[5][:5]


def test_criterion_06_factor_equivalence():
    rng = random.Random(606)
    checked = positive = 0
    bad = []
    while checked < 300:
        n = rng.randint(6, 18)
        p = rng.choice([0.08, 0.12, 0.18, 0.25])
        g = Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])
        h = phase1(g).h
        rg = build_rescue_graph(g, h)
        if len(rg.eligible) > 12:
            continue
        checked += 1
        want = brute_cover_weight(rg.eligible, h)
        got = cover_weight(max_weight_cover(g, h), h)
        positive += want > 0
        if got != want:
            bad.append((n, sorted(g.edges), got, want))
    record_acceptance(6, not bad, f"{checked} instances with |E(G')|<=12 ({positive} with positive weight), "
                                  f"{len(bad)} mismatches")
    assert not bad, bad[:3]


def test_criterion_07_structure_audits(structure):
    viol, stats = structure
    record_acceptance(7, not viol[7], f"{stats['levels']} levels audited after prune and after "
                                      f"stabilization, {len(viol[7])} violations")
    assert not viol[7], viol[7][:5]


def test_criterion_08_potential(structure):
    viol, stats = structure
    ok = not viol[8] and stats["ops"] > 0
    record_acceptance(8, ok, f"{stats['ops']} operations applied, {len(viol[8])} violations")
    assert ok, viol[8][:5]


def test_criterion_09_trunks(structure):
    viol, stats = structure
    record_acceptance(9, not viol[9], f"{stats['trunks']} trunks checked, {len(viol[9])} violations")
    assert not viol[9], viol[9][:5]


def test_criterion_10_critical_facts(structure):
    viol, stats = structure
    ok = not viol[10] and stats["critical"] > 0
    record_acceptance(10, ok, f"{stats['critical']} critical components seen, {len(viol[10])} violations")
    assert ok, viol[10][:5]


def test_criterion_11_branch5_bound(small_runs):
    rows = [r for r in small_runs if r["depth"] == 0 and r["B"] == 0]
    bad = [r["key"] for r in rows if 32 * r["opt"] > 75 * r["alg"]]
    ok = not bad and rows
    record_acceptance(11, bool(ok), f"{len(rows)} instances without critical components, "
                                    f"{len(bad)} violations")
    assert ok, bad[:5]


def test_criterion_12_determinism():
    plan = _small_plan()[:100] + _traced_plan()[:100]
    diffs = []
    for model, n, p, seed in plan:
        g = _instance(model, n, p, seed)
        a, ta = solve_with_trace(g)
        b, tb = solve_with_trace(_instance(model, n, p, seed))
        if a.paths != b.paths or ta.levels != tb.levels:
            diffs.append((model, n, p, seed))
        r1 = run_trial((model, n, p, seed, False, False, False)).row()
        r2 = run_trial((model, n, p, seed, False, False, False)).row()
        r1.pop("ms"), r2.pop("ms")
        if r1 != r2:
            diffs.append(("record", model, n, p, seed))
    record_acceptance(12, not diffs, f"{len(plan)} instances solved twice, {len(diffs)} differences")
    assert not diffs, diffs[:5]
