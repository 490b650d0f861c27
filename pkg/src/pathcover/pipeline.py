"""The approximation algorithm end to end.

``solve`` runs, per recursion level: phase 1 (build H and M), phase 2 (the
maximum-weight rescue cover), phase 3 (local operations), then either
outputs optimal trunk solutions for every component (branch 5) or sets aside
the critical anchors with their satellites and recurses on the rest
(branch 6).  The recursion is a loop over shrinking induced subgraphs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .factor import (CoverContext, build_rescue_graph, compute_m_c, cover_weight,
                     max_weight_cover, prune_cover)
from .graph import Edge, Graph, Solution, components_of, norm, validate_solution
from .hstate import FrozenH, HState, check_invariant
from .local_ops import LocalSearchResult, run_until_stable
from .matching import maximum_matching
from .structure import Analysis, FamilyIndex, TrunkOracle

R_LINEAR, R_DISC, R_DEN = 26, 3826, 35


class PhaseOneError(AssertionError):
    """The augmentation loop of phase 1 ran past its modification cap."""


def ratio_holds(opt: int, alg: int) -> bool:
    """``opt <= r * alg`` with ``r = (26 + sqrt(3826)) / 35``, in integers."""
    lhs = R_DEN * opt - R_LINEAR * alg
    return lhs <= 0 or lhs * lhs <= R_DISC * alg * alg


@dataclass(frozen=True)
class AlgoConfig:
    alpha: Fraction = Fraction(15, 8)
    base_size: int = 5
    strict: bool = True
    audit: bool = False
    keep_levels: bool = False
    phase1_cap_factor: int = 10

    @property
    def r(self) -> float:
        return (R_LINEAR + math.sqrt(R_DISC)) / R_DEN

    def get_params(self) -> dict:
        return {"alpha": self.alpha, "base_size": self.base_size, "strict": self.strict,
                "audit": self.audit, "keep_levels": self.keep_levels,
                "phase1_cap_factor": self.phase1_cap_factor}


# ----------------------------------------------------------------------------- phase 1

@dataclass(frozen=True)
class AugmentingTriple:
    u0: int
    e0: Edge
    e1: Edge
    path: tuple[int, ...]


@dataclass(frozen=True)
class AugmentingPair:
    five_path: tuple[int, ...]
    edge: Edge
    bridge: Edge
    i: int
    triple: AugmentingTriple
    follow: AugmentingTriple | None


def five_path_on(g: Graph, vertices: Sequence[int]) -> tuple[int, ...] | None:
    """Lexicographically least Hamiltonian path of ``g[vertices]`` (|vertices| = 5)."""
    for perm in itertools.permutations(sorted(vertices)):
        if perm[0] > perm[-1]:
            continue
        if all(g.has_edge(perm[j], perm[j + 1]) for j in range(len(perm) - 1)):
            return perm
    return None


def _edge_components(h: HState) -> dict[int, Edge]:
    """Vertex -> its edge component, for components of H that are single edges."""
    deg: dict[int, int] = {}
    for u, v in h.edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    out = {}
    for u, v in h.edges:
        if deg[u] == 1 and deg[v] == 1:
            out[u] = out[v] = (u, v)
    return out


def _path_order(h: HState, vertices: Sequence[int]) -> tuple[int, ...]:
    vs = set(vertices)
    adj = {v: [] for v in vs}
    for a, b in h.edges:
        if a in vs and b in vs:
            adj[a].append(b)
            adj[b].append(a)
    start = min(v for v in vs if len(adj[v]) == 1)
    path = [start]
    while len(path) < len(vs):
        path.append(next(w for w in adj[path[-1]] if w not in path))
    return tuple(path)


def find_augmenting_triple(g: Graph, h: HState, involving: Edge | None = None) -> AugmentingTriple | None:
    ec = _edge_components(h)
    for u0 in range(g.n):
        if u0 in h.vertices:
            continue
        near = sorted({ec[w] for w in g.adj[u0] if w in ec})
        seen = set()
        for e0 in near:
            others = set(near)
            for a in e0:
                others.update(ec[x] for x in g.adj[a] if x in ec)
            for e1 in sorted(others):
                if e1 == e0:
                    continue
                key = (min(e0, e1), max(e0, e1))
                if key in seen:
                    continue
                seen.add(key)
                if involving is not None and involving not in key:
                    continue
                path = five_path_on(g, (u0,) + e0 + e1)
                if path is not None:
                    return AugmentingTriple(u0, key[0], key[1], path)
    return None


def apply_triple(h: HState, t: AugmentingTriple) -> None:
    for e in (t.e0, t.e1):
        h.edges.discard(e)
        h.matching.discard(e)
    h.vertices.add(t.u0)
    p = t.path
    for a, b in zip(p, p[1:]):
        h.edges.add(norm(a, b))
    h.matching.add(norm(p[0], p[1]))
    h.matching.add(norm(p[3], p[4]))


def auxiliary_matching(g: Graph, h: HState) -> tuple[list[Edge], frozenset[Edge]]:
    """Edge components of H and a maximum matching of the auxiliary graph."""
    ec = _edge_components(h)
    nodes = sorted(set(ec.values()))
    index = {e: i for i, e in enumerate(nodes)}
    aux = set()
    for u, v in g.edges:
        if u in ec and v in ec and ec[u] != ec[v]:
            aux.add(norm(index[ec[u]], index[ec[v]]))
    return nodes, maximum_matching(Graph(len(nodes), aux))


def q4(g: Graph, h: HState) -> int:
    return len(auxiliary_matching(g, h)[1])


def find_augmenting_pair(g: Graph, h: HState) -> AugmentingPair | None:
    ec = _edge_components(h)
    paths = {}
    for vs in h.vertex_sets():
        if len(vs) == 5:
            p = _path_order(h, vs)
            for v in p:
                paths[v] = p
    base_q4 = None
    tried = set()
    for x, y in g.sorted_edges():
        for a, b in ((x, y), (y, x)):
            if a not in ec or b not in paths:
                continue
            p = paths[b]
            if b not in (p[0], p[2], p[4]) or (p, ec[a]) in tried:
                continue
            tried.add((p, ec[a]))
            e = ec[a]
            v3 = p[2]
            for i in (1, 4):
                seg = (p[0], p[1]) if i == 1 else (p[3], p[4])
                rest = (p[3], p[4]) if i == 1 else (p[0], p[1])
                path = five_path_on(g, (v3,) + e + seg)
                if path is None:
                    continue
                h2 = h.copy()
                h2.vertices.discard(v3)
                h2.edges.discard(norm(p[1], p[2]))
                h2.edges.discard(norm(p[2], p[3]))
                triple = AugmentingTriple(v3, min(e, norm(*seg)), max(e, norm(*seg)), path)
                apply_triple(h2, triple)
                follow = find_augmenting_triple(g, h2, involving=norm(*rest))
                if follow is None:
                    if base_q4 is None:
                        base_q4 = q4(g, h)
                    if q4(g, h2) <= base_q4:
                        continue
                return AugmentingPair(p, e, norm(a, b), i, triple, follow)
    return None


def apply_pair(h: HState, pair: AugmentingPair) -> None:
    p = pair.five_path
    h.vertices.discard(p[2])
    h.edges.discard(norm(p[1], p[2]))
    h.edges.discard(norm(p[2], p[3]))
    apply_triple(h, pair.triple)
    if pair.follow is not None:
        apply_triple(h, pair.follow)


@dataclass
class PhaseOneResult:
    h: FrozenH
    h1: FrozenH
    h2: FrozenH
    modifications: list[str] = field(default_factory=list)
    states: list[FrozenH] = field(default_factory=list)
    added: tuple[Edge, ...] = ()


def phase1(g: Graph, config: AlgoConfig = AlgoConfig()) -> PhaseOneResult:
    m = maximum_matching(g)
    h = HState(g, {v for e in m for v in e}, set(m), set(m))
    states: list[FrozenH] = []
    mods: list[str] = []

    def record(label: str) -> None:
        mods.append(label)
        if config.audit:
            check_invariant(h)
            states.append(h.freeze())

    cap = config.phase1_cap_factor * g.n + 10
    while True:
        t = find_augmenting_triple(g, h)
        if t is not None:
            apply_triple(h, t)
            record(f"triple u0={t.u0} {t.e0} {t.e1} -> {t.path}")
        else:
            pair = find_augmenting_pair(g, h)
            if pair is None:
                break
            apply_pair(h, pair)
            record(f"pair {pair.five_path} {pair.edge} i={pair.i}")
        if len(mods) > cap:
            raise PhaseOneError(f"phase-1 augmentation exceeded {cap} modifications")
    h1 = h.freeze()

    nodes, aux = auxiliary_matching(g, h)
    for i, j in sorted(aux):
        a, b = nodes[i], nodes[j]
        joins = sorted(norm(x, y) for x in a for y in b if g.has_edge(x, y))
        h.edges.add(joins[0])
        record(f"join {a} {b} via {joins[0]}")
    h2 = h.freeze()

    small = {}
    for vs in h.vertex_sets():
        if len(vs) in (2, 4):
            for v in vs:
                small[v] = True
    added = []
    for u, v in g.sorted_edges():
        for a, b in ((u, v), (v, u)):
            if a not in h2.vertices and b in small:
                added.append(norm(a, b))
    for u, v in added:
        h.vertices.update((u, v))
        h.edges.add((u, v))
    if added:
        record(f"absorb {len(added)} edges")
    check_invariant(h)
    return PhaseOneResult(h.freeze(), h1, h2, mods, states, tuple(added))


# ----------------------------------------------------------------------------- phases 2-4

def phase2(g: Graph, h: FrozenH) -> tuple[frozenset[Edge], CoverContext]:
    """Unpruned maximum-weight cover and the pruned cover context."""
    raw = max_weight_cover(g, h)
    return raw, compute_m_c(prune_cover(raw, h), h)


def phase3(h: FrozenH, ctx: CoverContext, oracle: TrunkOracle,
           config: AlgoConfig = AlgoConfig()) -> LocalSearchResult:
    return run_until_stable(h, ctx.cover, oracle, strict=config.strict)


@dataclass(frozen=True)
class Decision:
    branch: int
    A: int
    B: int


def decide(fam: FamilyIndex) -> Decision:
    A = sum(i * len(fam.buckets.get(i, [])) for i in range(1, 6))
    B = fam.weighted_critical
    lhs = 45 * A - 26 * B
    five = B == 0 or (lhs > 0 and lhs * lhs > R_DISC * B * B)
    return Decision(5 if five else 6, A, B)


def branch5_output(an: Analysis) -> Solution:
    paths = []
    for m in an.members:
        paths.extend(an.oracle.solve(m.trunk).paths)
    return Solution(paths)


def branch6_paths(an: Analysis, fam: FamilyIndex) -> list[list[int]]:
    return [an.critical_path(v) for v in sorted(fam.R_c)]


def base_case(g: Graph) -> Solution:
    if g.n == 5:
        p = five_path_on(g, range(5))
        if p is not None:
            return Solution([list(p)])
    return Solution([])


@dataclass
class LevelResult:
    """Everything computed at one recursion level (kept when requested)."""

    graph: Graph
    phase1: PhaseOneResult | None = None
    raw_cover: frozenset[Edge] = frozenset()
    ctx2: CoverContext | None = None
    analysis2: Analysis | None = None
    local: LocalSearchResult | None = None
    ctx3: CoverContext | None = None
    family: FamilyIndex | None = None
    decision: Decision | None = None


@dataclass
class Trace:
    levels: list[dict] = field(default_factory=list)
    details: list[LevelResult] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return sum(1 for lv in self.levels if lv.get("branch") == 6)

    def op_counts(self) -> tuple[int, int, int]:
        return tuple(sum(lv.get(f"ops{k}", 0) for lv in self.levels) for k in (1, 2, 3))

    def lines(self) -> list[str]:
        out = []
        for depth, lv in enumerate(self.levels):
            head = f"level {depth}: n={lv['n']} m={lv['m']}"
            if lv.get("base"):
                out.append(f"{head} base case covered={lv['covered']}")
                continue
            out.append(f"{head} phase1 mods={lv['phase1_mods']} |H|={lv['h_vertices']} "
                       f"|M|={lv['matching']}")
            out.append(f"{head} phase2 cover={lv['cover']} weight={lv['weight']} "
                       f"|V(M_C)|={lv['m_c_vertices']}")
            for op in lv["ops"]:
                out.append(f"{head} {op}")
            out.append(f"{head} A={lv['A']} B={lv['B']} -> branch {lv['branch']}")
        return out


def _lift(sol_paths, labels: Sequence[int]) -> list[list[int]]:
    return [[labels[v] for v in p] for p in sol_paths]


def solve(g: Graph, config: AlgoConfig = AlgoConfig(), trace: Trace | None = None) -> Solution:
    """Approximate maximum vertex cover of ``g`` by disjoint paths of order >= 5."""
    trace = trace if trace is not None else Trace()
    oracle = TrunkOracle()
    current = g
    labels = list(range(g.n))
    out: list[list[int]] = []
    while True:
        record: dict = {"n": current.n, "m": current.m}
        if current.n <= config.base_size:
            sol = base_case(current)
            out.extend(_lift(sol.paths, labels))
            record.update(base=True, covered=sol.covered, branch=0)
            trace.levels.append(record)
            break
        level = LevelResult(current)
        p1 = phase1(current, config)
        h = p1.h
        raw, ctx2 = phase2(current, h)
        an2 = Analysis(h, ctx2.cover, oracle)
        local = phase3(h, ctx2, oracle, config)
        an = local.analysis
        ctx3 = compute_m_c(an.cover, h)
        fam = an.family_index()
        dec = decide(fam)
        record.update(
            phase1_mods=len(p1.modifications), h_vertices=len(h.vertices),
            matching=len(h.matching), cover=len(ctx2.cover),
            weight=cover_weight(ctx2.cover, h), m_c_vertices=len(ctx2.m_c_vertices),
            ops=[r.line() for r in local.ops], A=dec.A, B=dec.B, branch=dec.branch,
            ops1=local.counts()[0], ops2=local.counts()[1], ops3=local.counts()[2])
        trace.levels.append(record)
        if config.keep_levels:
            level.phase1, level.raw_cover, level.ctx2 = p1, raw, ctx2
            level.analysis2, level.local, level.ctx3 = an2, local, ctx3
            level.family, level.decision = fam, dec
            trace.details.append(level)
        if dec.branch == 5:
            out.extend(_lift(branch5_output(an).paths, labels))
            break
        out.extend(_lift(branch6_paths(an, fam), labels))
        keep = sorted(fam.residual)
        labels = [labels[v] for v in keep]
        current = current.induced(keep)
        current = Graph(current.n, current.edges)
    sol = Solution(out)
    validate_solution(g, sol)
    return sol


def solve_with_trace(g: Graph, config: AlgoConfig = AlgoConfig()) -> tuple[Solution, Trace]:
    trace = Trace()
    return solve(g, config, trace), trace
