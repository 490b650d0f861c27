"""Rescue graph, maximum-weight path-cycle cover via [f,g]-factors, and M_C.

The path-cycle cover problem is reduced to a maximum-weight [f,g]-factor on
an auxiliary graph with three extra vertices per bad component.  The factor
problem is solved exactly either as a small integer program (HiGHS via
scipy, the default) or through a gadget expansion into maximum-weight
matching (networkx's blossom implementation).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import networkx as nx
import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from .graph import Edge, Graph, components_of
from .hstate import ComponentKind, FrozenH


class InfeasibleFactor(RuntimeError):
    pass


@dataclass(frozen=True)
class RescueGraph:
    """Edges of G joining two H-components, at least one of them bad."""

    base: Graph
    eligible: frozenset[Edge]


def build_rescue_graph(g: Graph, h: FrozenH) -> RescueGraph:
    comp_of = h.comp_of
    comps = h.components
    eligible = set()
    for u, v in g.edges:
        cu, cv = comp_of.get(u), comp_of.get(v)
        if cu is None or cv is None or cu == cv:
            continue
        if comps[cu].bad or comps[cv].bad:
            eligible.add((u, v))
    return RescueGraph(g, frozenset(eligible))


@dataclass(frozen=True)
class FGInstance:
    """Auxiliary graph G_1 with degree bounds ``lower``/``upper`` and weights.

    Vertices ``0..n-1`` are those of G; for the i-th bad component the
    vertices ``n+3i``, ``n+3i+1``, ``n+3i+2`` play the roles x_i, y_i, z_i.
    """

    n_base: int
    n: int
    weights: dict[Edge, int]
    lower: tuple[int, ...]
    upper: tuple[int, ...]
    bad_components: tuple[int, ...]

    def x(self, i: int) -> int:
        return self.n_base + 3 * i

    def y(self, i: int) -> int:
        return self.n_base + 3 * i + 1

    def z(self, i: int) -> int:
        return self.n_base + 3 * i + 2

    def factor_weight(self, factor: Iterable[Edge]) -> int:
        return sum(self.weights[e] for e in factor)

    def is_factor(self, factor: Iterable[Edge]) -> bool:
        deg = Counter()
        for u, v in factor:
            if (u, v) not in self.weights:
                return False
            deg[u] += 1
            deg[v] += 1
        return all(self.lower[v] <= deg[v] <= self.upper[v] for v in range(self.n))


def build_fg_instance(rg: RescueGraph, h: FrozenH,
                      only: Iterable[int] | None = None) -> FGInstance:
    """Auxiliary degree-constrained instance; ``only`` restricts the bad components
    that receive x/y/z vertices (the others must carry no eligible edge)."""
    n = rg.base.n
    keep = None if only is None else set(only)
    bad = [c for c in h.components if c.bad and (keep is None or c.index in keep)]
    total = n + 3 * len(bad)
    weights: dict[Edge, int] = {e: 0 for e in rg.eligible}
    lower = [0] * total
    upper = [2] * n + [0] * (3 * len(bad))
    for i, comp in enumerate(bad):
        x, y, z = n + 3 * i, n + 3 * i + 1, n + 3 * i + 2
        for v in sorted(comp.vertices):
            lower[v] = upper[v] = 2
            weights[(v, x)] = 0
            weights[(v, y)] = 0
        w = comp.kind.weight
        weights[(x, z)] = w
        weights[(y, z)] = w
        upper[x] = upper[y] = len(comp.vertices)
        upper[z] = 1
    return FGInstance(n, total, weights, tuple(lower), tuple(upper),
                      tuple(c.index for c in bad))


def max_weight_fg_factor(inst: FGInstance, method: str = "ilp") -> frozenset[Edge]:
    """Maximum-weight edge set F with ``lower[v] <= deg_F(v) <= upper[v]``.

    ``method`` is ``"ilp"`` (HiGHS mixed-integer program, the default) or
    ``"gadget"`` (expansion to maximum-weight matching).  Both are exact.
    """
    if method == "ilp":
        return _factor_ilp(inst)
    if method == "gadget":
        return _factor_gadget(inst)
    raise ValueError(f"unknown factor method {method!r}")


def _factor_ilp(inst: FGInstance) -> frozenset[Edge]:
    edges = sorted(inst.weights)
    if not edges:
        if any(inst.lower):
            raise InfeasibleFactor("no [f,g]-factor exists for this instance")
        return frozenset()
    rows, cols = [], []
    for j, (u, v) in enumerate(edges):
        rows += [u, v]
        cols += [j, j]
    a = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(inst.n, len(edges)))
    cost = -np.array([inst.weights[e] for e in edges], dtype=float)
    res = milp(cost, constraints=LinearConstraint(a, np.array(inst.lower), np.array(inst.upper)),
               integrality=np.ones(len(edges)), bounds=Bounds(0, 1))
    if res.status != 0 or res.x is None:
        raise InfeasibleFactor(f"no [f,g]-factor found: {res.message}")
    result = frozenset(e for e, x in zip(edges, res.x) if x > 0.5)
    if not inst.is_factor(result):
        raise InfeasibleFactor("solver returned an invalid factor")
    return result


def _factor_gadget(inst: FGInstance) -> frozenset[Edge]:
    """Gadget: vertex v becomes ``upper[v]`` copies, the first ``lower[v]`` of
    them required; edge {u, v} becomes a path u-copy, a_e, b_e, v-copy.
    Required nodes (all a_e, b_e and required copies) carry a bonus larger
    than the total edge weight, so a maximum-weight matching saturates them
    whenever a factor exists.
    """
    edges = sorted(inst.weights)
    bonus = sum(max(w, 0) for w in inst.weights.values()) + 1
    copies: list[list[int]] = []
    next_id = 0
    for v in range(inst.n):
        copies.append(list(range(next_id, next_id + inst.upper[v])))
        next_id += inst.upper[v]
    required = set()
    for v in range(inst.n):
        required.update(copies[v][: inst.lower[v]])

    def node_bonus(node: int) -> int:
        return bonus if node in required else 0

    gadget = nx.Graph()
    edge_nodes: dict[int, Edge] = {}
    for u, v in edges:
        a, b = next_id, next_id + 1
        next_id += 2
        required.update((a, b))
        edge_nodes[a] = (u, v)
        gadget.add_edge(a, b, weight=2 * bonus)
        w = inst.weights[(u, v)]
        for c in copies[u]:
            gadget.add_edge(c, a, weight=w + bonus + node_bonus(c))
        for c in copies[v]:
            gadget.add_edge(b, c, weight=bonus + node_bonus(c))

    mate = nx.max_weight_matching(gadget, maxcardinality=False)
    matched = {x for pair in mate for x in pair}
    if not required <= matched:
        raise InfeasibleFactor("no [f,g]-factor exists for this instance")
    partner = {}
    for a, b in mate:
        partner[a], partner[b] = b, a
    factor = set()
    for a, e in edge_nodes.items():
        if partner[a] != a + 1:
            factor.add(e)
    result = frozenset(factor)
    if not inst.is_factor(result):
        raise InfeasibleFactor("gadget decoding produced an invalid factor")
    return result


def extract_cover(factor: Iterable[Edge], rg: RescueGraph) -> frozenset[Edge]:
    return frozenset(e for e in factor if e in rg.eligible)


def rescued_components(cover: Iterable[Edge], h: FrozenH) -> set[int]:
    comp_of = h.comp_of
    comps = h.components
    out = set()
    for u, v in cover:
        for x in (u, v):
            c = comp_of[x]
            if comps[c].bad:
                out.add(c)
    return out


def cover_weight(cover: Iterable[Edge], h: FrozenH) -> int:
    comps = h.components
    return sum(comps[c].kind.weight for c in rescued_components(cover, h))


def prune_cover(cover: Iterable[Edge], h: FrozenH) -> frozenset[Edge]:
    """Drop cover edges in sorted order while the cover weight is unchanged."""
    comp_of = h.comp_of
    comps = h.components
    touch: Counter[int] = Counter()
    kept = set(cover)
    for u, v in kept:
        touch[comp_of[u]] += 1
        touch[comp_of[v]] += 1
    for u, v in sorted(kept):
        cu, cv = comp_of[u], comp_of[v]
        if all(not comps[c].bad or touch[c] >= 2 for c in (cu, cv)):
            kept.discard((u, v))
            touch[cu] -= 1
            touch[cv] -= 1
    return frozenset(kept)


@dataclass(frozen=True)
class CoverContext:
    """A path-cycle cover C of G' with the matching edges M_C it keeps."""

    cover: frozenset[Edge]
    m_c: frozenset[Edge]

    @property
    def m_c_vertices(self) -> frozenset[int]:
        return frozenset(v for e in self.m_c for v in e)


def compute_m_c(cover: Iterable[Edge], h: FrozenH) -> CoverContext:
    cover = frozenset(cover)
    rescued = rescued_components(cover, h)
    m_c = set()
    for comp in h.components:
        if comp.kind is ComponentKind.FIVE_PATH or comp.index in rescued:
            m_c.update(comp.m_edges)
    return CoverContext(cover, frozenset(m_c))


def max_weight_cover(g: Graph, h: FrozenH, method: str = "ilp") -> frozenset[Edge]:
    """A maximum-weight path-cycle cover of G' (unpruned).

    The factor problem splits along the parts of G' (H-components glued by
    eligible edges); each part is solved on its own.
    """
    rg = build_rescue_graph(g, h)
    if not rg.eligible:
        return frozenset()
    comp_of = h.comp_of
    links = [(comp_of[u], comp_of[v]) for u, v in rg.eligible]
    touched = sorted({c for link in links for c in link})
    cover: set[Edge] = set()
    for part in components_of(touched, links):
        members = set(part)
        sub = frozenset(e for e in rg.eligible if comp_of[e[0]] in members)
        sub_rg = RescueGraph(g, sub)
        inst = build_fg_instance(sub_rg, h, only=members)
        cover |= extract_cover(max_weight_fg_factor(inst, method), sub_rg)
    return frozenset(cover)
