"""Decomposition of H+C into composite components and their analysis.

For a frozen H and a pruned cover C this module builds, per component K of
H+C: the center element and satellite elements with their rescue edges,
the trunk, the anchor classes, the counts ``s(K)`` and ``eta(K)``, and
criticality.  :class:`Analysis` bundles all of it together with the
responsible anchors, the potential ``g`` and the family index used by the
final branch decision.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .exact import satellite_tail, trunk_opt
from .graph import Edge, Graph, Solution, components_of, contract, norm
from .hstate import Component, ComponentKind, FrozenH

ALPHA = Fraction(15, 8)
CRITICAL_S_VALUES = frozenset({14, 16, 18, 30, 32})


class StructureError(AssertionError):
    """H+C does not have the shape the analysis relies on."""


class AnchorClass(enum.Enum):
    ZERO = "0-anchor"
    O0 = "O0"
    O1 = "O1"
    T0 = "T0"
    T1 = "T1"
    T2 = "T2"

    @property
    def degree(self) -> int:
        return {"0": 0, "O": 1, "T": 2}[self.value[0]]

    @property
    def bistars(self) -> int:
        return 0 if self is AnchorClass.ZERO else int(self.value[1])


def anchor_class(kinds: Sequence[ComponentKind]) -> AnchorClass:
    """Class of an anchor from the kinds of the satellites it anchors."""
    bi = sum(k is ComponentKind.BISTAR for k in kinds)
    if not kinds:
        return AnchorClass.ZERO
    if len(kinds) == 1:
        return AnchorClass.O1 if bi else AnchorClass.O0
    if len(kinds) == 2:
        return (AnchorClass.T0, AnchorClass.T1, AnchorClass.T2)[bi]
    raise StructureError(f"anchor supports {len(kinds)} satellites")


@dataclass(frozen=True)
class SatelliteElement:
    comp: int
    anchor: int
    entry: int

    @property
    def rescue_edge(self) -> Edge:
        return norm(self.anchor, self.entry)


@dataclass(frozen=True)
class CompositeComponent:
    """A member of the family: a composite component or an isolated 5-path."""

    center: int
    satellites: tuple[SatelliteElement, ...]
    vertices: frozenset[int]

    @property
    def composite(self) -> bool:
        return bool(self.satellites)

    @property
    def comps(self) -> tuple[int, ...]:
        return (self.center,) + tuple(s.comp for s in self.satellites)

    def anchored_by(self, v: int) -> list[SatelliteElement]:
        return [s for s in self.satellites if s.anchor == v]

    def with_satellite(self, sat: SatelliteElement, h: FrozenH) -> "CompositeComponent":
        return CompositeComponent(self.center, self.satellites + (sat,),
                                  self.vertices | h.components[sat.comp].vertices)

    def without_satellite(self, comp: int, h: FrozenH) -> "CompositeComponent":
        return CompositeComponent(self.center,
                                  tuple(s for s in self.satellites if s.comp != comp),
                                  self.vertices - h.components[comp].vertices)


@dataclass(frozen=True)
class TrunkSatellite:
    anchor: int
    entry: int
    vertices: frozenset[int]


@dataclass(frozen=True)
class Trunk:
    """Trimmed component in local ids; ``graph.labels`` maps back to G."""

    graph: Graph
    center: frozenset[int]
    satellites: tuple[TrunkSatellite, ...]
    cover_edges: frozenset[Edge]

    @property
    def order(self) -> int:
        return self.graph.n

    def base_vertices(self) -> frozenset[int]:
        return frozenset(self.graph.labels)

    def base_edges(self) -> frozenset[Edge]:
        lab = self.graph.labels
        return frozenset(norm(lab[u], lab[v]) for u, v in self.graph.edges)

    def local(self, v: int) -> int:
        return self.graph.labels.index(v)

    def lift(self, sol: Solution) -> Solution:
        return Solution([self.graph.lift(p) for p in sol.paths])


def build_trunk(h: FrozenH, k: CompositeComponent, cover: Iterable[Edge]) -> Trunk:
    """Trim K: unmatched, uncovered vertices of star/bi-star satellites and
    unmatched vertices of a bad center are dropped."""
    cover = frozenset(cover)
    comps = h.components
    covered = {v for e in cover for v in e}
    center = comps[k.center]
    keep: set[int] = set(center.vertices if not center.bad else center.vertices & h.matched)
    sat_keep: list[frozenset[int]] = []
    for sat in k.satellites:
        comp = comps[sat.comp]
        if comp.kind in (ComponentKind.STAR, ComponentKind.BISTAR):
            vs = frozenset(v for v in comp.vertices if v in h.matched or v in covered)
        else:
            vs = comp.vertices
        sat_keep.append(vs)
        keep |= vs
    order = sorted(keep)
    index = {v: i for i, v in enumerate(order)}
    edges = []
    for u, v in h.edges:
        if u in index and v in index:
            edges.append((index[u], index[v]))
    k_cover = frozenset(e for e in cover if e[0] in k.vertices and e[1] in k.vertices)
    trunk_cover = set()
    for u, v in k_cover:
        if u in index and v in index:
            edges.append((index[u], index[v]))
            trunk_cover.add((u, v))
    graph = Graph(len(order), edges, labels=order)
    sats = []
    for sat, vs in zip(k.satellites, sat_keep):
        if sat.anchor in index and sat.entry in index:
            sats.append(TrunkSatellite(index[sat.anchor], index[sat.entry],
                                       frozenset(index[v] for v in vs)))
    center_local = frozenset(index[v] for v in keep if v in center.vertices)
    return Trunk(graph, center_local, tuple(sats), frozenset(trunk_cover))


class TrunkOracle:
    """Cached exact trunk optimum, keyed by the trunk's base vertices/edges."""

    def __init__(self):
        self.cache: dict[tuple[frozenset[int], frozenset[Edge]], Solution] = {}
        self.calls = 0

    def solve(self, trunk: Trunk) -> Solution:
        key = (trunk.base_vertices(), trunk.base_edges())
        hit = self.cache.get(key)
        if hit is None:
            self.calls += 1
            hit = trunk.lift(trunk_opt(trunk))
            self.cache[key] = hit
        return hit

    def eta(self, trunk: Trunk) -> int:
        return self.solve(trunk).covered


@dataclass(frozen=True)
class Metrics:
    s: int
    eta: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.s, self.eta)


def s_value(h: FrozenH, k: CompositeComponent) -> int:
    return sum(2 * len(h.components[c].m_edges) for c in k.comps)


def is_critical(m: Metrics) -> bool:
    """``s/eta >= 15/8`` compared exactly in integers."""
    if m.eta <= 0:
        raise StructureError("eta must be positive for a family member")
    return 8 * m.s >= 15 * m.eta


@dataclass(frozen=True)
class AnchorPaths:
    q: tuple[int, ...]
    p: tuple[int, ...] | None


def anchor_paths(trunk: Trunk, v: int) -> AnchorPaths:
    """``Q_v`` and, for 2-anchors, ``P_v`` inside the trunk (base ids)."""
    g = trunk.graph
    lv = trunk.local(v)
    tails = sorted((satellite_tail(g, s.entry, s.vertices)
                    for s in trunk.satellites if s.anchor == lv),
                   key=lambda t: (-len(t), t))
    q = (lv,) + tails[0] if tails else (lv,)
    p = tails[1][::-1] + (lv,) + tails[0] if len(tails) == 2 else None
    lab = g.labels
    return AnchorPaths(tuple(lab[x] for x in q),
                       tuple(lab[x] for x in p) if p is not None else None)


def _pick_center(a: Component, b: Component, hints: frozenset[int]) -> tuple[int, int]:
    for first, second in ((a, b), (b, a)):
        if first.kind is ComponentKind.FIVE_PATH:
            return first.index, second.index
    for first, second in ((a, b), (b, a)):
        if first.index in hints and second.index not in hints:
            return first.index, second.index
    for first, second in ((a, b), (b, a)):
        if second.kind is ComponentKind.TRIANGLE and first.kind is not ComponentKind.TRIANGLE:
            return first.index, second.index
    for first, second in ((a, b), (b, a)):
        if second.kind is ComponentKind.BISTAR and first.kind is not ComponentKind.BISTAR:
            return first.index, second.index
    lo, hi = sorted((a.index, b.index))
    return lo, hi


def decompose(h: FrozenH, cover: Iterable[Edge],
              hints: frozenset[int] = frozenset()) -> list[CompositeComponent]:
    """Composite components of H+C, each with its center and satellites.

    Raises :class:`StructureError` unless every contracted component is an
    isolated node, an edge, or a star whose satellites are bad.
    """
    cover = frozenset(cover)
    comps = h.components
    view = contract([sorted(c.vertices) for c in comps], cover)
    groups = components_of(range(len(comps)), view.edges)
    edges_by_group: dict[int, list[tuple[int, int]]] = {}
    rep = {c: grp[0] for grp in groups for c in grp}
    for a, b in view.edges:
        edges_by_group.setdefault(rep[a], []).append((a, b))
    cover_between: dict[tuple[int, int], Edge] = {}
    for u, v in sorted(cover):
        a, b = h.comp_of[u], h.comp_of[v]
        cover_between[(min(a, b), max(a, b))] = (u, v)

    out = []
    for grp in groups:
        if len(grp) == 1:
            continue
        gedges = edges_by_group[grp[0]]
        if len(gedges) != len(grp) - 1 or len(set(gedges)) != len(gedges):
            raise StructureError(f"contracted component {grp} is not a tree")
        deg = {c: 0 for c in grp}
        for a, b in gedges:
            deg[a] += 1
            deg[b] += 1
        hubs = [c for c in grp if deg[c] >= 2]
        if len(hubs) > 1:
            raise StructureError(f"contracted component {grp} is not a star")
        if hubs:
            center = hubs[0]
        else:
            center, _ = _pick_center(comps[grp[0]], comps[grp[1]], hints)
        sats = []
        for c in grp:
            if c == center:
                continue
            if not comps[c].bad:
                raise StructureError(f"satellite component {c} is a 5-path")
            u, v = cover_between[(min(c, center), max(c, center))]
            anchor, entry = (u, v) if h.comp_of[u] == center else (v, u)
            sats.append(SatelliteElement(c, anchor, entry))
        sats.sort(key=lambda s: (s.anchor, s.entry))
        vertices = frozenset(v for c in grp for v in comps[c].vertices)
        out.append(CompositeComponent(center, tuple(sats), vertices))
    out.sort(key=lambda k: min(k.vertices))
    return out


@dataclass
class Member:
    """Analysis record for one family member."""

    comp: CompositeComponent
    trunk: Trunk
    metrics: Metrics
    anchors: dict[int, AnchorClass]
    critical: bool

    @property
    def composite(self) -> bool:
        return self.comp.composite

    def anchors_of(self, cls: AnchorClass) -> list[int]:
        return [v for v, c in self.anchors.items() if c is cls]

    @property
    def two_anchors(self) -> list[int]:
        return [v for v, c in self.anchors.items() if c.degree == 2]


def analyse_member(h: FrozenH, k: CompositeComponent, cover: Iterable[Edge],
                   oracle: TrunkOracle) -> Member:
    cover = frozenset(cover)
    trunk = build_trunk(h, k, cover)
    center = h.components[k.center]
    anchors: dict[int, AnchorClass] = {}
    trunk_vertices = trunk.base_vertices()
    comps = h.components
    for v in sorted(center.vertices):
        if v in trunk_vertices:
            anchors[v] = anchor_class([comps[s.comp].kind for s in k.anchored_by(v)])
    metrics = Metrics(s_value(h, k), oracle.eta(trunk))
    critical = k.composite and is_critical(metrics)
    return Member(k, trunk, metrics, anchors, critical)


@dataclass(frozen=True)
class Potential:
    n0: int
    nc: int
    ncc: int

    @property
    def g(self) -> int:
        return self.n0 + 5 * self.nc - 6 * self.ncc


@dataclass
class FamilyIndex:
    buckets: dict[int, list[int]]
    critical_buckets: dict[int, list[int]]
    R: frozenset[int]
    R_c: frozenset[int]
    U_c: frozenset[int]
    residual: frozenset[int]

    @property
    def weighted_r(self) -> int:
        """Sum of ``i * |K_i|``, equal to ``|R|``."""
        return sum(i * len(ms) for i, ms in self.buckets.items())

    @property
    def weighted_critical(self) -> int:
        """``|K_{1,c}| + 2 |K_{2,c}|``."""
        return len(self.critical_buckets.get(1, [])) + 2 * len(self.critical_buckets.get(2, []))


class Analysis:
    """Everything the local search and the final decision need about H+C."""

    def __init__(self, h: FrozenH, cover: Iterable[Edge], oracle: TrunkOracle | None = None,
                 hints: frozenset[int] = frozenset()):
        self.h = h
        self.cover = frozenset(cover)
        self.hints = hints
        self.oracle = oracle or TrunkOracle()
        comps = h.components
        composites = decompose(h, self.cover, hints)
        in_composite = {c for k in composites for c in k.comps}
        family: list[CompositeComponent] = list(composites)
        self.isolated_bad: list[int] = []
        for comp in comps:
            if comp.index in in_composite:
                continue
            if comp.bad:
                self.isolated_bad.append(comp.index)
            else:
                family.append(CompositeComponent(comp.index, (), comp.vertices))
        family.sort(key=lambda k: min(k.vertices))
        self.members = [analyse_member(h, k, self.cover, self.oracle) for k in family]
        self.member_of_comp: dict[int, int] = {}
        for i, m in enumerate(self.members):
            for c in m.comp.comps:
                self.member_of_comp[c] = i
        self.satellite_of: dict[int, tuple[int, SatelliteElement]] = {}
        for i, m in enumerate(self.members):
            for s in m.comp.satellites:
                self.satellite_of[s.comp] = (i, s)
        # vertices outside H are isolated components of the spanning graph H+C
        self.ncc = len(self.members) + len(self.isolated_bad) + (h.graph.n - len(h.vertices))

    # criticality -----------------------------------------------------------------

    @cached_property
    def critical_members(self) -> list[int]:
        return [i for i, m in enumerate(self.members) if m.critical]

    @cached_property
    def critical_anchors(self) -> frozenset[int]:
        return frozenset(v for i in self.critical_members for v in self.members[i].two_anchors)

    @cached_property
    def critical_satellites(self) -> list[SatelliteElement]:
        out = []
        for i in self.critical_members:
            m = self.members[i]
            crit = set(m.two_anchors)
            out.extend(s for s in m.comp.satellites if s.anchor in crit)
        return out

    def vertex_member(self, v: int) -> int | None:
        c = self.h.comp_of.get(v)
        return None if c is None else self.member_of_comp.get(c)

    # responsibility ----------------------------------------------------------------

    def move_result(self, member: int, sat: SatelliteElement, anchor: int, entry: int) -> Member:
        """Member ``member`` after moving ``sat`` onto ``anchor`` via ``entry``."""
        old = self.members[member].comp
        new_sat = SatelliteElement(sat.comp, anchor, entry)
        cover = (self.cover - {sat.rescue_edge}) | {norm(anchor, entry)}
        if self.satellite_of[sat.comp][0] == member:
            base = old.without_satellite(sat.comp, self.h)
        else:
            base = old
        return analyse_member(self.h, base.with_satellite(new_sat, self.h), cover, self.oracle)

    def responsible_witness(self, v: int) -> tuple[SatelliteElement, int] | None:
        """A critical satellite whose move onto O1 anchor ``v`` makes v's
        component critical, or ``None``."""
        i = self.vertex_member(v)
        if i is None:
            return None
        m = self.members[i]
        if m.critical or m.anchors.get(v) is not AnchorClass.O1:
            return None
        g = self.h.graph
        for sat in self.critical_satellites:
            if self.satellite_of[sat.comp][0] == i:
                continue
            comp = self.h.components[sat.comp]
            for w in sorted(comp.vertices):
                if not g.has_edge(v, w):
                    continue
                if self.move_result(i, sat, v, w).critical:
                    return sat, w
        return None

    @cached_property
    def responsible_anchors(self) -> frozenset[int]:
        if not self.critical_members:
            return frozenset()
        out = set()
        for m in self.members:
            if m.critical:
                continue
            for v in m.anchors_of(AnchorClass.O1):
                if self.responsible_witness(v) is not None:
                    out.add(v)
        return frozenset(out)

    def is_responsible(self, v: int) -> bool:
        return v in self.responsible_anchors

    # potential and family ----------------------------------------------------------

    def potential(self) -> Potential:
        n0 = sum(1 for m in self.members for c in m.anchors.values() if c is AnchorClass.ZERO)
        return Potential(n0, len(self.critical_members), self.ncc)

    def family_index(self) -> FamilyIndex:
        R = set(self.responsible_anchors)
        for m in self.members:
            R.update(m.two_anchors)
        buckets: dict[int, list[int]] = {i: [] for i in range(6)}
        critical_buckets: dict[int, list[int]] = {1: [], 2: []}
        for idx, m in enumerate(self.members):
            count = sum(1 for v in m.comp.vertices if v in R)
            buckets.setdefault(count, []).append(idx)
            if m.critical:
                critical_buckets.setdefault(count, []).append(idx)
        R_c = self.critical_anchors
        U_c = set()
        for sat in self.critical_satellites:
            U_c |= self.h.components[sat.comp].vertices
        residual = frozenset(range(self.h.graph.n)) - R_c - U_c
        return FamilyIndex(buckets, critical_buckets, frozenset(R), R_c,
                           frozenset(U_c), residual)

    def critical_path(self, v: int) -> list[int]:
        """Path through critical anchor ``v`` and its two bi-star satellites."""
        i = self.vertex_member(v)
        sats = self.members[i].comp.anchored_by(v)
        if len(sats) != 2:
            raise StructureError(f"critical anchor {v} does not anchor two satellites")
        tails = []
        for sat in sats:
            comp = self.h.components[sat.comp]
            tails.append(_tail_in_h(self.h, sat.entry, comp.vertices))
        tails.sort(key=lambda t: (-len(t), t))
        return list(tails[1][::-1]) + [v] + list(tails[0])

    def report(self) -> str:
        lines = []
        comps = self.h.components
        pot = self.potential()
        lines.append(f"H components: {len(comps)}; family members: {len(self.members)}; "
                     f"isolated bad: {len(self.isolated_bad)}")
        lines.append(f"cover edges: {len(self.cover)}; potential g={pot.g} "
                     f"(n0={pot.n0}, nc={pot.nc}, ncc={pot.ncc})")
        for idx, m in enumerate(self.members):
            center = comps[m.comp.center]
            tag = "critical" if m.critical else "composite" if m.composite else "isolated"
            lines.append(f"[{idx}] {tag} center={center.kind.value}{sorted(center.vertices)} "
                         f"s={m.metrics.s} eta={m.metrics.eta} trunk={m.trunk.order}")
            for v, cls in m.anchors.items():
                resp = " responsible" if v in self.responsible_anchors else ""
                lines.append(f"    anchor {v}: {cls.value}{resp}")
            for s in m.comp.satellites:
                sc = comps[s.comp]
                lines.append(f"    satellite {sc.kind.value}{sorted(sc.vertices)} "
                             f"rescue=({s.anchor}, {s.entry})")
        return "\n".join(lines)


def _tail_in_h(h: FrozenH, entry: int, vertices: frozenset[int]) -> tuple[int, ...]:
    adj: dict[int, list[int]] = {v: [] for v in vertices}
    for u, v in h.edges:
        if u in adj and v in adj:
            adj[u].append(v)
            adj[v].append(u)
    best = (entry,)
    stack = [(entry,)]
    while stack:
        path = stack.pop()
        if len(path) > len(best) or (len(path) == len(best) and path < best):
            best = path
        for w in sorted(adj[path[-1]]):
            if w not in path:
                stack.append(path + (w,))
    return best
