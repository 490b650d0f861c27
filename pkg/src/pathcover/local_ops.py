"""Operations 1-3 on the cover C and the potential g that bounds them.

Every operation moves a critical satellite onto a new attachment point.
Candidates are scanned in a fixed order (operation kind, then critical
satellite, then edge) so that runs are reproducible.  After each applied
operation the potential must drop; a non-decreasing step is a bug and raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .factor import cover_weight, prune_cover
from .graph import Edge, norm
from .hstate import ComponentKind, FrozenH
from .structure import (AnchorClass, Analysis, Potential, SatelliteElement,
                        StructureError, TrunkOracle)


class PotentialError(AssertionError):
    """An operation failed to decrease the potential, or ran too often."""


@dataclass(frozen=True)
class OpRecord:
    kind: int
    satellite: int
    target: int | None
    edge: Edge
    g_before: int
    g_after: int

    def line(self) -> str:
        tgt = "-" if self.target is None else str(self.target)
        return (f"op{self.kind} S1={self.satellite} S2={tgt} edge={self.edge} "
                f"g {self.g_before} -> {self.g_after}")


@dataclass
class LocalSearchResult:
    cover: frozenset[Edge]
    hints: frozenset[int]
    analysis: Analysis
    ops: list[OpRecord] = field(default_factory=list)
    prunes: int = 0

    def counts(self) -> tuple[int, int, int]:
        return tuple(sum(1 for r in self.ops if r.kind == k) for k in (1, 2, 3))


def potential(analysis: Analysis) -> Potential:
    return analysis.potential()


@dataclass(frozen=True)
class _Candidate:
    kind: int
    sat: SatelliteElement
    target: int | None
    v1: int
    v2: int


def _candidates(an: Analysis) -> Iterable[_Candidate]:
    """Applicable operations in search order, lazily."""
    h = an.h
    g = h.graph
    comps = h.components
    crit = sorted(an.critical_satellites, key=lambda s: (min(comps[s.comp].vertices), s.comp))
    cover = an.cover

    def edges_of(sat: SatelliteElement):
        verts = comps[sat.comp].vertices
        out = []
        for v1 in sorted(verts):
            for v2 in g.adj[v1]:
                if v2 in verts or norm(v1, v2) in cover:
                    continue
                out.append((v1, v2))
        return sorted(out, key=lambda e: norm(*e))

    # Operation 1: onto a 0-anchor or a non-responsible 1-anchor
    for sat in crit:
        for v1, v2 in edges_of(sat):
            i = an.vertex_member(v2)
            if i is None:
                continue
            cls = an.members[i].anchors.get(v2)
            if cls is AnchorClass.ZERO or (cls is not None and cls.degree == 1
                                           and not an.is_responsible(v2)):
                yield _Candidate(1, sat, None, v1, v2)
    # Operations 2 and 3: onto a vertex of another satellite
    for kind in (2, 3):
        for sat in crit:
            for v1, v2 in edges_of(sat):
                c2 = h.comp_of.get(v2)
                if c2 is None or c2 not in an.satellite_of:
                    continue
                i, s2 = an.satellite_of[c2]
                k2 = an.members[i].comp
                center_bad = comps[k2.center].bad
                nsat = len(k2.satellites)
                if kind == 2 and center_bad and nsat == 1:
                    yield _Candidate(2, sat, s2.comp, v1, v2)
                if kind == 3 and (not center_bad or nsat >= 2):
                    yield _Candidate(3, sat, s2.comp, v1, v2)


def _apply(an: Analysis, cand: _Candidate) -> tuple[frozenset[Edge], frozenset[int]]:
    cover = set(an.cover)
    cover.discard(cand.sat.rescue_edge)
    hints = set(an.hints)
    if cand.kind == 3:
        _, s2 = an.satellite_of[cand.target]
        cover.discard(s2.rescue_edge)
    if cand.kind in (2, 3):
        hints.add(cand.target)
    cover.add(norm(cand.v1, cand.v2))
    return frozenset(cover), frozenset(hints)


def _valid_cover(cover: frozenset[Edge], h: FrozenH) -> bool:
    deg: dict[int, int] = {}
    for u, v in cover:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return all(d <= 2 for d in deg.values())


def apply_operation(an: Analysis, cand: _Candidate, oracle: TrunkOracle) -> Analysis | None:
    """Analysis after ``cand``; ``None`` if the result is not a same-weight
    cover with the star shape (the operation is then not applicable)."""
    cover, hints = _apply(an, cand)
    if not _valid_cover(cover, an.h):
        return None
    if cover_weight(cover, an.h) != cover_weight(an.cover, an.h):
        return None
    try:
        return Analysis(an.h, cover, oracle, hints)
    except StructureError:
        return None


def run_until_stable(h: FrozenH, cover: Iterable[Edge], oracle: TrunkOracle | None = None,
                     hints: frozenset[int] = frozenset(), strict: bool = True) -> LocalSearchResult:
    """Apply operations until none applies, re-pruning C in between.

    Raises :class:`PotentialError` if an operation does not lower ``g`` or
    the number of applications passes ``12n + 1``.
    """
    oracle = oracle or TrunkOracle()
    n = h.graph.n
    cap = 12 * n + 1
    an = Analysis(h, prune_cover(cover, h), oracle, hints)
    result = LocalSearchResult(an.cover, an.hints, an)
    while True:
        progressed = True
        while progressed:
            progressed = False
            if not an.critical_members:
                break
            g_before = an.potential().g
            for cand in _candidates(an):
                nxt = apply_operation(an, cand, oracle)
                if nxt is None:
                    continue
                g_after = nxt.potential().g
                record = OpRecord(cand.kind, cand.sat.comp, cand.target,
                                  norm(cand.v1, cand.v2), g_before, g_after)
                if g_after >= g_before:
                    if strict:
                        raise PotentialError(f"potential did not drop: {record.line()}")
                    continue
                result.ops.append(record)
                if len(result.ops) > cap:
                    raise PotentialError(f"more than {cap} operations")
                an = nxt
                progressed = True
                break
        pruned = prune_cover(an.cover, h)
        if pruned == an.cover:
            break
        result.prunes += len(an.cover) - len(pruned)
        an = Analysis(h, pruned, oracle, an.hints)
    result.cover = an.cover
    result.hints = an.hints
    result.analysis = an
    return result


def stuck_edges(an: Analysis) -> list[tuple[int, int]]:
    """G-edges leaving a critical satellite that do not end at a 2-anchor or a
    responsible 1-anchor (empty once no operation applies)."""
    h = an.h
    bad = []
    for sat in an.critical_satellites:
        verts = h.components[sat.comp].vertices
        for v1 in sorted(verts):
            for v2 in h.graph.adj[v1]:
                if v2 in verts:
                    continue
                i = an.vertex_member(v2)
                cls = an.members[i].anchors.get(v2) if i is not None else None
                if cls is not None and (cls.degree == 2 or an.is_responsible(v2)):
                    continue
                if norm(v1, v2) == sat.rescue_edge:
                    continue
                bad.append((v1, v2))
    return bad
