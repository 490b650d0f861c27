"""The working subgraph H, its maximum matching M and component shapes."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

from .graph import Edge, Graph, components_of, norm


class InvariantViolation(AssertionError):
    """A component of H does not have one of the five allowed shapes."""


class ComponentKind(enum.Enum):
    EDGE = "edge"
    TRIANGLE = "triangle"
    STAR = "star"
    BISTAR = "bi-star"
    FIVE_PATH = "5-path"

    @property
    def bad(self) -> bool:
        return self is not ComponentKind.FIVE_PATH

    @property
    def weight(self) -> int:
        """Rescue weight of a bad component: its number of M-edges."""
        return 2 if self is ComponentKind.BISTAR else 1


@dataclass(frozen=True)
class Component:
    """A connected component of H with its shape and (for paths) vertex order."""

    index: int
    vertices: frozenset[int]
    kind: ComponentKind
    m_edges: frozenset[Edge]
    order: tuple[int, ...] = ()

    @property
    def bad(self) -> bool:
        return self.kind.bad

    @property
    def matched(self) -> frozenset[int]:
        return frozenset(v for e in self.m_edges for v in e)


def classify_component(vertices, h_edges, m_edges) -> tuple[ComponentKind, tuple[int, ...]]:
    """Classify one component of H; raises :class:`InvariantViolation`.

    The returned tuple lists the path order ``v1..v5`` for 5-paths and the
    ``v1-v2-v3-v4`` matched 4-path for bi-stars (empty otherwise).
    """
    vs = sorted(vertices)
    es = [e for e in h_edges if e[0] in vertices and e[1] in vertices]
    ms = [e for e in m_edges if e[0] in vertices and e[1] in vertices]
    deg = {v: 0 for v in vs}
    for u, v in es:
        deg[u] += 1
        deg[v] += 1
    n, m = len(vs), len(es)
    big = [v for v in vs if deg[v] >= 2]

    if n == 2 and m == 1:
        if len(ms) != 1:
            raise InvariantViolation(f"edge component {vs} must be its M-edge")
        return ComponentKind.EDGE, ()
    if n == 3 and m == 3:
        if len(ms) != 1:
            raise InvariantViolation(f"triangle {vs} needs exactly one M-edge")
        return ComponentKind.TRIANGLE, ()
    if m != n - 1:
        raise InvariantViolation(f"component {vs} is neither a tree nor a triangle")
    if len(big) == 1:
        if len(ms) != 1:
            raise InvariantViolation(f"star {vs} needs exactly one M-edge")
        return ComponentKind.STAR, ()
    if len(big) == 2:
        c1, c2 = big
        if norm(c1, c2) not in es:
            raise InvariantViolation(f"bi-star {vs} centers not adjacent")
        if len(ms) != 2:
            raise InvariantViolation(f"bi-star {vs} needs exactly two M-edges")
        order: list[int] = []
        for c in (c1, c2):
            hits = [e for e in ms if c in e]
            if len(hits) != 1:
                raise InvariantViolation(f"bi-star {vs}: M-edge must join center {c} to a leaf")
            leaf = hits[0][0] if hits[0][1] == c else hits[0][1]
            if deg[leaf] != 1:
                raise InvariantViolation(f"bi-star {vs}: M-edge at {c} does not end at a leaf")
            order.append(leaf)
        return ComponentKind.BISTAR, (order[0], c1, c2, order[1])
    if n == 5 and len(big) == 3 and all(deg[v] <= 2 for v in vs):
        ends = [v for v in vs if deg[v] == 1]
        adj = {v: [] for v in vs}
        for u, v in es:
            adj[u].append(v)
            adj[v].append(u)
        path = [min(ends)]
        while len(path) < 5:
            nxt = [w for w in adj[path[-1]] if w not in path]
            path.append(nxt[0])
        need = {norm(path[0], path[1]), norm(path[3], path[4])}
        if set(ms) != need:
            raise InvariantViolation(f"5-path {path} must have exactly its end edges in M")
        return ComponentKind.FIVE_PATH, tuple(path)
    raise InvariantViolation(f"component {vs} has no allowed shape")


@dataclass
class HState:
    """Subgraph H of G (vertex and edge sets) with matching M inside it."""

    graph: Graph
    vertices: set[int] = field(default_factory=set)
    edges: set[Edge] = field(default_factory=set)
    matching: set[Edge] = field(default_factory=set)

    def copy(self) -> "HState":
        return HState(self.graph, set(self.vertices), set(self.edges), set(self.matching))

    def freeze(self) -> "FrozenH":
        return FrozenH(self.graph, frozenset(self.vertices), frozenset(self.edges),
                       frozenset(self.matching))

    def vertex_sets(self) -> list[list[int]]:
        return components_of(self.vertices, self.edges)


@dataclass(frozen=True)
class FrozenH:
    """Read-only H after phase 1; carries the classified components."""

    graph: Graph
    vertices: frozenset[int]
    edges: frozenset[Edge]
    matching: frozenset[Edge]

    @cached_property
    def components(self) -> tuple[Component, ...]:
        out = []
        for i, vs in enumerate(components_of(self.vertices, self.edges)):
            vset = frozenset(vs)
            ms = frozenset(e for e in self.matching if e[0] in vset)
            kind, order = classify_component(vset, self.edges, ms)
            out.append(Component(i, vset, kind, ms, order))
        return tuple(out)

    @cached_property
    def comp_of(self) -> dict[int, int]:
        return {v: c.index for c in self.components for v in c.vertices}

    @cached_property
    def matched(self) -> frozenset[int]:
        return frozenset(v for e in self.matching for v in e)

    def thaw(self) -> HState:
        return HState(self.graph, set(self.vertices), set(self.edges), set(self.matching))


def check_invariant(h: HState | FrozenH) -> None:
    """Raise :class:`InvariantViolation` unless every H-component is allowed."""
    if not set(h.matching) <= set(h.edges):
        raise InvariantViolation("M is not a subset of E(H)")
    for vs in components_of(h.vertices, h.edges):
        vset = frozenset(vs)
        classify_component(vset, h.edges, [e for e in h.matching if e[0] in vset])
