"""Immutable simple graphs, edge-list I/O, components and solution checks."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Edge = tuple[int, int]


class ParseError(ValueError):
    """Malformed edge-list document."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ContractError(ValueError):
    pass


def norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Instances are treated as immutable values; algorithm state (matchings,
    covers, working subgraphs) is kept as edge subsets referring to one
    base graph.  ``labels`` maps local ids back to the ids of a parent graph
    when the graph was produced by :meth:`induced`.
    """

    __slots__ = ("n", "edges", "adj", "labels", "_adjset")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = (),
                 labels: Sequence[int] | None = None):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        seen: set[Edge] = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = norm(u, v)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        self.n = n
        self.edges: frozenset[Edge] = frozenset(seen)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in sorted(seen):
            adj[u].append(v)
            adj[v].append(u)
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj)
        self._adjset = tuple(frozenset(a) for a in self.adj)
        self.labels: tuple[int, ...] = tuple(labels) if labels is not None else tuple(range(n))
        if len(self.labels) != n:
            raise ValueError("labels must have one entry per vertex")

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adjset[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph on ``vertices`` with dense relabelling.

        The result's ``labels`` carry ids of *this* graph's parent chain, so
        paths found in the subgraph lift back with :meth:`lift`.
        """
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        sub_edges = [(index[u], index[v]) for u, v in self.edges
                     if u in index and v in index]
        return Graph(len(keep), sub_edges, labels=[self.labels[v] for v in keep])

    def lift(self, path: Sequence[int]) -> list[int]:
        return [self.labels[v] for v in path]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def parse_graph(text: str) -> Graph:
    """Parse the ``n m`` header + ``u v`` lines edge-list format.

    Blank lines and lines starting with ``#`` are ignored.
    """
    header: tuple[int, int] | None = None
    edges: list[Edge] = []
    seen: dict[Edge, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two integers, got {line!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        if header is None:
            if a < 0 or b < 0:
                raise ParseError("negative count in header", lineno)
            header = (a, b)
            continue
        n = header[0]
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"vertex id out of range 0..{n - 1}", lineno)
        if a == b:
            raise ParseError(f"self-loop at vertex {a}", lineno)
        key = norm(a, b)
        if key in seen:
            raise ParseError(f"duplicate edge {a} {b} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        edges.append(key)
    if header is None:
        raise ParseError("missing 'n m' header")
    if len(edges) != header[1]:
        raise ParseError(f"header declares {header[1]} edges, found {len(edges)}")
    return Graph(header[0], edges)


def serialize_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def components_of(vertices: Iterable[int], edges: Iterable[Edge]) -> list[list[int]]:
    """Connected components of the graph ``(vertices, edges)``.

    Each component is sorted; components are ordered by smallest vertex.
    """
    parent: dict[int, int] = {v: v for v in vertices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            if ru < rv:
                parent[rv] = ru
            else:
                parent[ru] = rv
    groups: dict[int, list[int]] = defaultdict(list)
    for v in sorted(parent):
        groups[find(v)].append(v)
    return sorted(groups.values(), key=lambda c: c[0])


def connected_components(g: Graph) -> list[list[int]]:
    return components_of(range(g.n), g.edges)


@dataclass(frozen=True)
class ContractedView:
    """One node per H-component; multigraph edges induced by cover edges."""

    node_of: dict[int, int]
    members: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def node_count(self) -> int:
        return len(self.members)

    def degree(self, node: int) -> int:
        return sum((a == node) + (b == node) for a, b in self.edges)

    def neighbors(self, node: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == node:
                out.add(b)
            elif b == node:
                out.add(a)
        return out


def contract(h_components: Sequence[Sequence[int]], cover: Iterable[Edge]) -> ContractedView:
    node_of = {v: i for i, comp in enumerate(h_components) for v in comp}
    cross = []
    for u, v in sorted(cover):
        a, b = node_of.get(u), node_of.get(v)
        if a is None or b is None:
            raise ContractError(f"cover edge ({u}, {v}) leaves the component set")
        if a == b:
            raise ContractError(f"cover edge ({u}, {v}) is internal to one component")
        cross.append((min(a, b), max(a, b)))
    return ContractedView(node_of, tuple(tuple(c) for c in h_components), tuple(cross))


@dataclass
class Solution:
    """Vertex-disjoint paths; ``covered`` is the total number of vertices."""

    paths: list[list[int]] = field(default_factory=list)

    @property
    def covered(self) -> int:
        return sum(len(p) for p in self.paths)

    def canonical(self) -> list[list[int]]:
        out = [p if p[0] <= p[-1] else p[::-1] for p in self.paths if p]
        return sorted(out)


class SolutionError(ValueError):
    pass


def check_solution(g: Graph, s: Solution, k: int = 5) -> str | None:
    """Return the first violated feasibility condition, or ``None``."""
    used: set[int] = set()
    for idx, path in enumerate(s.paths):
        if len(path) < k:
            return f"path {idx} shorter than {k} ({len(path)} vertices)"
        if len(set(path)) != len(path):
            return f"path {idx} repeats a vertex"
        for v in path:
            if not 0 <= v < g.n:
                return f"path {idx} has out-of-range vertex {v}"
        for u, v in zip(path, path[1:]):
            if not g.has_edge(u, v):
                return f"path {idx} uses non-edge ({u}, {v})"
        clash = used.intersection(path)
        if clash:
            return f"paths not disjoint: vertex {min(clash)} reused by path {idx}"
        used.update(path)
    return None


def validate_solution(g: Graph, s: Solution, k: int = 5) -> int:
    """Raise :class:`SolutionError` unless ``s`` is feasible; return ``covered``."""
    problem = check_solution(g, s, k)
    if problem is not None:
        raise SolutionError(problem)
    return s.covered
