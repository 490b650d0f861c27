"""Maximum cardinality matching in general graphs.

Edmonds' blossom-shrinking search, one augmenting path per free vertex,
started from a greedy matching taken in sorted edge order so that results
are reproducible.  :func:`certify_maximum` is a separate exhaustive
alternating-path search used to check results on small graphs.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .graph import Edge, Graph, norm


class MatchingError(ValueError):
    pass


def _mate_array(n: int, matching: Iterable[Edge]) -> list[int]:
    mate = [-1] * n
    for u, v in matching:
        if mate[u] != -1 or mate[v] != -1:
            raise MatchingError(f"edges share an endpoint at ({u}, {v})")
        mate[u], mate[v] = v, u
    return mate


def _to_edges(mate: list[int]) -> frozenset[Edge]:
    return frozenset(norm(v, w) for v, w in enumerate(mate) if w > v)


def _augmenting_search(adj, mate: list[int], root: int) -> tuple[int, list[int]]:
    """BFS from ``root`` in the alternating forest, shrinking blossoms.

    Returns the free vertex reached (or -1) and the parent array needed to
    walk the augmenting path back to ``root``.
    """
    n = len(adj)
    parent = [-1] * n
    base = list(range(n))
    in_tree = [False] * n
    in_tree[root] = True
    queue = deque([root])

    def lca(a: int, b: int) -> int:
        seen = [False] * n
        while True:
            a = base[a]
            seen[a] = True
            if mate[a] == -1:
                break
            a = parent[mate[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = parent[mate[b]]

    def mark(v: int, b: int, child: int, blossom: list[bool]) -> None:
        while base[v] != b:
            blossom[base[v]] = blossom[base[mate[v]]] = True
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if base[v] == base[w] or mate[v] == w:
                continue
            if w == root or (mate[w] != -1 and parent[mate[w]] != -1):
                b = lca(v, w)
                blossom = [False] * n
                mark(v, b, w, blossom)
                mark(w, b, v, blossom)
                for i in range(n):
                    if blossom[base[i]]:
                        base[i] = b
                        if not in_tree[i]:
                            in_tree[i] = True
                            queue.append(i)
            elif parent[w] == -1:
                parent[w] = v
                if mate[w] == -1:
                    return w, parent
                in_tree[mate[w]] = True
                queue.append(mate[w])
    return -1, parent


def maximum_matching(g: Graph) -> frozenset[Edge]:
    """Maximum cardinality matching of ``g`` as a set of normalized edges."""
    mate = [-1] * g.n
    for u, v in g.sorted_edges():
        if mate[u] == -1 and mate[v] == -1:
            mate[u], mate[v] = v, u
    for root in range(g.n):
        if mate[root] != -1 or not g.adj[root]:
            continue
        end, parent = _augmenting_search(g.adj, mate, root)
        while end != -1:
            pv = parent[end]
            nxt = mate[pv]
            mate[end], mate[pv] = pv, end
            end = nxt
    return _to_edges(mate)


def is_matching(g: Graph, matching: Iterable[Edge]) -> bool:
    try:
        mate = _mate_array(g.n, matching)
    except MatchingError:
        return False
    return all(g.has_edge(v, w) for v, w in enumerate(mate) if w > v)


def certify_maximum(g: Graph, matching: Iterable[Edge]) -> list[int] | None:
    """``None`` if ``matching`` is maximum, else an augmenting path witness.

    Exhaustive search over alternating simple paths; exponential in the
    worst case and meant for verification at desk scale.
    """
    matching = list(matching)
    mate = _mate_array(g.n, matching)
    for u, v in matching:
        if not g.has_edge(u, v):
            raise MatchingError(f"({u}, {v}) is not an edge of the graph")

    def extend(path: list[int], on_path: set[int]) -> list[int] | None:
        x = path[-1]
        for y in g.adj[x]:
            if y in on_path or mate[x] == y:
                continue
            if mate[y] == -1:
                return path + [y]
            z = mate[y]
            if z in on_path:
                continue
            on_path.update((y, z))
            found = extend(path + [y, z], on_path)
            if found is not None:
                return found
            on_path.difference_update((y, z))
        return None

    for root in range(g.n):
        if mate[root] == -1 and g.adj[root]:
            found = extend([root], {root})
            if found is not None:
                return found
    return None


def matched_vertices(matching: Iterable[Edge]) -> set[int]:
    return {v for e in matching for v in e}
