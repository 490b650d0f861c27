"""Exact solvers for covering vertices by disjoint paths of order >= k.

``exact_opt`` is a memoized branch-and-bound over vertex bitmasks for
small graphs.  ``trunk_opt`` solves the bounded trunk shape (a small center
with satellites hanging off single rescue edges) by enumerating center
paths and attaching the longest satellite tails.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator

from .graph import Graph, Solution

if TYPE_CHECKING:
    from .structure import Trunk

DEFAULT_VERTEX_CAP = 18


class BudgetExceeded(RuntimeError):
    """The exact search hit a vertex, node or time cap; no answer given."""


def _default_cap() -> int:
    raw = os.environ.get("PATHCOVER_ORACLE_CAP")
    return int(raw) if raw else DEFAULT_VERTEX_CAP


@dataclass
class SearchBudget:
    max_vertices: int | None = None
    max_nodes: int = 20_000_000
    max_seconds: float | None = None

    def __post_init__(self):
        if self.max_vertices is None:
            self.max_vertices = _default_cap()


class _Search:
    def __init__(self, g: Graph, k: int, budget: SearchBudget):
        self.g = g
        self.k = k
        self.max_len = 2 * k - 1
        self.budget = budget
        self.nodes = 0
        self.deadline = (time.monotonic() + budget.max_seconds
                         if budget.max_seconds is not None else None)
        self.nbr = [0] * g.n
        for v in range(g.n):
            for w in g.adj[v]:
                self.nbr[v] |= 1 << w
        self.memo: dict[int, tuple[int, tuple[tuple[int, ...], ...]]] = {}
        self.comp_memo: dict[int, tuple[int, tuple[tuple[int, ...], ...]]] = {}

    def tick(self, amount: int = 1) -> None:
        self.nodes += amount
        if self.nodes > self.budget.max_nodes:
            raise BudgetExceeded(f"node cap {self.budget.max_nodes} exceeded")
        if self.deadline is not None and (self.nodes & 1023) == 0 \
                and time.monotonic() > self.deadline:
            raise BudgetExceeded(f"time cap {self.budget.max_seconds}s exceeded")

    def components(self, mask: int) -> list[int]:
        out = []
        rest = mask
        while rest:
            low = rest & -rest
            comp = frontier = low
            while frontier:
                b = frontier & -frontier
                frontier ^= b
                new = self.nbr[b.bit_length() - 1] & mask & ~comp
                comp |= new
                frontier |= new
            out.append(comp)
            rest &= ~comp
        return out

    def solve(self, mask: int) -> tuple[int, tuple[tuple[int, ...], ...]]:
        hit = self.memo.get(mask)
        if hit is not None:
            return hit
        total = 0
        paths: list[tuple[int, ...]] = []
        for comp in self.components(mask):
            if comp.bit_count() < self.k:
                continue
            val, ps = self.solve_component(comp)
            total += val
            paths.extend(ps)
        result = (total, tuple(paths))
        self.memo[mask] = result
        return result

    def solve_component(self, comp: int) -> tuple[int, tuple[tuple[int, ...], ...]]:
        hit = self.comp_memo.get(comp)
        if hit is not None:
            return hit
        size = comp.bit_count()
        ham = self.hamiltonian_path(comp)
        if ham is not None:
            result = (size, (ham,))
            self.comp_memo[comp] = result
            return result
        verts = _bits(comp)
        pivot = min(verts, key=lambda v: ((self.nbr[v] & comp).bit_count(), v))
        pbit = 1 << pivot
        best, best_paths = self.solve(comp & ~pbit)
        candidates = sorted(self.paths_through(pivot, comp).items(),
                            key=lambda kv: (-kv[0].bit_count(), kv[1]))
        for pmask, path in candidates:
            if best == size:
                break
            plen = pmask.bit_count()
            if plen + (comp & ~pmask).bit_count() <= best:
                continue
            self.tick()
            val, ps = self.solve(comp & ~pmask)
            if plen + val > best:
                best = plen + val
                best_paths = (path,) + ps
        result = (best, best_paths)
        self.comp_memo[comp] = result
        return result

    def hamiltonian_path(self, comp: int) -> tuple[int, ...] | None:
        verts = _bits(comp)
        if len(verts) == 1:
            return (verts[0],)
        leaves = [v for v in verts if (self.nbr[v] & comp).bit_count() == 1]
        if len(leaves) > 2:
            return None
        starts = leaves if leaves else verts
        failed: set[tuple[int, int]] = set()
        full = comp
        path: list[int] = []

        def dfs(v: int, visited: int) -> bool:
            if visited == full:
                return True
            key = (visited, v)
            if key in failed:
                return False
            self.tick()
            options = self.nbr[v] & full & ~visited
            order = sorted(_bits(options),
                           key=lambda w: ((self.nbr[w] & full & ~visited).bit_count(), w))
            for w in order:
                path.append(w)
                if dfs(w, visited | (1 << w)):
                    return True
                path.pop()
            failed.add(key)
            return False

        for s in starts:
            path[:] = [s]
            if dfs(s, 1 << s):
                return tuple(path)
        return None

    def arms(self, start: int, comp: int) -> Iterator[tuple[int, ...]]:
        """Simple paths from ``start`` inside ``comp`` with <= max_len vertices."""
        stack = [((start,), 1 << start)]
        while stack:
            path, used = stack.pop()
            yield path
            if len(path) == self.max_len:
                continue
            for w in _bits(self.nbr[path[-1]] & comp & ~used):
                stack.append((path + (w,), used | (1 << w)))

    def paths_through(self, pivot: int, comp: int) -> dict[int, tuple[int, ...]]:
        """One witness path per vertex set of order k..2k-1 containing ``pivot``."""
        found: dict[int, tuple[int, ...]] = {}
        arms = list(self.arms(pivot, comp))
        self.tick(len(arms))
        masks = [_mask(a) for a in arms]
        for i, a in enumerate(arms):
            if len(a) >= self.k:
                found.setdefault(masks[i], a)
        if (self.nbr[pivot] & comp).bit_count() >= 2:
            for i, a in enumerate(arms):
                if len(a) < 2:
                    continue
                for j in range(i + 1, len(arms)):
                    b = arms[j]
                    total = len(a) + len(b) - 1
                    if len(b) < 2 or total < self.k or total > self.max_len:
                        continue
                    if masks[i] & masks[j] != 1 << pivot:
                        continue
                    found.setdefault(masks[i] | masks[j], a[::-1] + b[1:])
                self.tick()
        return found


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _mask(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def exact_opt(g: Graph, k: int = 5, budget: SearchBudget | None = None) -> Solution:
    """Optimal set of vertex-disjoint paths of order >= ``k`` in ``g``.

    Raises :class:`BudgetExceeded` if ``g`` has more vertices than the cap
    or the search runs over its node/time budget.
    """
    if k < 1:
        raise ValueError("k must be positive")
    budget = budget or SearchBudget()
    if g.n > budget.max_vertices:
        raise BudgetExceeded(f"{g.n} vertices exceeds oracle cap {budget.max_vertices}")
    search = _Search(g, k, budget)
    _, paths = search.solve((1 << g.n) - 1)
    return Solution([list(p) for p in paths])


def exact_value(g: Graph, k: int = 5, budget: SearchBudget | None = None) -> int:
    return exact_opt(g, k, budget).covered


class TrunkShapeError(ValueError):
    pass


def _longest_from(g: Graph, start: int, allowed: frozenset[int]) -> tuple[int, ...]:
    best: tuple[int, ...] = (start,)
    stack = [(start,)]
    while stack:
        path = stack.pop()
        if len(path) > len(best) or (len(path) == len(best) and path < best):
            best = path
        for w in g.adj[path[-1]]:
            if w in allowed and w not in path:
                stack.append(path + (w,))
    return best


def satellite_tail(g: Graph, entry: int, vertices: frozenset[int]) -> tuple[int, ...]:
    """Longest path inside ``vertices`` starting at ``entry`` (ties: lexicographic)."""
    return _longest_from(g, entry, vertices)


def _center_paths(g: Graph, center: list[int]) -> Iterator[tuple[int, ...]]:
    allowed = frozenset(center)
    for s in center:
        stack = [(s,)]
        while stack:
            path = stack.pop()
            if path[0] <= path[-1]:
                yield path
            for w in g.adj[path[-1]]:
                if w in allowed and w not in path:
                    stack.append(path + (w,))


def trunk_opt(trunk: "Trunk", k: int = 5) -> Solution:
    """Exact optimum of a trunk graph, in the trunk's local vertex ids.

    Uses the trunk shape when it holds and falls back to :func:`exact_opt`
    otherwise.
    """
    g = trunk.graph
    try:
        return _trunk_structured(trunk, k)
    except TrunkShapeError:
        return exact_opt(g, k, SearchBudget(max_vertices=max(g.n, 1)))


def _trunk_structured(trunk: "Trunk", k: int) -> Solution:
    g = trunk.graph
    center = sorted(trunk.center)
    if len(center) > 8:
        raise TrunkShapeError("center too large for enumeration")
    owner: dict[int, int] = {v: -1 for v in center}
    tails: dict[int, list[tuple[int, ...]]] = {v: [] for v in center}
    for idx, sat in enumerate(trunk.satellites):
        for v in sat.vertices:
            if v in owner:
                raise TrunkShapeError("satellites overlap")
            owner[v] = idx
        if sat.anchor not in tails or sat.entry not in sat.vertices:
            raise TrunkShapeError("rescue edge does not join center to satellite")
    if len(owner) != g.n:
        raise TrunkShapeError("trunk has vertices outside center and satellites")
    for u, v in g.edges:
        a, b = owner[u], owner[v]
        if a == b:
            continue
        if a != -1 and b != -1:
            raise TrunkShapeError("edge between two satellites")
        sat_idx, c, s = (b, u, v) if a == -1 else (a, v, u)
        sat = trunk.satellites[sat_idx]
        if (c, s) != (sat.anchor, sat.entry):
            raise TrunkShapeError("satellite attached by more than its rescue edge")
    for sat in trunk.satellites:
        tail = satellite_tail(g, sat.entry, frozenset(sat.vertices))
        # a satellite hosting a k-path by itself breaks the shape argument
        longest = max((len(_longest_from(g, v, frozenset(sat.vertices)))
                       for v in sat.vertices), default=0)
        if longest >= k:
            raise TrunkShapeError("satellite contains a long path")
        tails[sat.anchor].append(tail)
    for v in center:
        tails[v].sort(key=lambda t: (-len(t), t))

    index = {v: i for i, v in enumerate(center)}
    candidates: dict[int, list[tuple[int, tuple[int, ...]]]] = {}
    for path in _center_paths(g, center):
        if len(path) == 1:
            ts = tails[path[0]][:2]
            left = ts[1][::-1] if len(ts) > 1 else ()
            right = ts[0] if ts else ()
            full = left + path + right
        else:
            head = tails[path[0]][0][::-1] if tails[path[0]] else ()
            tail = tails[path[-1]][0] if tails[path[-1]] else ()
            full = head + path + tail
        if len(full) < k:
            continue
        cmask = 0
        for v in path:
            cmask |= 1 << index[v]
        low = cmask & -cmask
        candidates.setdefault(low, []).append((cmask, full))

    size = 1 << len(center)
    best: list[tuple[int, tuple[tuple[int, ...], ...]]] = [(0, ())] * size
    for mask in range(1, size):
        low = mask & -mask
        cand_best = best[mask ^ low]
        for cmask, full in candidates.get(low, ()):
            if cmask & mask != cmask:
                continue
            rest = best[mask ^ cmask]
            val = rest[0] + len(full)
            if val > cand_best[0]:
                cand_best = (val, (full,) + rest[1])
        best[mask] = cand_best
    return Solution([list(p) for p in best[size - 1][1]])
