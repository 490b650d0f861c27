import pytest

from pathcover.graph import Graph, norm
from pathcover.hstate import FrozenH


def make_h(n, h_paths, matching, extra_edges=()):
    """FrozenH whose H-edges are the consecutive pairs of ``h_paths`` and whose
    graph is H plus ``extra_edges``."""
    h_edges = {norm(a, b) for p in h_paths for a, b in zip(p, p[1:])}
    g = Graph(n, h_edges | {norm(*e) for e in extra_edges})
    verts = {v for p in h_paths for v in p}
    return FrozenH(g, frozenset(verts), frozenset(h_edges),
                   frozenset(norm(*e) for e in matching))


def bistar(a, b, c, d):
    return [a, b, c, d], [(a, b), (c, d)]


@pytest.fixture
def critical14():
    """Bi-star center 0-1-2-3; vertex 1 anchors bi-stars 4-7 and 8-11 through
    their interior vertices 5 and 9; vertex 2 anchors the edge 12-13."""
    paths, match = [], []
    for quad in ((0, 1, 2, 3), (4, 5, 6, 7), (8, 9, 10, 11)):
        p, m = bistar(*quad)
        paths.append(p)
        match += m
    paths.append([12, 13])
    match.append((12, 13))
    cover = [(1, 5), (1, 9), (2, 12)]
    return make_h(14, paths, match, cover), frozenset(norm(*e) for e in cover)


ACCEPTANCE: dict[int, str] = {}


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
