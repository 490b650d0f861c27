from fractions import Fraction

import pytest

from pathcover.hstate import ComponentKind, InvariantViolation, check_invariant, classify_component
from pathcover.structure import (ALPHA, AnchorClass, Analysis, Metrics, Potential, StructureError,
                                 anchor_class, anchor_paths, build_trunk, decompose, is_critical)

from conftest import make_h

FIVE = [0, 1, 2, 3, 4]
FIVE_M = [(0, 1), (3, 4)]


def kind_of(vs, edges, ms):
    return classify_component(frozenset(vs), edges, ms)[0]


def test_classify_examples():
    assert kind_of([0, 1], [(0, 1)], [(0, 1)]) is ComponentKind.EDGE
    assert kind_of([0, 1, 2, 3], [(0, 1), (1, 2), (2, 3)], [(0, 1), (2, 3)]) is ComponentKind.BISTAR
    five = [(0, 1), (1, 2), (2, 3), (3, 4)]
    assert kind_of(range(5), five, FIVE_M) is ComponentKind.FIVE_PATH
    assert kind_of(range(3), [(0, 1), (1, 2), (0, 2)], [(0, 1)]) is ComponentKind.TRIANGLE
    assert kind_of(range(4), [(0, 1), (0, 2), (0, 3)], [(0, 2)]) is ComponentKind.STAR


def test_classify_five_path_order():
    kind, order = classify_component(frozenset(range(5)), [(0, 3), (3, 1), (1, 4), (4, 2)],
                                     [(0, 3), (2, 4)])
    assert kind is ComponentKind.FIVE_PATH and order == (0, 3, 1, 4, 2)


@pytest.mark.parametrize("vs,edges,ms", [
    (range(5), [(0, 1), (1, 2), (2, 3), (3, 4)], [(1, 2), (3, 4)]),
    (range(6), [(i, i + 1) for i in range(5)], [(0, 1), (4, 5)]),
    (range(4), [(0, 1), (1, 2), (2, 3), (0, 3)], [(0, 1), (2, 3)]),
    (range(3), [(0, 1), (1, 2)], []),
])
def test_classify_rejects(vs, edges, ms):
    with pytest.raises(InvariantViolation):
        classify_component(frozenset(vs), edges, ms)


def test_check_invariant_needs_m_inside_h():
    h = make_h(4, [[0, 1], [2, 3]], [(0, 1), (1, 2)])
    with pytest.raises(InvariantViolation):
        check_invariant(h)


def test_anchor_class():
    E, B, S = ComponentKind.EDGE, ComponentKind.BISTAR, ComponentKind.STAR
    assert anchor_class([]) is AnchorClass.ZERO
    assert anchor_class([E]) is AnchorClass.O0
    assert anchor_class([B]) is AnchorClass.O1
    assert anchor_class([B, B]) is AnchorClass.T2
    assert anchor_class([B, S]) is AnchorClass.T1
    assert anchor_class([E, S]) is AnchorClass.T0
    with pytest.raises(StructureError):
        anchor_class([E, E, E])


def test_decompose_five_path_with_edge():
    h = make_h(7, [FIVE, [5, 6]], FIVE_M + [(5, 6)], [(2, 5)])
    (k,) = decompose(h, {(2, 5)})
    assert h.components[k.center].kind is ComponentKind.FIVE_PATH
    assert [(s.anchor, s.entry) for s in k.satellites] == [(2, 5)]


def test_decompose_bistar_and_five_path():
    h = make_h(9, [[5, 6, 7, 8], FIVE], FIVE_M + [(5, 6), (7, 8)], [(0, 6)])
    (k,) = decompose(h, {(0, 6)})
    assert h.components[k.center].kind is ComponentKind.FIVE_PATH


@pytest.mark.parametrize("sat_path,sat_m,center_kind", [
    ([2, 3, 4, 5], [(2, 3), (4, 5)], ComponentKind.EDGE),
    ([2, 3, 4, 2], [(2, 3)], ComponentKind.EDGE),
])
def test_decompose_two_bad_components(sat_path, sat_m, center_kind):
    h = make_h(6, [[0, 1], sat_path], [(0, 1)] + sat_m, [(1, 3)])
    (k,) = decompose(h, {(1, 3)})
    assert h.components[k.center].kind is center_kind
    assert len(k.satellites) == 1


def test_decompose_hint_picks_center():
    h = make_h(4, [[0, 1], [2, 3]], [(0, 1), (2, 3)], [(1, 2)])
    assert decompose(h, {(1, 2)})[0].center == 0
    assert decompose(h, {(1, 2)}, hints=frozenset({1}))[0].center == 1


def test_decompose_rejects_chain():
    h = make_h(8, [[0, 1], [2, 3], [4, 5], [6, 7]], [(0, 1), (2, 3), (4, 5), (6, 7)],
               [(1, 2), (3, 4), (5, 6)])
    with pytest.raises(StructureError):
        decompose(h, {(1, 2), (3, 4), (5, 6)})


def test_trunk_trims_star_satellite():
    h = make_h(9, [FIVE, [6, 5, 7], [5, 8]], FIVE_M + [(5, 6)], [(2, 7)])
    (k,) = decompose(h, {(2, 7)})
    t = build_trunk(h, k, {(2, 7)})
    assert t.base_vertices() == frozenset(range(8))
    assert t.cover_edges == frozenset({(2, 7)})


def test_trunk_keeps_edge_satellites():
    h = make_h(9, [FIVE, [5, 6], [7, 8]], FIVE_M + [(5, 6), (7, 8)], [(1, 5), (3, 7)])
    (k,) = decompose(h, {(1, 5), (3, 7)})
    t = build_trunk(h, k, {(1, 5), (3, 7)})
    assert t.base_vertices() == k.vertices
    assert t.order == 9


def test_trunk_trims_bad_center():
    # star center 0 with leaves 1..3 (M-edge 0-1), bi-star satellite 4-7
    h = make_h(8, [[1, 0, 2], [0, 3], [4, 5, 6, 7]], [(0, 1), (4, 5), (6, 7)], [(0, 5)])
    (k,) = decompose(h, {(0, 5)})
    assert h.components[k.center].kind is ComponentKind.STAR
    t = build_trunk(h, k, {(0, 5)})
    assert t.base_vertices() == frozenset({0, 1, 4, 5, 6, 7})


def test_anchor_paths_o0():
    h = make_h(7, [FIVE, [5, 6]], FIVE_M + [(5, 6)], [(2, 5)])
    an = Analysis(h, {(2, 5)})
    (m,) = an.members
    assert m.anchors[2] is AnchorClass.O0
    assert anchor_paths(m.trunk, 2).q == (2, 5, 6)


def test_s14_member(critical14):
    h, cover = critical14
    an = Analysis(h, cover)
    (m,) = an.members
    assert m.anchors[1] is AnchorClass.T2
    assert m.anchors[2] is AnchorClass.O0
    assert m.anchors[0] is AnchorClass.ZERO
    assert (m.metrics.s, m.metrics.eta) == (14, 7)
    assert m.metrics.ratio == 2
    assert m.critical
    ap = anchor_paths(m.trunk, 1)
    assert len(ap.p) >= 7 and len(ap.q) >= 4
    assert an.critical_anchors == frozenset({1})
    assert {s.comp for s in an.critical_satellites} == {1, 2}


def test_family_index_critical(critical14):
    h, cover = critical14
    an = Analysis(h, cover)
    fam = an.family_index()
    assert fam.R_c == frozenset({1})
    assert fam.U_c == frozenset(range(4, 12))
    assert fam.residual == frozenset({0, 2, 3, 12, 13})
    assert fam.weighted_critical == 1
    path = an.critical_path(1)
    assert len(path) == 7 and 1 in path
    assert set(path) <= fam.R_c | fam.U_c
    assert all(h.graph.has_edge(a, b) for a, b in zip(path, path[1:]))


def test_family_index_without_critical():
    h = make_h(7, [FIVE, [5, 6]], FIVE_M + [(5, 6)], [(2, 5)])
    fam = Analysis(h, {(2, 5)}).family_index()
    assert fam.R_c == fam.U_c == frozenset()
    assert fam.residual == frozenset(range(7))


def test_isolated_members():
    h = make_h(8, [FIVE, [5, 6]], FIVE_M + [(5, 6)])
    an = Analysis(h, set())
    (m,) = an.members
    assert (m.metrics.s, m.metrics.eta) == (4, 5)
    assert not m.composite and not m.critical
    assert an.isolated_bad == [1]
    # one member, one isolated bad component, one vertex outside H
    assert an.ncc == 3


def test_is_critical_boundaries():
    assert ALPHA == Fraction(15, 8)
    assert is_critical(Metrics(14, 7))
    assert not is_critical(Metrics(14, 8))
    assert is_critical(Metrics(30, 16))
    with pytest.raises(StructureError):
        is_critical(Metrics(4, 0))


def test_potential_arithmetic():
    assert Potential(3, 2, 4).g == -11
    assert Potential(0, 0, 5).g == -30
    assert Potential(0, 1, 1).g == -1


def _with_responsible(critical14):
    """Second member: bi-star center 14-17 whose vertex 15 anchors bi-star
    18-21, vertex 16 anchors edge 22-23; G-edge 6-15 lets the critical
    satellite 4-7 move onto 15."""
    _, cover = critical14
    paths = [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11], [12, 13],
             [14, 15, 16, 17], [18, 19, 20, 21], [22, 23]]
    match = [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (12, 13),
             (14, 15), (16, 17), (18, 19), (20, 21), (22, 23)]
    more = set(cover) | {(15, 19), (16, 22)}
    return make_h(24, paths, match, more | {(6, 15)}), frozenset(more)


def test_responsible_anchor(critical14):
    h, cover = _with_responsible(critical14)
    an = Analysis(h, cover)
    crit = an.members[an.critical_members[0]]
    other = an.members[an.vertex_member(15)]
    assert other.anchors[15] is AnchorClass.O1 and not other.critical
    assert an.is_responsible(15)
    sat, entry = an.responsible_witness(15)
    assert entry == 6
    moved = an.move_result(an.vertex_member(15), sat, 15, 6)
    assert (moved.metrics.s, moved.metrics.eta) == (14, 7)
    # a critical member's own anchors are never responsible
    assert not any(an.is_responsible(v) for v in crit.anchors)


def test_report_mentions_members(critical14):
    h, cover = critical14
    text = Analysis(h, cover).report()
    assert "critical" in text and "s=14 eta=7" in text
