import random

import pytest

from pathcover.factor import (build_fg_instance, build_rescue_graph, compute_m_c, cover_weight,
                              extract_cover, max_weight_cover, max_weight_fg_factor, prune_cover,
                              rescued_components)
from pathcover.graph import Graph
from pathcover.pipeline import phase1

from conftest import make_h
from oracles import brute_cover_weight, brute_factor_weight

FIVE = [0, 1, 2, 3, 4]
FIVE_M = [(0, 1), (3, 4)]


def test_rescue_graph_ignores_good_pairs():
    h = make_h(10, [FIVE, [5, 6, 7, 8, 9]], FIVE_M + [(5, 6), (8, 9)], [(2, 7)])
    assert build_rescue_graph(h.graph, h).eligible == frozenset()


def test_rescue_graph_edge_to_bad():
    h = make_h(7, [FIVE, [5, 6]], FIVE_M + [(5, 6)], [(2, 5), (0, 4)])
    assert build_rescue_graph(h.graph, h).eligible == frozenset({(2, 5)})


def test_fg_instance_single_edge_component():
    h = make_h(7, [FIVE, [5, 6]], FIVE_M + [(5, 6)], [(2, 5)])
    inst = build_fg_instance(build_rescue_graph(h.graph, h), h)
    x, y, z = inst.x(0), inst.y(0), inst.z(0)
    assert (x, y, z) == (7, 8, 9)
    f1 = {e for e in inst.weights if x in e or y in e} - {(x, z), (y, z)}
    assert f1 == {(5, x), (5, y), (6, x), (6, y)}
    assert inst.weights[(x, z)] == inst.weights[(y, z)] == 1
    assert inst.lower[5] == inst.upper[5] == 2
    assert inst.upper[z] == 1


def test_fg_instance_bistar_weight():
    h = make_h(9, [FIVE, [5, 6, 7, 8]], FIVE_M + [(5, 6), (7, 8)], [(2, 6)])
    inst = build_fg_instance(build_rescue_graph(h.graph, h), h)
    assert inst.weights[(inst.x(0), inst.z(0))] == 2
    assert inst.weights[(inst.y(0), inst.z(0))] == 2


def test_fg_instance_without_bad_components():
    h = make_h(5, [FIVE], FIVE_M)
    inst = build_fg_instance(build_rescue_graph(h.graph, h), h)
    assert inst.n == 5 and inst.bad_components == ()
    assert set(inst.weights.values()) <= {0}
    for method in ("ilp", "gadget"):
        assert inst.factor_weight(max_weight_fg_factor(inst, method)) == 0


@pytest.mark.parametrize("method", ["ilp", "gadget"])
def test_factor_single_rescue(method):
    h = make_h(7, [FIVE, [5, 6]], FIVE_M + [(5, 6)], [(2, 5)])
    rg = build_rescue_graph(h.graph, h)
    inst = build_fg_instance(rg, h)
    f = max_weight_fg_factor(inst, method)
    assert inst.is_factor(f)
    assert inst.factor_weight(f) == brute_factor_weight(inst) == 1
    assert extract_cover(f, rg) == frozenset({(2, 5)})


@pytest.mark.parametrize("method", ["ilp", "gadget"])
def test_factor_bistar_two_ways(method):
    h = make_h(9, [FIVE, [5, 6, 7, 8]], FIVE_M + [(5, 6), (7, 8)], [(1, 6), (3, 7)])
    rg = build_rescue_graph(h.graph, h)
    inst = build_fg_instance(rg, h)
    f = max_weight_fg_factor(inst, method)
    assert inst.factor_weight(f) == brute_factor_weight(inst) == 2
    cover = extract_cover(f, rg)
    assert cover_weight(cover, h) == 2 == brute_cover_weight(rg.eligible, h)


def test_extract_cover_projection():
    h = make_h(7, [FIVE, [5, 6]], FIVE_M + [(5, 6)], [(2, 5)])
    rg = build_rescue_graph(h.graph, h)
    inst = build_fg_instance(rg, h)
    assert extract_cover(frozenset(), rg) == frozenset()
    x_only = {e for e in inst.weights if max(e) >= 7}
    assert extract_cover(x_only, rg) == frozenset()


def test_cover_weight_by_kind():
    tri = make_h(8, [FIVE, [5, 6, 7, 5]], FIVE_M + [(5, 6)], [(2, 7)])
    assert cover_weight({(2, 7)}, tri) == 1
    bi = make_h(9, [FIVE, [5, 6, 7, 8]], FIVE_M + [(5, 6), (7, 8)], [(2, 6)])
    assert cover_weight({(2, 6)}, bi) == 2
    assert cover_weight(set(), bi) == 0


def test_prune_duplicate_rescue():
    h = make_h(7, [FIVE, [5, 6]], FIVE_M + [(5, 6)], [(1, 5), (3, 6)])
    pruned = prune_cover({(1, 5), (3, 6)}, h)
    assert len(pruned) == 1
    assert cover_weight(pruned, h) == 1


def test_prune_keeps_needed_edges():
    h = make_h(9, [FIVE, [5, 6], [7, 8]], FIVE_M + [(5, 6), (7, 8)], [(1, 5), (3, 7)])
    assert prune_cover({(1, 5), (3, 7)}, h) == frozenset({(1, 5), (3, 7)})


def test_m_c_examples():
    h = make_h(5, [FIVE], FIVE_M)
    assert compute_m_c(set(), h).m_c == frozenset(FIVE_M)
    lone = make_h(2, [[0, 1]], [(0, 1)])
    assert compute_m_c(set(), lone).m_c == frozenset()
    bi = make_h(9, [FIVE, [5, 6, 7, 8]], FIVE_M + [(5, 6), (7, 8)], [(2, 6)])
    ctx = compute_m_c({(2, 6)}, bi)
    assert {(5, 6), (7, 8)} <= ctx.m_c
    assert len(ctx.m_c_vertices) == 8


def test_rescued_components():
    h = make_h(9, [FIVE, [5, 6], [7, 8]], FIVE_M + [(5, 6), (7, 8)], [(1, 5), (6, 7)])
    assert rescued_components({(6, 7)}, h) == {1, 2}


def _small_h_instances(count, seed, max_eligible=12):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(6, 16)
        p = rng.choice([0.1, 0.15, 0.2, 0.3])
        g = Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])
        h = phase1(g).h
        rg = build_rescue_graph(g, h)
        if len(rg.eligible) <= max_eligible:
            out.append((g, h, rg))
    return out


@pytest.mark.parametrize("seed", range(4))
def test_cover_weight_matches_brute_force(seed):
    for g, h, rg in _small_h_instances(25, seed):
        best = brute_cover_weight(rg.eligible, h)
        for method in ("ilp", "gadget"):
            cover = max_weight_cover(g, h, method)
            assert cover <= rg.eligible
            assert cover_weight(cover, h) == best
            pruned = prune_cover(cover, h)
            assert cover_weight(pruned, h) == best


def test_factor_matches_brute_force_on_tiny_instances():
    checked = 0
    for g, h, rg in _small_h_instances(40, 99, max_eligible=6):
        inst = build_fg_instance(rg, h)
        if len(inst.weights) > 26:
            continue
        want = brute_factor_weight(inst)
        for method in ("ilp", "gadget"):
            f = max_weight_fg_factor(inst, method)
            assert inst.is_factor(f)
            assert inst.factor_weight(f) == want
        checked += 1
    assert checked >= 10
