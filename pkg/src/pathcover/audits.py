"""Structural checks on intermediate states of the algorithm.

Each ``audit_*`` function returns a list of human-readable violations (empty
when the property holds).  They are cheap enough to run on every traced
instance and are used by the verification harness and the tests.
"""

from __future__ import annotations

from .exact import BudgetExceeded, SearchBudget, exact_opt, trunk_opt
from .graph import components_of, contract
from .hstate import ComponentKind, FrozenH, InvariantViolation, check_invariant
from .local_ops import stuck_edges
from .structure import CRITICAL_S_VALUES, AnchorClass, Analysis, anchor_paths

TRUNK_LIMIT = 55
ORACLE_TRUNK_LIMIT = 18

_MIN_Q = {AnchorClass.O0: 3, AnchorClass.T0: 3, AnchorClass.O1: 4,
             AnchorClass.T1: 4, AnchorClass.T2: 4}
_MIN_P = {AnchorClass.T0: 5, AnchorClass.T1: 6, AnchorClass.T2: 7}
_LIGHT = (AnchorClass.O0, AnchorClass.T0, AnchorClass.T1)
_HEAVY = (AnchorClass.O1, AnchorClass.T1, AnchorClass.T2)


def audit_invariant(h) -> list[str]:
    try:
        check_invariant(h)
    except InvariantViolation as exc:
        return [str(exc)]
    return []


def audit_absorption(h2: FrozenH, added) -> list[str]:
    """Vertices absorbed in the last phase-1 step attach to at most two
    vertices, and two attachments always hit the ends of an edge component."""
    out = []
    by_vertex: dict[int, list[int]] = {}
    for u, v in added:
        outside, inside = (u, v) if u not in h2.vertices else (v, u)
        by_vertex.setdefault(outside, []).append(inside)
    edge_comps = {frozenset(c.vertices) for c in h2.components if c.kind is ComponentKind.EDGE}
    for u, ends in sorted(by_vertex.items()):
        if len(ends) > 2:
            out.append(f"vertex {u} absorbed with {len(ends)} edges")
        elif len(ends) == 2 and frozenset(ends) not in edge_comps:
            out.append(f"vertex {u} joins {ends}, not an edge component")
    return out


def audit_shape(h: FrozenH, cover) -> list[str]:
    """Every component of the contracted H+C is a node, an edge with a bad
    endpoint, or a star with bad leaves."""
    comps = h.components
    view = contract([sorted(c.vertices) for c in comps], cover)
    out = []
    for grp in components_of(range(len(comps)), view.edges):
        es = [e for e in view.edges if e[0] in grp]
        if len(grp) == 1:
            continue
        if len(es) != len(grp) - 1 or len(set(es)) != len(es):
            out.append(f"components {grp} do not form a tree")
            continue
        deg = {c: sum(c in e for e in es) for c in grp}
        hubs = [c for c in grp if deg[c] >= 2]
        if len(grp) == 2:
            if not (comps[grp[0]].bad or comps[grp[1]].bad):
                out.append(f"edge {grp} joins two 5-paths")
        elif len(hubs) != 1:
            out.append(f"components {grp} do not form a star")
        else:
            for c in grp:
                if c != hubs[0] and not comps[c].bad:
                    out.append(f"star {grp} has a 5-path leaf {c}")
    return out


def audit_trunks(an: Analysis, oracle_cap: int = ORACLE_TRUNK_LIMIT) -> list[str]:
    out = []
    for idx, m in enumerate(an.members):
        t = m.trunk
        if t.order > TRUNK_LIMIT:
            out.append(f"member {idx}: trunk has {t.order} vertices")
        k_cover = {e for e in an.cover if e[0] in m.comp.vertices and e[1] in m.comp.vertices}
        if k_cover != set(t.cover_edges):
            out.append(f"member {idx}: trunk drops cover edges {sorted(k_cover - t.cover_edges)}")
        if t.order <= oracle_cap:
            structured = trunk_opt(t).covered
            try:
                exact = exact_opt(t.graph, 5, SearchBudget(max_vertices=oracle_cap)).covered
            except BudgetExceeded:
                continue
            if structured != exact:
                out.append(f"member {idx}: trunk optimum {structured} != exact {exact}")
    return out


def _positions(h: FrozenH, center: int) -> list[int]:
    comp = h.components[center]
    if comp.kind in (ComponentKind.BISTAR, ComponentKind.FIVE_PATH):
        return list(comp.order)
    (a, b), = comp.m_edges
    return [a, b]


def audit_anchor_positions(an: Analysis) -> list[str]:
    """At most five anchors, and light anchors (O0, T0, T1) only in the
    admissible position pairs."""
    out = []
    for idx, m in enumerate(an.members):
        if not m.composite:
            continue
        if len(m.anchors) > 5:
            out.append(f"member {idx}: {len(m.anchors)} anchors")
        center = an.h.components[m.comp.center]
        pos = _positions(an.h, m.comp.center)
        light = [i + 1 for i, v in enumerate(pos) if m.anchors.get(v) in _LIGHT]
        if center.kind in (ComponentKind.EDGE, ComponentKind.STAR):
            if light:
                out.append(f"member {idx}: light anchor on an edge/star center")
        elif len(light) > 2:
            out.append(f"member {idx}: {len(light)} light anchors")
        elif len(light) == 2:
            allowed = {(1, 2), (3, 4)} if center.kind is ComponentKind.BISTAR \
                else {(1, 2), (2, 4), (4, 5)}
            if tuple(light) not in allowed:
                out.append(f"member {idx}: light anchors at positions {tuple(light)}")
    return out


def audit_satellite_kinds(an: Analysis) -> list[str]:
    out = []
    comps = an.h.components
    for idx, m in enumerate(an.members):
        center = comps[m.comp.center]
        if m.composite and center.kind is ComponentKind.TRIANGLE:
            out.append(f"member {idx}: triangle center")
        for s in m.comp.satellites:
            kind = comps[s.comp].kind
            if kind is ComponentKind.FIVE_PATH:
                out.append(f"member {idx}: 5-path satellite")
            if kind is ComponentKind.TRIANGLE and center.kind is not ComponentKind.FIVE_PATH:
                out.append(f"member {idx}: triangle satellite off a bad center")
            if center.kind in (ComponentKind.EDGE, ComponentKind.STAR) and kind is not ComponentKind.BISTAR:
                out.append(f"member {idx}: {kind.value} satellite on an edge/star center")
    return out


def audit_critical(an: Analysis) -> list[str]:
    out = []
    comps = an.h.components
    for idx in an.critical_members:
        m = an.members[idx]
        if m.metrics.s not in CRITICAL_S_VALUES:
            out.append(f"member {idx}: critical with s={m.metrics.s}")
        anchors = m.two_anchors
        if not 1 <= len(anchors) <= 2:
            out.append(f"member {idx}: {len(anchors)} critical anchors")
        for v in anchors:
            if m.anchors[v] is not AnchorClass.T2:
                out.append(f"member {idx}: critical anchor {v} is {m.anchors[v].value}")
    for sat in an.critical_satellites:
        if comps[sat.comp].kind is not ComponentKind.BISTAR:
            out.append(f"critical satellite {sat.comp} is a {comps[sat.comp].kind.value}")
    for v in an.responsible_anchors:
        i = an.vertex_member(v)
        if an.members[i].critical:
            out.append(f"responsible anchor {v} lies in a critical member")
    return out


def audit_anchor_paths(an: Analysis) -> list[str]:
    out = []
    for idx, m in enumerate(an.members):
        for v, cls in m.anchors.items():
            if cls is AnchorClass.ZERO:
                continue
            ap = anchor_paths(m.trunk, v)
            if len(ap.q) < _MIN_Q[cls]:
                out.append(f"member {idx}: Q_{v} has {len(ap.q)} vertices ({cls.value})")
            if cls in _MIN_P and (ap.p is None or len(ap.p) < _MIN_P[cls]):
                got = 0 if ap.p is None else len(ap.p)
                out.append(f"member {idx}: P_{v} has {got} vertices ({cls.value})")
    return out


def eta_lower_bound(an: Analysis, idx: int) -> int:
    """Largest lower bound on eta implied by the anchor classes of a member."""
    m = an.members[idx]
    if not m.composite:
        return 5
    kind = an.h.components[m.comp.center].kind
    classes = list(m.anchors.values())

    def count(*cls):
        return sum(c in cls for c in classes)

    heavy = count(*_HEAVY)
    zero = count(AnchorClass.ZERO)
    bound = 5 if kind is ComponentKind.FIVE_PATH else 0
    if kind in (ComponentKind.BISTAR, ComponentKind.FIVE_PATH):
        if heavy >= 4:
            bound = max(bound, 16)
        if heavy >= 3 and count(AnchorClass.O0, AnchorClass.T0) >= 1:
            bound = max(bound, 15)
        if heavy >= 3:
            bound = max(bound, 13)
        if len(classes) - zero >= 2:
            bound = max(bound, 6)
        if heavy >= 1 and len(classes) - zero >= 2:
            bound = max(bound, 7)
        if count(AnchorClass.T0, AnchorClass.T1) >= 1 and count(AnchorClass.O0, AnchorClass.O1) >= 2:
            bound = max(bound, 9)
        if heavy >= 2:
            bound = max(bound, 8)
    if kind is ComponentKind.BISTAR:
        if zero == 0:
            bound = max(bound, 14)
        if count(AnchorClass.O1, AnchorClass.T2) >= 1 and count(*_LIGHT) >= 2:
            bound = max(bound, 11)
    if kind is ComponentKind.FIVE_PATH:
        if zero <= 1:
            bound = max(bound, 14)
        if zero == 0:
            bound = max(bound, 16)
        if heavy == 5:
            bound = max(bound, 17)
    return bound


def audit_eta_bounds(an: Analysis) -> list[str]:
    out = []
    for idx, m in enumerate(an.members):
        need = eta_lower_bound(an, idx)
        if m.metrics.eta < need:
            out.append(f"member {idx}: eta={m.metrics.eta} below bound {need}")
    return out


def audit_stable(an: Analysis) -> list[str]:
    return [f"edge {e} leaves a critical satellite to a free vertex" for e in stuck_edges(an)]


def audit_analysis(an: Analysis, stable: bool = False, trunks: bool = True) -> list[str]:
    out = audit_shape(an.h, an.cover)
    out += audit_satellite_kinds(an)
    out += audit_anchor_positions(an)
    out += audit_critical(an)
    out += audit_anchor_paths(an)
    out += audit_eta_bounds(an)
    if trunks:
        out += audit_trunks(an)
    if stable:
        out += audit_stable(an)
    return out


def audit_level(level) -> list[str]:
    """All structural audits for one recorded recursion level."""
    p1 = level.phase1
    out = []
    for state in p1.states:
        out += audit_invariant(state)
    out += audit_invariant(p1.h)
    out += audit_absorption(p1.h2, p1.added)
    out += audit_analysis(level.analysis2)
    out += audit_analysis(level.local.analysis, stable=True)
    return out
