import pytest
from hypothesis import assume, given

from flowaug.flow_cuts import INFINITE, FlowError, delta_out, is_st_cut, max_flow
from flowaug.harness import generate
from flowaug.patterns import (DEAD, MINCUT_BOUNDARY, T_REACHABLE, FlowAnalysis, h_sequence, h_subsequent,
                              has_proper_boundaries, is_transitive, last_reach, leader, pattern_of, res_reach)

from conftest import A, B, S, T, bounded_digraphs

TWO_FLOW = [(0, 1), (2, 3)]  # s-a-t and s-b-t, valid in G_two and G_x
SELF2 = frozenset({(0, 0), (1, 1)})


def test_res_reach_examples(fx):
    g = fx["G_two"].graph
    r = res_reach(g, S, T, TWO_FLOW, A)
    assert r.reach == {A, S} and r.kind == MINCUT_BOUNDARY
    assert delta_out(g, r.reach) == {1, 2}
    r = res_reach(fx["G_star"].graph, S, T, [(0, 1)], B)
    assert r.reach == {B} and r.kind == DEAD
    r = res_reach(g, S, T, TWO_FLOW, T)
    assert {S, T} <= r.reach and r.kind == T_REACHABLE


def test_res_reach_rejects_zero_flow(fx):
    with pytest.raises(FlowError):
        res_reach(fx["G_two"].graph, S, T, [], A)


def test_last_reach_examples(fx):
    assert last_reach(fx["G_two"].graph, S, T, TWO_FLOW, A, 0) == A
    assert last_reach(fx["G_two"].graph, S, T, TWO_FLOW, A, 1) == S
    assert last_reach(fx["G_x"].graph, S, T, TWO_FLOW, B, 0) == A
    assert last_reach(fx["G_star"].graph, S, T, [(0, 1)], B, 0) is None


def test_pattern_examples(fx):
    assert pattern_of(fx["G_two"].graph, S, T, TWO_FLOW) == SELF2
    assert pattern_of(fx["G_x"].graph, S, T, TWO_FLOW) == SELF2 | {(1, 0)}
    assert pattern_of(fx["G_path"].graph, 0, 2, [(0, 1)]) == {(0, 0)}
    with pytest.raises(FlowError):
        pattern_of(fx["G_path"].graph.add_unit_arcs([(0, 2)]), 0, 2, [(2,)])


def test_leader_examples(fx):
    assert leader(fx["G_two"].graph, S, T, TWO_FLOW, SELF2, {0, 2}, 0) == A
    hx = SELF2 | {(1, 0)}
    assert leader(fx["G_x"].graph, S, T, TWO_FLOW, hx, {0, 2}, 1) == B
    assert leader(fx["G_two"].graph, S, T, TWO_FLOW, SELF2, {1, 3}, 0) == T


def test_subsequent_examples(fx):
    assert h_subsequent(fx["G_two"].graph, S, T, TWO_FLOW, SELF2, {0, 2}) == {1, 3}
    assert h_subsequent(fx["G_two"].graph, S, T, TWO_FLOW, SELF2, {1, 3}) is None
    hx = SELF2 | {(1, 0)}
    assert h_subsequent(fx["G_x"].graph, S, T, TWO_FLOW, hx, {0, 2}) == {1, 3}


def test_sequence_examples(fx):
    for name in ("G_two", "G_x"):
        seq = h_sequence(fx[name].graph, S, T, TWO_FLOW)
        assert [c.arcs for c in seq] == [{0, 2}, {1, 3}]
    with pytest.raises(FlowError):
        h_sequence(fx["G_diam"].graph, S, T, [(3, 2)])


def test_ladder_sequence_is_long():
    inst = generate("ladder", {"L": 25})
    paths = max_flow(inst.graph, inst.s, inst.t).paths
    seq = h_sequence(inst.graph, inst.s, inst.t, paths)
    assert len(paths) == 2 and len(seq) >= 20
    assert is_transitive(pattern_of(inst.graph, inst.s, inst.t, paths))


def test_proper_boundaries_examples(fx):
    assert has_proper_boundaries(fx["G_two"].graph, S, T)
    assert not has_proper_boundaries(fx["G_diam"].graph, S, T)
    assert has_proper_boundaries(fx["G_path"].graph, 0, 2)


def test_is_transitive():
    assert is_transitive({(0, 0), (0, 1), (1, 1)})
    assert not is_transitive({(0, 1), (1, 2)})


def _analysis(g, s, t):
    r = max_flow(g, s, t)
    if r.value == INFINITE or r.value == 0:
        return None
    return FlowAnalysis(g, s, t, r.paths)


@given(bounded_digraphs(max_m=10))
def test_trichotomy_prefix_and_monotonicity(gst):
    g, s, t = gst
    an = _analysis(g, s, t)
    assume(an is not None)
    for v in g.vertices:
        r = an.classify(v)
        if r.kind == MINCUT_BOUNDARY:
            assert is_st_cut(g, s, t, delta_out(g, r.reach)) and len(delta_out(g, r.reach)) == an.lam
        elif r.kind == DEAD:
            assert delta_out(g, r.reach) == frozenset()
        for i in range(an.lam):
            vs = an.verts[i]
            inside = [w in r.reach for w in vs]
            k = an.last_reach_index(v, i)
            assert inside[:k + 1] == [True] * (k + 1) or k == -1
            assert not any(inside[k + 1:]) or vs.count(vs[k]) > 1
    for j in range(an.lam):
        vs = an.verts[j]
        for x, y in zip(vs, vs[1:]):
            for i in range(an.lam):
                assert an.last_reach_index(x, i) <= an.last_reach_index(y, i)


@given(bounded_digraphs())
def test_sequence_invariants(gst):
    g, s, t = gst
    assume(has_proper_boundaries(g, s, t))
    paths = max_flow(g, s, t).paths
    seq = h_sequence(g, s, t, paths)
    assert seq[0].arcs == {i for i in g.out_arcs(s) if g.arcs[i].head != s} and len(seq) >= 2
    for c in seq:
        assert is_st_cut(g, s, t, c.arcs) and len(c.arcs) == len(paths)
    for c1, c2 in zip(seq, seq[1:]):
        assert all(a < b for a, b in zip(c1.pos, c2.pos))
    if len(seq) >= 3:
        assert is_transitive(pattern_of(g, s, t, paths))
