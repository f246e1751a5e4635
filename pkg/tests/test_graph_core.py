import pytest
from hypothesis import given
from hypothesis import strategies as st

from flowaug.flow_cuts import INFINITE, OVER, max_flow
from flowaug.graph_core import (Digraph, GraphError, Instance, ParseError, parse_instance,
                                serialize_instance)

from conftest import A, B, S, T, small_digraphs


def pairs_of(g):
    return sorted((a.tail, a.head) for a in g.arcs.values())


def test_add_no_arcs_is_identity(fx):
    g = fx["G_path"].graph
    assert g.add_arcs(set()) == g


def test_add_st_arc_makes_flow_infinite(fx):
    g = fx["G_path"].graph.add_arcs({(0, 2)})
    assert max_flow(g, 0, 2).value == INFINITE


def test_add_arc_to_star(fx):
    g = fx["G_star"].graph.add_arcs({(B, T)})
    assert max_flow(g, S, T).value == 1
    # the added arc is infinite, so the second unit of flow cannot pass through the single (s,a) arc
    g2 = fx["G_star"].graph.add_arcs({(S, B), (B, T)})
    assert max_flow(g2, S, T).value == INFINITE


def test_add_unknown_vertex_rejected(fx):
    with pytest.raises(GraphError):
        fx["G_path"].graph.add_arcs({(0, 9)})


def test_added_arcs_keep_original_ids(fx):
    g = fx["G_two"].graph
    h = g.add_arcs({(A, B), (S, T)})
    assert all(h.arcs[i] == a for i, a in g.arcs.items())
    assert len(h.arcs) == len(g.arcs) + 2
    assert all(h.arcs[i].inf for i in h.arcs if i not in g.arcs)


def test_contract_singleton_is_identity(fx):
    g = fx["G_path"].graph
    h, vmap = g.contract({0}, 0)
    assert h == g and vmap == {0: 0, 1: 1, 2: 2}


def test_contract_source_side(fx):
    h, vmap = fx["G_two"].graph.contract({S, A}, S)
    assert pairs_of(h) == sorted([(S, T), (S, B), (B, T)])
    assert vmap[A] == S


def test_contract_sink_side_makes_parallel_arcs(fx):
    h, _ = fx["G_star"].graph.contract({T, B}, T)
    assert pairs_of(h) == [(S, A), (A, T), (A, T)]
    assert sorted(h.arcs) == [0, 1, 2]


def test_contract_rejects_opposite_terminal(fx):
    with pytest.raises(GraphError):
        fx["G_two"].graph.contract({S, A, T}, S, avoid=T)
    with pytest.raises(GraphError):
        fx["G_two"].graph.contract({A}, S)


def test_parse_path():
    inst = parse_instance("p faug 3 2\ns 0\nt 2\na 0 1 1\na 1 2 1\n")
    assert inst.s == 0 and inst.t == 2
    assert inst.graph == Digraph.build(3, [(0, 1), (1, 2)])


def test_roundtrip_two(fx):
    inst = fx["G_two"]
    back = parse_instance(serialize_instance(inst))
    assert back.structurally_equal(inst)


@pytest.mark.parametrize("text, line", [
    ("p faug 3 1\na 0 5 1\n", 2),
    ("p faug 3 1\ns 0\ns 1\na 0 1 1\n", 3),
    ("p faug 3 1\na 0 1 7\n", 2),
    ("p faug 3 1\nz 1\n", 2),
    ("s 0\n", 1),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(ParseError) as err:
        parse_instance(text)
    assert err.value.lineno == line


def test_parse_bundles_and_extensions():
    text = "p faug 3 2\ns 0\nt 2\na 0 1 inf\na 1 2 1\nk 1\nw 4\nb 3 1\nx 1 5\nq 0 2\n# comment\n"
    inst = parse_instance(text)
    assert inst.graph.arcs[0].inf and not inst.graph.arcs[1].inf
    assert (inst.k, inst.W, inst.bundles, inst.vertex_weights, inst.pairs) == (1, 4, [(3, [1])], {1: 5}, [(0, 2)])
    assert parse_instance(serialize_instance(inst)).structurally_equal(inst)


def test_parse_rejects_shared_bundle_arc():
    with pytest.raises(ParseError):
        parse_instance("p faug 2 1\na 0 1 1\nb 1 0\nb 1 0\n")


@given(small_digraphs())
def test_roundtrip_property(gst):
    g, s, t = gst
    inst = Instance(g, s, t)
    assert parse_instance(serialize_instance(inst)).structurally_equal(inst)


@given(small_digraphs(), st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=4))
def test_add_arcs_grows_by_distinct_pairs(gst, pairs):
    g, s, t = gst
    pairs = {(u, v) for u, v in pairs if u in g.vertices and v in g.vertices}
    h = g.add_arcs(pairs)
    assert set(g.arcs) <= set(h.arcs)
    assert len(h.arcs) == len(g.arcs) + len(pairs)


@given(small_digraphs(max_n=7), st.data())
def test_disjoint_contractions_commute(gst, data):
    g, s, t = gst
    inner = sorted(g.vertices - {s, t})
    X = set(data.draw(st.lists(st.sampled_from(inner), unique=True))) if inner else set()
    Y = set(data.draw(st.lists(st.sampled_from(inner), unique=True))) - X if inner else set()
    h1, _ = g.contract(X | {s}, s, avoid=t)
    h1, _ = h1.contract(Y | {t}, t, avoid=s)
    h2, _ = g.contract(Y | {t}, t, avoid=s)
    h2, _ = h2.contract(X | {s}, s, avoid=t)
    assert h1 == h2


def _capped(v, k):
    return k + 1 if v in (INFINITE, OVER) else v


@given(small_digraphs(max_n=5, max_m=8, p_inf=0.3), st.integers(0, 3))
def test_infinite_arc_acts_like_k_plus_one_copies(gst, k):
    g, s, t = gst
    copies = []
    for a in g.arcs.values():
        copies += [(a.tail, a.head)] * (k + 1 if a.inf else 1)
    h = Digraph.build(g.vertices, copies)
    assert _capped(max_flow(g, s, t, k).value, k) == _capped(max_flow(h, s, t, k).value, k)
