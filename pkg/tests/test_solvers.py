import random

import pytest
from hypothesis import given, settings, strategies as st

from flowaug.graph_core import Digraph
from flowaug.harness import filtering_gadget, generate
from flowaug.oracle import brute_bundled, brute_dfas, brute_dfvs, brute_skew, brute_wstcut
from flowaug.solvers import (NO, BundledInstance, CutAnswer, SkewInstance, SolverError, _bundled_on_mincut,
                             check_pairwise_linked, min_weight_mincut, reduce_skew_to_bundled, solve_bundled_cut,
                             solve_chain_sat, solve_skew_multicut, solve_wdfas, solve_wdfvs,
                             solve_weighted_st_cut, validate_bundled)

from conftest import S, T, random_digraph, small_digraphs

F = frozenset
TWO_W = {0: 5, 1: 1, 2: 1, 3: 5}


def weight(ans):
    if ans == NO:
        return NO
    return ans[0] if isinstance(ans, tuple) else ans.weight


def bundled_of(inst):
    return BundledInstance(inst.graph, inst.s, inst.t, inst.k, [b for _, b in inst.bundles],
                           [w for w, _ in inst.bundles], inst.W)


# ------------------------------------------------------------- weighted cut
def test_min_weight_mincut_examples(fx):
    assert min_weight_mincut(fx["G_two"].graph, TWO_W, S, T) == {1, 2}
    assert min_weight_mincut(fx["G_path"].graph, {0: 1, 1: 1}, 0, 2) == {0}
    assert min_weight_mincut(fx["G_diam"].graph, {i: 1 for i in range(4)}, S, T) == {2}
    with pytest.raises(SolverError):
        min_weight_mincut(fx["G_path"].graph, {0: 0, 1: 1}, 0, 2)


def test_weighted_cut_examples(fx):
    g = fx["G_two"].graph
    assert solve_weighted_st_cut(g, TWO_W, S, T, 2, 2) == CutAnswer(2, F({1, 2}))
    assert solve_weighted_st_cut(g, TWO_W, S, T, 2, 1) == NO
    assert solve_weighted_st_cut(g, TWO_W, S, T, 1, 99) == NO
    assert solve_weighted_st_cut(Digraph.build(4, [(0, 1)]), {0: 3}, 0, 3, 1, 0) == CutAnswer(0, F())


def test_weight_overflow():
    g = Digraph.build(2, [(0, 1), (0, 1)])
    with pytest.raises(OverflowError):
        min_weight_mincut(g, {0: 2 ** 62, 1: 2 ** 62}, 0, 1)


@settings(max_examples=40)
@given(small_digraphs(max_n=6, max_m=8), st.integers(1, 3), st.integers(0, 2 ** 32))
def test_weighted_cut_matches_oracle(gst, k, seed):
    g, s, t = gst
    rnd = random.Random(seed)
    w = {i: rnd.randint(1, 9) for i in g.arcs}
    W = rnd.randint(0, 9 * k)
    assert weight(solve_weighted_st_cut(g, w, s, t, k, W)) == weight(brute_wstcut(g, w, s, t, k, W))


# ------------------------------------------------------------ bundled cuts
def test_filtering_gadget():
    inst = bundled_of(filtering_gadget())
    ans = solve_bundled_cut(inst)
    assert ans.weight == 2 and ans.bundles == {0} and validate_bundled(inst, ans.arcs)
    stats = {}
    # flow paths that route through both chains, so the dominated chain must be filtered
    found = list(_bundled_on_mincut(inst, inst.graph, [(0, 4, 7, 2), (1, 9, 6, 3)], inst.bundle_of(),
                                    inst.deletable(), stats))
    assert stats["filtered"] >= 1
    assert min(a.weight for a in found) == 2


def test_two_chain_and_singleton_bundles(fx):
    g = fx["G_two"].graph
    one = BundledInstance(g, S, T, 1, [[0, 1], [2], [3]], [4, 1, 1], 9)
    assert weight(solve_bundled_cut(one)) == NO
    two = BundledInstance(g, S, T, 2, [[0, 1], [2], [3]], [4, 1, 1], 9)
    assert weight(solve_bundled_cut(two)) == 5
    singles = BundledInstance(g, S, T, 2, [[i] for i in range(4)], [5, 1, 1, 5], 2)
    assert solve_bundled_cut(singles).bundles == {1, 2}


def test_pairwise_linked_rejection():
    g = Digraph.build(6, [(0, 1), (1, 5), (2, 3)])
    bad = BundledInstance(g, 0, 5, 1, [[1, 2]], [1], 9)
    with pytest.raises(SolverError, match="bundle 0"):
        check_pairwise_linked(bad)
    with pytest.raises(SolverError):
        BundledInstance(g, 0, 5, 1, [[0], [0]], [1, 1], 9).bundle_of()


def test_chain_sat_validation(fx):
    g = fx["G_two"].graph
    with pytest.raises(SolverError):
        solve_chain_sat(g, S, T, 2, [[]], [1], 1, 5)
    with pytest.raises(SolverError):
        solve_chain_sat(g, S, T, 2, [[0, 2]], [1], 1, 5)
    with pytest.raises(SolverError):
        solve_chain_sat(g, S, T, 1, [[0, 1]], [1], 1, 5)
    assert solve_chain_sat(g, S, T, 2, [], [], 2, 5) == NO


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 3))
def test_chain_sat_matches_oracle(seed, ell, k):
    inst = generate("chain-sat", {"n": 6, "chains": 4, "ell": ell, "crisp": 3, "k": k, "W": random.Random(seed).randint(0, 20)}, seed)
    bi = bundled_of(inst)
    got = solve_chain_sat(inst.graph, inst.s, inst.t, ell, bi.bundles, bi.weights, k, inst.W)
    want = brute_bundled(inst.graph, inst.s, inst.t, bi.bundles, bi.weights, k, inst.W)
    assert weight(got) == weight(want)
    if got != NO:
        assert validate_bundled(bi, got.arcs)


# ------------------------------------------------------------ skew multicut
def test_skew_reduction_sizes():
    g = Digraph.build(4, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)])
    n, m = 4, 5
    red = reduce_skew_to_bundled(SkewInstance(g, [(0, 3), (1, 2)], {i: 1 for i in range(m)}, 2, 9))
    assert len(red.bundled.graph.vertices) == 2 * n + 2
    assert len(red.bundled.graph.arcs) == 2 * m + n + 4
    assert all(len(b) == 2 for b in red.bundled.bundles)
    red = reduce_skew_to_bundled(SkewInstance(g, [(0, 3)], {i: 1 for i in range(m)}, 2, 9))
    assert len(red.bundled.graph.vertices) == n + 2 and len(red.bundled.graph.arcs) == m + 2
    with pytest.raises(SolverError):
        reduce_skew_to_bundled(SkewInstance(g, [], {}, 1, 1))


def test_skew_examples():
    cyc = Digraph.build(3, [(0, 1), (1, 2), (2, 0)])
    inst = SkewInstance(cyc, [(0, 2), (2, 1)], {0: 4, 1: 1, 2: 2}, 2, 9)
    # cutting (1,2) and (2,0) still lets s_1 = 0 reach t_2 = 1
    assert solve_skew_multicut(inst) == CutAnswer(4, F({0}))
    inst = SkewInstance(cyc, [(0, 2)], {0: 4}, 1, 9)
    assert solve_skew_multicut(inst) == CutAnswer(4, F({0}))
    assert solve_skew_multicut(SkewInstance(cyc, [(0, 2)], {}, 1, 9)) == NO


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.integers(1, 2), st.integers(0, 3))
def test_skew_matches_both_oracles(seed, b, k):
    inst = generate("skew-gadget", {"n": 5, "m": 7, "b": b, "k": k, "W": 12}, seed)
    w = {ids[0]: wt for wt, ids in inst.bundles}
    sk = SkewInstance(inst.graph, inst.pairs, w, k, inst.W)
    direct = brute_skew(inst.graph, inst.pairs, w, k, inst.W)
    red = reduce_skew_to_bundled(sk).bundled
    via = brute_bundled(red.graph, red.s, red.t, red.bundles, red.weights, k, inst.W)
    assert weight(direct) == weight(via) == weight(solve_skew_multicut(sk))


# -------------------------------------------------------------- DFAS / DFVS
def test_dfas_examples():
    cyc = Digraph.build(2, [(0, 1), (1, 0)])
    assert solve_wdfas(cyc, {0: 3, 1: 1}, 1, 5) == CutAnswer(1, F({1}))
    assert solve_wdfas(cyc, {0: 3, 1: 1}, 0, 5) == NO
    assert solve_wdfas(cyc, {0: 3}, 1, 5) == CutAnswer(3, F({0}))
    assert solve_wdfas(cyc, {}, 1, 5) == NO
    dag = Digraph.build(4, [(0, 1), (1, 2), (0, 3), (3, 2)])
    assert solve_wdfas(dag, {i: 1 for i in range(4)}, 0, 0) == CutAnswer(0, F())
    two = Digraph.build(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
    assert solve_wdfas(two, {i: 1 for i in range(4)}, 1, 9) == NO
    assert solve_wdfas(two, {i: 1 for i in range(4)}, 2, 9).weight == 2


def test_dfvs_examples():
    loop = Digraph.build(2, [(0, 0), (0, 1)])
    assert solve_wdfvs(loop, {0: 7, 1: 1}, 1, 9) == CutAnswer(7, F({0}))
    tri = Digraph.build(3, [(0, 1), (1, 2), (2, 0)])
    assert solve_wdfvs(tri, {0: 1, 1: 5, 2: 5}, 1, 9) == CutAnswer(1, F({0}))
    assert solve_wdfvs(tri, {0: 1, 1: 5, 2: 5}, 1, 0) == NO
    tour = Digraph.build(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    assert solve_wdfvs(tour, {v: 1 for v in range(4)}, 0, 0) == CutAnswer(0, F())


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6), st.integers(0, 2))
def test_dfas_matches_oracle_and_is_monotone(seed, k):
    rnd = random.Random(seed)
    g = random_digraph(rnd, rnd.randint(2, 5), rnd.randint(0, 7))
    w = {i: rnd.randint(1, 9) for i in g.arcs if rnd.random() < 0.85}
    W = rnd.randint(0, 12)
    got = solve_wdfas(g, w, k, W)
    assert weight(got) == weight(brute_dfas(g, w, k, W))
    if got != NO:
        assert solve_wdfas(g, w, k, W + 5) != NO and solve_wdfas(g, w, k + 1, W) != NO


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6), st.integers(0, 3))
def test_dfvs_matches_oracle(seed, k):
    rnd = random.Random(seed)
    n = rnd.randint(1, 6)
    g = Digraph.build(n, [(rnd.randrange(n), rnd.randrange(n)) for _ in range(rnd.randint(0, 9))])
    w = {v: rnd.randint(1, 9) for v in range(n)}
    W = rnd.randint(0, 15)
    assert weight(solve_wdfvs(g, w, k, W)) == weight(brute_dfvs(g, w, k, W))
