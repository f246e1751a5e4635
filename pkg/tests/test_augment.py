import random

import pytest
from hypothesis import given, settings, strategies as st

from flowaug.augment import (EMPTY, AugCall, Stats, augment_deterministic, augment_randomized, depth_bound,
                             preprocess)
from flowaug.flow_cuts import INFINITE, is_maxflow, max_flow
from flowaug.graph_core import Digraph
from flowaug.harness import generate
from flowaug.oracle import enum_star_cuts, oracle_compatible

from conftest import S, T, small_digraphs


def covered(g, s, t, k, kappa, family):
    """Star cuts (with core at least kappa) that no member of the family is compatible with."""
    return [Z for Z, core in enum_star_cuts(g, s, t, k) if len(core) >= kappa
            and not any(oracle_compatible(g, s, t, Z, p.A, p.flow) for p in family)]


def sound(g, s, t, kappa, pair):
    ga = pair.graph(g)
    value = max_flow(ga, s, t).value
    return is_maxflow(ga, s, t, pair.flow) and (value == INFINITE or len(pair.flow) >= kappa)


def test_zero_flow():
    g = Digraph.build(3, [(0, 1)])
    fam = augment_deterministic(g, 0, 2, 2)
    assert [(p.A, p.flow) for p in fam] == [EMPTY]
    fam = augment_deterministic(g, 0, 2, 2, kappa=1)
    assert len(fam) == 1 and fam[0].A == {(0, 2)}
    ga = fam[0].graph(g)
    assert [ga.arcs[i].inf for i in fam[0].flow[0]] == [True]


def test_two_paths_k1_collapses(fx):
    g = fx["G_two"].graph
    fam = augment_deterministic(g, S, T, 1)
    assert [p.A for p in fam] == [frozenset({(S, T)})]
    assert max_flow(fam[0].graph(g), S, T).value == INFINITE


@pytest.mark.parametrize("name", ["G_path", "G_two", "G_star", "G_diam", "G_x"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_fixture_coverage(fx, name, k):
    inst = fx[name]
    g, s, t = inst.graph, inst.s, inst.t
    stats = Stats()
    fam = augment_deterministic(g, s, t, k, stats=stats)
    assert all(sound(g, s, t, 0, p) for p in fam)
    assert covered(g, s, t, k, 0, fam) == []
    assert stats.fallbacks == 0 and stats.max_depth <= depth_bound(k)


def test_star_fixture_specific_cut(fx):
    g = fx["G_star"].graph
    fam = augment_deterministic(g, S, T, 2)
    assert any(oracle_compatible(g, S, T, {1, 2}, p.A, p.flow) for p in fam)


def test_preprocess_outcomes(fx):
    two = fx["G_two"]
    out = preprocess(AugCall(two.graph, S, T, 2, 0, []))
    assert not out.terminal and out.call.kappa == 2 and len(out.call.P) == 2
    out = preprocess(AugCall(two.graph, S, T, 1, 0, []))
    assert out.terminal and [r[0] for r in out.results] == [frozenset({(S, T)})]
    out = preprocess(AugCall(Digraph.build(3, [(1, 2)]), 0, 2, 2, 0, []))
    assert out.terminal and out.results == [EMPTY]
    out = preprocess(AugCall(Digraph.build(3, [(0, 1, True), (1, 2, True)]), 0, 2, 2, 0, []))
    assert out.terminal and out.results[0][0] == frozenset({(0, 2)})
    out = preprocess(AugCall(fx["G_diam"].graph, S, T, 2, 0, []))
    assert out.terminal and out.results


def test_initial_flow_is_respected(fx):
    g = fx["G_two"].graph
    fam = augment_deterministic(g, S, T, 2, P=[(0, 1), (2, 3)])
    assert covered(g, S, T, 2, 0, fam) == []


def test_guided_ladder_hits_target():
    inst = generate("ladder", {"L": 25})
    g, s, t = inst.graph, inst.s, inst.t
    Z = {12, 37}  # both rail arcs between rung 10 and rung 11
    assert (frozenset(Z), frozenset(Z)) in {(a, b) for a, b in [(frozenset(x), frozenset(y)) for x, y in
                                                                   enum_star_cuts(g, s, t, 2)]}
    stats = Stats()
    res = augment_randomized(g, s, t, 2, target=Z, rng=3, stats=stats)
    assert oracle_compatible(g, s, t, Z, res.A, res.flow)
    assert stats.max_depth <= depth_bound(2) and stats.fallbacks == 0


def test_randomized_accepts_seed_or_rng(fx):
    g = fx["G_x"].graph
    a = augment_randomized(g, S, T, 2, rng=11)
    b = augment_randomized(g, S, T, 2, rng=11)
    c = augment_randomized(g, S, T, 2, rng=random.Random(4))
    assert a == b and sound(g, S, T, 0, c)


@settings(max_examples=40)
@given(small_digraphs(max_n=6, max_m=8), st.integers(1, 2), st.integers(0, 2))
def test_deterministic_sound_and_complete(gst, k, kappa):
    g, s, t = gst
    stats = Stats()
    fam = augment_deterministic(g, s, t, k, kappa, stats=stats)
    assert fam and all(sound(g, s, t, kappa, p) for p in fam)
    assert covered(g, s, t, k, kappa, fam) == []
    assert stats.fallbacks == 0 and stats.max_depth <= depth_bound(k)


@given(small_digraphs(max_n=7, max_m=10), st.integers(1, 3), st.integers(0, 3), st.integers(0, 2 ** 32))
def test_randomized_sound(gst, k, kappa, seed):
    g, s, t = gst
    res = augment_randomized(g, s, t, k, kappa, rng=seed)
    assert sound(g, s, t, kappa, res)
