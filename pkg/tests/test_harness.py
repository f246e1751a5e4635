import hashlib

import pytest
from hypothesis import given, strategies as st

from flowaug.graph_core import serialize_instance
from flowaug.harness import (DET_HEADER, KINDS, HarnessError, fixture_suite, flow_value, generate, ladder,
                             measure_det_family, montecarlo, thread_count, wilson_interval)

GOLDEN = "74fec4b39c68aba3ceb791080d63d1c1c11107050380290da9c8ac7b39e5ce94"


def digest(inst):
    return hashlib.sha256(serialize_instance(inst).encode()).hexdigest()


def test_golden_random_digraph():
    assert digest(generate("random-digraph", {"n": 6, "m": 9}, 1)) == GOLDEN


@given(st.sampled_from([k for k in KINDS if k != "ladder"]), st.integers(0, 10 ** 6))
def test_generation_is_deterministic(kind, seed):
    a, b = generate(kind, {"n": 5, "m": 6}, seed), generate(kind, {"n": 5, "m": 6}, seed)
    assert a.structurally_equal(b)


def test_random_dag_is_acyclic():
    g = generate("random-dag", {"n": 7, "m": 15}, 3).graph
    assert all(a.tail < a.head for a in g.arcs.values())


def test_ladder_shape():
    inst = generate("ladder", {"L": 25})
    assert len(inst.graph.vertices) == 52 and inst.t == 51
    assert len(inst.graph.arcs) == 2 + 2 * 25 + 2 * 25
    assert flow_value(inst) == 2
    one_way = ladder(3, both=False)
    assert len(one_way.arcs) == 2 + 2 * 3 + 3


@pytest.mark.parametrize("kind,params", [
    ("random-digraph", {}),
    ("random-digraph", {"n": 1, "m": 2}),
    ("random-digraph", {"n": "x", "m": 2}),
    ("random-digraph", {"n": 3, "m": 2, "inf": 1.5}),
    ("ladder", {"L": 0}),
    ("nonsense", {}),
])
def test_bad_parameters(kind, params):
    with pytest.raises(HarnessError):
        generate(kind, params)


def test_montecarlo_trivial_path(fx):
    inst = fx["G_path"]
    rep = montecarlo(inst.graph, inst.s, inst.t, 1, 0, 50, seed=2)
    assert rep.violations == 0
    assert {r.arcs for r in rep.rows} == {(0,), (1,)}
    assert all(0 < r.hits <= 50 and r.ci_low <= r.freq <= r.ci_high for r in rep.rows)
    assert rep.to_csv().splitlines()[0] == "cut,core_size,hits,trials,freq,ci_low,ci_high"
    assert '"min_freq"' in rep.to_json()


def test_montecarlo_zero_trials(fx):
    inst = fx["G_two"]
    rep = montecarlo(inst.graph, inst.s, inst.t, 2, 0, 0)
    assert rep.rows == [] and rep.min_freq is None
    assert rep.to_csv() == "cut,core_size,hits,trials,freq,ci_low,ci_high\n"
    with pytest.raises(HarnessError):
        montecarlo(inst.graph, inst.s, inst.t, 2, 0, -1)


def test_montecarlo_reproducible(fx):
    inst = fx["G_x"]
    a = montecarlo(inst.graph, inst.s, inst.t, 2, 0, 40, seed=9)
    b = montecarlo(inst.graph, inst.s, inst.t, 2, 0, 40, seed=9, threads=2)
    assert a.to_csv() == b.to_csv()


def test_wilson_and_threads(monkeypatch):
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.05
    assert wilson_interval(0, 0) == (0.0, 1.0)
    monkeypatch.setenv("FLOWAUG_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("FLOWAUG_THREADS", "many")
    with pytest.raises(HarnessError):
        thread_count()


def test_det_family_csv():
    assert measure_det_family([], [1, 2]) == ",".join(DET_HEADER) + "\n"
    suite = fixture_suite(with_ladder=False)
    a = measure_det_family(suite, [1, 2], timing=False)
    assert a == measure_det_family(suite, [1, 2], timing=False)
    rows = a.splitlines()
    assert len(rows) == 1 + 2 * len(suite) and rows[0] == ",".join(DET_HEADER[:-1])
    assert all(int(r.split(",")[-1]) >= 1 for r in rows[1:])
