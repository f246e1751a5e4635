"""Instance generators, fixtures, Monte Carlo coverage estimates and family-size measurement."""
from __future__ import annotations

import csv
import io
import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations, permutations

import numpy as np
from scipy.stats import binomtest

from .augment import FamilyBudgetExceeded, Stats, augment_deterministic, augment_randomized
from .flow_cuts import INFINITE, is_maxflow, max_flow, reach
from .graph_core import Digraph, Instance
from .oracle import enum_star_cuts, oracle_compatible

KINDS = ("random-dag", "random-digraph", "ladder", "chain-sat", "skew-gadget")


class HarnessError(ValueError):
    """Bad generator or experiment parameters."""


# ------------------------------------------------------------------- fixtures
def fixtures() -> dict:
    """The small named instances used throughout the tests (s=0, a=1, b=2, t=3)."""
    s, a, b, t = 0, 1, 2, 3
    two = [(s, a), (a, t), (s, b), (b, t)]
    return {
        "G_path": Instance(Digraph.build(3, [(0, 1), (1, 2)]), 0, 2),
        "G_two": Instance(Digraph.build(4, two), s, t),
        "G_star": Instance(Digraph.build(4, [(s, a), (a, t), (a, b)]), s, t),
        "G_diam": Instance(Digraph.build(4, [(s, a), (a, b), (b, t), (s, b)]), s, t),
        "G_x": Instance(Digraph.build(4, two + [(b, a)]), s, t),
    }


# ----------------------------------------------------------------- generators
def _need(params: dict, name: str, lo: int, default=None) -> int:
    v = params.get(name, default)
    if v is None:
        raise HarnessError(f"missing parameter {name!r}")
    try:
        v = int(v)
    except (TypeError, ValueError):
        raise HarnessError(f"parameter {name!r} must be an integer") from None
    if v < lo:
        raise HarnessError(f"parameter {name!r} must be at least {lo}")
    return v


def _prob(params: dict, name: str, default: float) -> float:
    try:
        p = float(params.get(name, default))
    except (TypeError, ValueError):
        raise HarnessError(f"parameter {name!r} must be a number") from None
    if not 0.0 <= p <= 1.0:
        raise HarnessError(f"parameter {name!r} must lie in [0, 1]")
    return p


def _flag(params: dict, name: str, default: bool) -> bool:
    v = params.get(name, default)
    if isinstance(v, str):
        return v.lower() in ("1", "true", "yes")
    return bool(v)


def ladder(L: int, rails: int = 2, both: bool = True) -> Digraph:
    """Parallel rails of L vertices from s=0 to t=rails*L+1, with rungs between neighbouring rails."""
    t = rails * L + 1
    at = lambda r, j: 1 + r * L + j
    arcs = [(0, at(r, 0)) for r in range(rails)]
    for r in range(rails):
        arcs += [(at(r, j), at(r, j + 1)) for j in range(L - 1)]
        arcs.append((at(r, L - 1), t))
    for j in range(L):
        for r in range(rails - 1):
            arcs.append((at(r, j), at(r + 1, j)))
            if both:
                arcs.append((at(r + 1, j), at(r, j)))
    return Digraph.build(t + 1, arcs)


def filtering_gadget() -> Instance:
    """Two 3-arc chains that cross between two flow paths; only the bypassing chain is a cut.

    Vertices: s=0, p0=1, p1=2, p3=3, q0=4, q1=5, q3=6, t=7.
    """
    arcs = [
        (0, 1, True), (0, 4, True), (3, 7, True), (6, 7, True),
        (1, 2, False), (2, 5, False), (5, 6, False),  # bypassing chain
        (2, 3, False), (3, 4, False), (4, 5, False),  # dominated chain
    ]
    g = Digraph.build(8, arcs)
    return Instance(g, 0, 7, k=1, W=2, bundles=[(2, [4, 5, 6]), (1, [7, 8, 9])])


def _random_arcs(rnd: random.Random, n: int, m: int, ok) -> list:
    pairs = [(u, v) for u in range(n) for v in range(n) if ok(u, v)]
    if m and not pairs:
        raise HarnessError("no admissible arcs for these parameters")
    return [pairs[rnd.randrange(len(pairs))] for _ in range(m)]


def generate(kind: str, params: dict | None = None, seed: int = 0) -> Instance:
    """Deterministic instance for (kind, params, seed)."""
    params = dict(params or {})
    rnd = random.Random(f"{kind}:{seed}")
    if kind == "random-digraph":
        n, m = _need(params, "n", 2), _need(params, "m", 0)
        p_inf = _prob(params, "inf", 0.0)
        arcs = [(u, v, rnd.random() < p_inf) for u, v in _random_arcs(rnd, n, m, lambda u, v: u != v)]
        return Instance(Digraph.build(n, arcs), 0, n - 1)
    if kind == "random-dag":
        n, m = _need(params, "n", 2), _need(params, "m", 0)
        return Instance(Digraph.build(n, _random_arcs(rnd, n, m, lambda u, v: u < v)), 0, n - 1)
    if kind == "ladder":
        L = _need(params, "L", 1)
        rails = _need(params, "rails", 2, 2)
        g = ladder(L, rails, _flag(params, "both", True))
        return Instance(g, 0, rails * L + 1)
    if kind == "chain-sat":
        if params.get("gadget") == "filtering":
            return filtering_gadget()
        n = _need(params, "n", 2, 6)
        chains = _need(params, "chains", 0, 4)
        ell = _need(params, "ell", 1, 2)
        crisp = _need(params, "crisp", 0, 2)
        k = _need(params, "k", 0, 2)
        wmax = _need(params, "max_weight", 1, 9)
        arcs, bundles = [], []
        for _ in range(chains):
            walk = [rnd.randrange(n)]
            for _ in range(rnd.randint(1, ell)):
                walk.append(rnd.choice([v for v in range(n) if v != walk[-1]]))
            ids = list(range(len(arcs), len(arcs) + len(walk) - 1))
            arcs += [(x, y, False) for x, y in zip(walk, walk[1:])]
            bundles.append((rnd.randint(1, wmax), ids))
        arcs += [(u, v, True) for u, v in _random_arcs(rnd, n, crisp, lambda u, v: u != v and v != 0 and u != n - 1)]
        W = _need(params, "W", 0, k * wmax)
        return Instance(Digraph.build(n, arcs), 0, n - 1, k=k, W=W, bundles=bundles)
    if kind == "skew-gadget":
        n, m = _need(params, "n", 2, 5), _need(params, "m", 0, 7)
        b = _need(params, "b", 1, 2)
        k = _need(params, "k", 0, 2)
        wmax = _need(params, "max_weight", 1, 9)
        arcs = _random_arcs(rnd, n, m, lambda u, v: u != v)
        pairs = []
        while len(pairs) < b:
            # s_i = t_j for i <= j could never be separated
            si, ti = rnd.randrange(n), rnd.randrange(n)
            if si != ti and all(sj != ti for sj, _ in pairs):
                pairs.append((si, ti))
        bundles = [(rnd.randint(1, wmax), [i]) for i in range(len(arcs))]
        W = _need(params, "W", 0, k * wmax)
        return Instance(Digraph.build(n, arcs), -1, -1, k=k, W=W, bundles=bundles, pairs=pairs)
    raise HarnessError(f"unknown generator kind {kind!r}; expected one of {', '.join(KINDS)}")


def exhaustive_suite(inner: int = 4, max_arcs: int = 9):
    """Every simple digraph on s=0, ``inner`` internal vertices and t=inner+1, up to relabelling
    the internal vertices, with at most ``max_arcs`` arcs.

    Arcs into s or out of t lie on no st-path and never change star cuts or compatibility,
    so only the slots s->v, u->v, v->t and s->t are used.  Smaller vertex counts appear as
    graphs with isolated internal vertices.  Yields Digraphs in a fixed order.
    """
    t = inner + 1
    mids = range(1, inner + 1)
    slots = ([(0, v) for v in mids] + [(u, v) for u in mids for v in mids if u != v]
             + [(u, t) for u in mids] + [(0, t)])
    index = {p: i for i, p in enumerate(slots)}
    masks = np.array([sum(1 << i for i in c) for j in range(max_arcs + 1)
                      for c in combinations(range(len(slots)), j)], dtype=np.int64)
    canon = masks.copy()
    for perm in permutations(mids):
        relabel = {0: 0, t: t, **dict(zip(mids, perm))}
        image = masks * 0
        for i, (u, v) in enumerate(slots):
            image |= ((masks >> i) & 1) << index[(relabel[u], relabel[v])]
        canon = np.minimum(canon, image)
    for mask in masks[canon == masks].tolist():
        yield Digraph.build(t + 1, [slots[i] for i in range(len(slots)) if mask >> i & 1])


# ----------------------------------------------------------------- Monte Carlo
@dataclass
class CutFrequency:
    arcs: tuple
    core_size: int
    hits: int
    trials: int
    freq: float
    ci_low: float
    ci_high: float


@dataclass
class MonteCarloReport:
    n: int
    m: int
    k: int
    kappa: int
    trials: int
    seed: int
    violations: int = 0
    max_depth: int = 0
    fallbacks: int = 0
    rows: list = field(default_factory=list)

    @property
    def min_freq(self):
        return min((r.freq for r in self.rows), default=None)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["cut", "core_size", "hits", "trials", "freq", "ci_low", "ci_high"])
        for r in self.rows:
            w.writerow([" ".join(map(str, r.arcs)), r.core_size, r.hits, r.trials,
                        f"{r.freq:.6g}", f"{r.ci_low:.6g}", f"{r.ci_high:.6g}"])
        return out.getvalue()

    def to_json(self) -> str:
        d = asdict(self)
        d["min_freq"] = self.min_freq
        return json.dumps(d, sort_keys=True, indent=1)


def wilson_interval(hits: int, trials: int, level: float = 0.95) -> tuple:
    if trials == 0:
        return (0.0, 1.0)
    ci = binomtest(hits, trials).proportion_ci(level, method="wilson")
    return (float(ci.low), float(ci.high))


def thread_count(threads: int | None = None) -> int:
    if threads is None:
        raw = os.environ.get("FLOWAUG_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            raise HarnessError(f"FLOWAUG_THREADS must be an integer, got {raw!r}") from None
    return max(1, threads)


def _trial_chunk(g, s, t, k, kappa, cuts, seed, lo, hi):
    hits = [0] * len(cuts)
    violations = 0
    seen = {}
    # source side of each cut; a pair leaving it can never be compatible
    sides = [reach(g, s, Z) for Z in cuts]
    stats = Stats()
    for trial in range(lo, hi):
        res = augment_randomized(g, s, t, k, kappa, rng=random.Random(f"{seed}:{trial}"), stats=stats)
        key = (res.A, res.flow)
        covered = seen.get(key)
        if covered is None:
            ga = g.add_arcs(res.A)
            unbounded = max_flow(ga, s, t).value == INFINITE
            if not (is_maxflow(ga, s, t, res.flow) and (unbounded or len(res.flow) >= kappa)):
                violations += 1
            covered = [c for c, Z in enumerate(cuts)
                       if not any(u in sides[c] and v not in sides[c] for u, v in res.A)
                       and oracle_compatible(g, s, t, Z, res.A, res.flow, ga)]
            seen[key] = covered
        for c in covered:
            hits[c] += 1
    return hits, violations, stats.max_depth, stats.fallbacks


def montecarlo(g: Digraph, s, t, k: int, kappa: int, trials: int, seed: int = 0,
               threads: int | None = None) -> MonteCarloReport:
    """Per-cut compatibility frequencies of randomized augmentation over independent trials."""
    if trials < 0:
        raise HarnessError("trials must be non-negative")
    report = MonteCarloReport(len(g.vertices), len(g.arcs), k, kappa, trials, seed)
    if trials == 0:
        return report
    cores = {Z: core for Z, core in enum_star_cuts(g, s, t, k) if len(core) >= kappa}
    cuts = list(cores)
    workers = min(thread_count(threads), trials)
    bounds = [(trials * i // workers, trials * (i + 1) // workers) for i in range(workers)]
    if workers == 1:
        parts = [_trial_chunk(g, s, t, k, kappa, cuts, seed, 0, trials)]
    else:
        with ProcessPoolExecutor(workers) as ex:
            futs = [ex.submit(_trial_chunk, g, s, t, k, kappa, cuts, seed, lo, hi) for lo, hi in bounds]
            parts = [f.result() for f in futs]
    hits = [sum(p[0][c] for p in parts) for c in range(len(cuts))]
    report.violations = sum(p[1] for p in parts)
    report.max_depth = max(p[2] for p in parts)
    report.fallbacks = sum(p[3] for p in parts)
    for Z, h in zip(cuts, hits):
        lo, hi = wilson_interval(h, trials)
        report.rows.append(CutFrequency(tuple(sorted(Z)), len(cores[Z]), h, trials, h / trials, lo, hi))
    return report


# --------------------------------------------------------- family measurement
DET_HEADER = ["instance", "n", "m", "k", "family_size", "wall_seconds"]


def measure_det_family(instances, ks, timing: bool = True, time_limit: float | None = None) -> str:
    """CSV of deterministic family sizes; ``instances`` is a list of (name, Instance).

    A cell that runs past ``time_limit`` seconds is written with family_size "timeout".
    """
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(DET_HEADER if timing else DET_HEADER[:-1])
    for name, inst in instances:
        g = inst.graph
        for k in ks:
            t0 = time.perf_counter()
            try:
                size = len(augment_deterministic(g, inst.s, inst.t, k, 0, time_limit=time_limit))
            except FamilyBudgetExceeded:
                size = "timeout"
            dt = time.perf_counter() - t0
            row = [name, len(g.vertices), len(g.arcs), k, size]
            w.writerow(row + [f"{dt:.4f}"] if timing else row)
    return out.getvalue()


def fixture_suite(with_ladder: bool = True) -> list:
    suite = list(fixtures().items())
    if with_ladder:
        suite.append(("ladder25", generate("ladder", {"L": 25}, 0)))
    return suite


def flow_value(inst: Instance):
    return max_flow(inst.graph, inst.s, inst.t).value
