"""Brute-force ground truth.

Everything here is written against graph_core and a local BFS only, so a bug in
flow_cuts or the solvers cannot hide itself by agreeing with the oracle.
"""
from __future__ import annotations

from collections import deque
from itertools import combinations
from math import comb

from .graph_core import Digraph

STAR_GUARD = 2 ** 25  # candidate subsets, i.e. the cost of 25 arcs with no size bound
SUBSET_GUARD = 22


class GuardExceeded(ValueError):
    pass


def _adjacency(g: Digraph, reverse=False) -> dict:
    adj = {v: [] for v in g.vertices}
    for i, a in g.arcs.items():
        if reverse:
            adj[a.head].append((i, a.tail))
        else:
            adj[a.tail].append((i, a.head))
    return adj


def _bfs(g: Digraph, src, removed=frozenset(), reverse=False, adj=None) -> set:
    if adj is None:
        adj = _adjacency(g, reverse)
    seen = {src}
    q = deque([src])
    while q:
        u = q.popleft()
        for i, w in adj[u]:
            if w not in seen and i not in removed:
                seen.add(w)
                q.append(w)
    return seen


def _star(g: Digraph, s, t, Z, adj=None) -> bool:
    if any(g.arcs[i].inf for i in Z):
        return False
    S = _bfs(g, s, Z, adj=adj)
    if t in S:
        return False
    return all(g.arcs[i].tail in S and g.arcs[i].head not in S for i in Z)


def _core(g: Digraph, s, t, Z) -> frozenset:
    T = _bfs(g, t, Z, reverse=True)
    return frozenset(i for i in Z if g.arcs[i].head in T)


def enum_star_cuts(g: Digraph, s, t, k: int) -> list:
    """All star st-cuts of size at most k with their cores, by size then arc ids."""
    unit = sorted(i for i, a in g.arcs.items() if not a.inf)
    candidates = sum(comb(len(unit), j) for j in range(min(k, len(unit)) + 1))
    if candidates > STAR_GUARD:
        raise GuardExceeded(f"{candidates} candidate subsets exceed the enumeration guard of {STAR_GUARD}")
    out = []
    adj = _adjacency(g)
    for size in range(0, min(k, len(unit)) + 1):
        for Z in combinations(unit, size):
            Z = frozenset(Z)
            if _star(g, s, t, Z, adj):
                out.append((Z, _core(g, s, t, Z)))
    return out


def _max_flow_value(g: Digraph, s, t, limit: int) -> int:
    """Unit/infinite capacity maxflow by repeated BFS, capped at limit + 1."""
    BIG = limit + 2
    cap = {}
    adj = {v: set() for v in g.vertices}
    for a in g.arcs.values():
        if a.tail == a.head:
            continue
        c = BIG if a.inf else 1
        cap[(a.tail, a.head)] = cap.get((a.tail, a.head), 0) + c
        cap.setdefault((a.head, a.tail), 0)
        adj[a.tail].add(a.head)
        adj[a.head].add(a.tail)
    value = 0
    while value <= limit:
        par = {s: None}
        q = deque([s])
        while q and t not in par:
            u = q.popleft()
            for w in adj[u]:
                if w not in par and cap[(u, w)] > 0:
                    par[w] = u
                    q.append(w)
        if t not in par:
            break
        v = t
        while par[v] is not None:
            u = par[v]
            cap[(u, v)] -= 1
            cap[(v, u)] += 1
            v = u
        value += 1
    return value


def oracle_compatible(g: Digraph, s, t, Z, A, flow, ga: Digraph | None = None) -> bool:
    """Independent compatibility check of (A, flow) with the star cut Z.

    ``ga`` may carry a precomputed G+A when many cuts are checked against one pair.
    """
    Z = frozenset(Z)
    if any(g.arcs[i].inf for i in Z):
        return False
    S = _bfs(g, s, Z)
    if t in S or not all(g.arcs[i].tail in S and g.arcs[i].head not in S for i in Z):
        return False
    for (u, v) in A:
        if u in S and v not in S:
            return False
    if ga is None:
        ga = g.add_arcs(A)
    ga_adj = _adjacency(ga)
    core = _core(ga, s, t, Z)
    # core must be an st-cut of G+A
    if t in _bfs(ga, s, frozenset(core), adj=ga_adj):
        return False
    lam = _max_flow_value(ga, s, t, len(core))
    if lam != len(core) or len(flow) != lam:
        return False
    used = set()
    for p in flow:
        if not p:
            return False
        cur = s
        hits = 0
        for i in p:
            a = ga.arcs.get(i)
            if a is None or a.tail != cur:
                return False
            if not a.inf:
                if i in used:
                    return False
                used.add(i)
            if i in Z:
                if i not in core:
                    return False
                hits += 1
            cur = a.head
        if cur != t or hits != 1:
            return False
    return True


def compatibility_table(g: Digraph, s, t, k: int, family, kappa: int = 0) -> dict:
    """Map each star cut Z (|Z| <= k, |core| >= kappa) to whether some family member fits it."""
    table = {}
    for Z, core in enum_star_cuts(g, s, t, k):
        if len(core) < kappa:
            continue
        table[Z] = any(oracle_compatible(g, s, t, Z, p.A, p.flow) for p in family)
    return table


# ------------------------------------------------------------ problem oracles
NO = "no"


def _subsets(items, kmax):
    for size in range(0, min(kmax, len(items)) + 1):
        yield from combinations(items, size)


def _guard(n, what):
    if n > SUBSET_GUARD:
        raise GuardExceeded(f"{n} {what} exceed the brute-force guard of {SUBSET_GUARD}")


def brute_wstcut(g: Digraph, weights: dict, s, t, k: int, W: int):
    """Lightest st-cut of at most k unit arcs with weight at most W, or NO."""
    unit = sorted(i for i, a in g.arcs.items() if not a.inf)
    _guard(len(unit), "unit arcs")
    best = None
    for Z in _subsets(unit, k):
        w = sum(weights[i] for i in Z)
        if w > W or (best is not None and w >= best[0]):
            continue
        if t not in _bfs(g, s, frozenset(Z)):
            best = (w, frozenset(Z))
    return NO if best is None else best


def brute_bundled(g: Digraph, s, t, bundles, weights, k: int, W: int):
    """Lightest set of at most k bundles whose arcs together contain an st-cut."""
    _guard(len(bundles), "bundles")
    best = None
    for pick in _subsets(range(len(bundles)), k):
        w = sum(weights[b] for b in pick)
        if w > W or (best is not None and w >= best[0]):
            continue
        Z = frozenset(i for b in pick for i in bundles[b])
        if t not in _bfs(g, s, Z):
            best = (w, frozenset(pick))
    return NO if best is None else best


def _skew_ok(g: Digraph, pairs, Z) -> bool:
    for i, (si, _) in enumerate(pairs):
        R = _bfs(g, si, Z)
        for (_, tj) in pairs[i:]:
            if tj in R:
                return False
    return True


def brute_skew(g: Digraph, pairs, weights: dict, k: int, W: int):
    """Lightest arc set separating s_i from t_j for all i <= j; unweighted arcs stay."""
    arcs = sorted(i for i in g.arcs if i in weights)
    _guard(len(arcs), "arcs")
    best = None
    for Z in _subsets(arcs, k):
        w = sum(weights[i] for i in Z)
        if w > W or (best is not None and w >= best[0]):
            continue
        if _skew_ok(g, pairs, frozenset(Z)):
            best = (w, frozenset(Z))
    return NO if best is None else best


def _acyclic(vertices, arcs) -> bool:
    indeg = {v: 0 for v in vertices}
    out = {v: [] for v in vertices}
    for (u, v) in arcs:
        if u == v:
            return False
        out[u].append(v)
        indeg[v] += 1
    q = deque(v for v in vertices if indeg[v] == 0)
    seen = 0
    while q:
        u = q.popleft()
        seen += 1
        for w in out[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                q.append(w)
    return seen == len(vertices)


def brute_dfas(g: Digraph, weights: dict, k: int, W: int):
    """Lightest feedback arc set; unweighted arcs stay."""
    arcs = sorted(i for i in g.arcs if i in weights)
    _guard(len(arcs), "arcs")
    best = None
    for Z in _subsets(arcs, k):
        w = sum(weights[i] for i in Z)
        if w > W or (best is not None and w >= best[0]):
            continue
        rest = [(a.tail, a.head) for i, a in g.arcs.items() if i not in Z]
        if _acyclic(g.vertices, rest):
            best = (w, frozenset(Z))
    return NO if best is None else best


def brute_dfvs(g: Digraph, weights: dict, k: int, W: int):
    verts = sorted(g.vertices)
    _guard(len(verts), "vertices")
    best = None
    for X in _subsets(verts, k):
        w = sum(weights[v] for v in X)
        if w > W or (best is not None and w >= best[0]):
            continue
        keep = set(verts) - set(X)
        rest = [(a.tail, a.head) for a in g.arcs.values() if a.tail in keep and a.head in keep]
        if _acyclic(keep, rest):
            best = (w, frozenset(X))
    return NO if best is None else best


PROBLEMS = ("wstcut", "bundled", "chainsat", "skew", "dfas", "dfvs")


def brute_solver(problem: str, **kw):
    """Dispatch by problem tag; returns (weight, certificate) or NO."""
    if problem == "wstcut":
        return brute_wstcut(kw["graph"], kw["weights"], kw["s"], kw["t"], kw["k"], kw["W"])
    if problem in ("bundled", "chainsat"):
        return brute_bundled(kw["graph"], kw["s"], kw["t"], kw["bundles"], kw["weights"], kw["k"], kw["W"])
    if problem == "skew":
        return brute_skew(kw["graph"], kw["pairs"], kw["weights"], kw["k"], kw["W"])
    if problem == "dfas":
        return brute_dfas(kw["graph"], kw["weights"], kw["k"], kw["W"])
    if problem == "dfvs":
        return brute_dfvs(kw["graph"], kw["weights"], kw["k"], kw["W"])
    raise ValueError(f"unknown problem {problem!r}")
