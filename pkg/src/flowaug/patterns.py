"""Residual reachability between flow paths and the layered mincut sequence built from it."""
from __future__ import annotations

from typing import NamedTuple

from .flow_cuts import (FlowError, adj_reach, delta_out, is_flow, max_flow, residual_adj,
                        INFINITE)
from .graph_core import Digraph

MINCUT_BOUNDARY = "MincutBoundary"
T_REACHABLE = "TReachable"
DEAD = "Dead"


class ReachResult(NamedTuple):
    reach: frozenset
    kind: str


class LayerCut(NamedTuple):
    """A mincut crossed once by every flow path; pos[i] is the index of its arc on path i."""
    arcs: frozenset
    side: frozenset  # s-side vertex set
    pos: tuple


class FlowAnalysis:
    """Cached residual queries for a fixed graph and maxflow."""

    def __init__(self, g: Digraph, s, t, paths):
        if not paths:
            raise FlowError("analysis needs a flow of positive value")
        self.g = g
        self.s = s
        self.t = t
        self.paths = [tuple(p) for p in paths]
        self.lam = len(paths)
        self.adj = residual_adj(g, self.paths)
        self.verts = []
        self.index = []
        for p in self.paths:
            vs = [s] + [g.arcs[i].head for i in p]
            self.verts.append(vs)
            self.index.append({v: k for k, v in enumerate(vs)})
        self._reach = {}
        self._pattern = None
        self._sequence = None

    def res_reach(self, v) -> frozenset:
        r = self._reach.get(v)
        if r is None:
            r = frozenset(adj_reach(self.adj, v))
            self._reach[v] = r
        return r

    def classify(self, v) -> ReachResult:
        R = self.res_reach(v)
        if self.s in R and self.t not in R:
            return ReachResult(R, MINCUT_BOUNDARY)
        if self.s in R and self.t in R:
            return ReachResult(R, T_REACHABLE)
        if self.s not in R and self.t not in R:
            return ReachResult(R, DEAD)
        raise AssertionError("t reachable but s not: flow is not maximum")

    def last_reach_index(self, v, i) -> int:
        """Index on path i of the last vertex reachable from v, or -1."""
        R = self.res_reach(v)
        vs = self.verts[i]
        last = -1
        for k, w in enumerate(vs):
            if w in R:
                last = k
        return last

    def last_reach(self, v, i):
        k = self.last_reach_index(v, i)
        return None if k < 0 else self.verts[i][k]

    def internal(self, i) -> list:
        return self.verts[i][1:-1]

    def pattern(self) -> frozenset:
        if self._pattern is None:
            owner = {}
            for i in range(self.lam):
                if len(self.verts[i]) < 3:
                    raise FlowError(f"flow path {i} has no internal vertex")
                for v in self.internal(i):
                    owner.setdefault(v, set()).add(i)
            E = set((i, i) for i in range(self.lam))
            for i in range(self.lam):
                R = set()
                for v in self.internal(i):
                    R |= self.res_reach(v)
                for w in R:
                    for j in owner.get(w, ()):
                        E.add((i, j))
            self._pattern = frozenset(E)
        return self._pattern

    def cut_from_side(self, X) -> LayerCut:
        X = frozenset(X)
        arcs = delta_out(self.g, X)
        pos = []
        for i in range(self.lam):
            vs = self.verts[i]
            hits = [k for k in range(len(vs) - 1) if vs[k] in X and vs[k + 1] not in X]
            if len(hits) != 1:
                raise AssertionError("cut is not crossed exactly once by a flow path")
            pos.append(hits[0])
        return LayerCut(arcs, X, tuple(pos))

    def closest_to_s(self) -> LayerCut:
        return self.cut_from_side(self.res_reach(self.s))

    def leader(self, H, C: LayerCut, i):
        succ = [j for (a, j) in H if a == i]
        vs = self.verts[i]
        for k, v in enumerate(vs):
            if all(self.last_reach_index(v, j) > C.pos[j] for j in succ):
                return v
        return self.t

    def subsequent(self, H, C: LayerCut):
        X = set()
        for i in range(self.lam):
            v = self.leader(H, C, i)
            R = self.res_reach(v)
            if self.t in R:
                return None
            X |= R
        nxt = self.cut_from_side(X)
        assert len(nxt.arcs) == self.lam
        assert all(a < b for a, b in zip(C.pos, nxt.pos))
        return nxt

    def sequence(self, H=None) -> list:
        if H is None:
            H = self.pattern()
        if self._sequence is not None and self._sequence[0] == H:
            return self._sequence[1]
        seq = [self.closest_to_s()]
        while True:
            nxt = self.subsequent(H, seq[-1])
            if nxt is None:
                break
            seq.append(nxt)
        self._sequence = (H, seq)
        return seq


def _analysis(g, s, t, paths) -> FlowAnalysis:
    if not is_flow(g, s, t, paths):
        raise FlowError("not a flow")
    return FlowAnalysis(g, s, t, paths)


def res_reach(g: Digraph, s, t, paths, v) -> ReachResult:
    an = _analysis(g, s, t, paths)
    return an.classify(v)


def last_reach(g: Digraph, s, t, paths, v, i):
    return _analysis(g, s, t, paths).last_reach(v, i)


def pattern_of(g: Digraph, s, t, paths) -> frozenset:
    """Pattern as a set of (i, j) pairs over 0-based path indices."""
    return _analysis(g, s, t, paths).pattern()


def is_transitive(H) -> bool:
    H = set(H)
    for (a, b) in H:
        for (c, d) in H:
            if b == c and (a, d) not in H:
                return False
    return True


def leader(g: Digraph, s, t, paths, H, C_arcs, i):
    an = _analysis(g, s, t, paths)
    return an.leader(H, _as_layer(an, C_arcs), i)


def _as_layer(an: FlowAnalysis, C_arcs) -> LayerCut:
    from .flow_cuts import reach
    side = reach(an.g, an.s, set(C_arcs))
    return an.cut_from_side(side)


def h_subsequent(g: Digraph, s, t, paths, H, C_arcs):
    """Next mincut as an arc set, or None when undefined."""
    an = _analysis(g, s, t, paths)
    nxt = an.subsequent(H, _as_layer(an, C_arcs))
    return None if nxt is None else nxt.arcs


def h_sequence(g: Digraph, s, t, paths, H=None) -> list:
    if not has_proper_boundaries(g, s, t):
        raise FlowError("instance does not have proper boundaries")
    an = _analysis(g, s, t, paths)
    seq = an.sequence(H)
    assert seq[0].arcs == frozenset(g.out_arcs(s)) and len(seq) >= 2
    return seq


def has_proper_boundaries(g: Digraph, s, t) -> bool:
    res = max_flow(g, s, t)
    if res.value == INFINITE or res.value == 0:
        return False
    out_s = [i for i in g.out_arcs(s) if g.arcs[i].head != s]
    in_t = [i for i in g.in_arcs(t) if g.arcs[i].tail != t]
    if any(g.arcs[i].inf for i in out_s + in_t):
        return False
    if len(out_s) != res.value or len(in_t) != res.value:
        return False
    return not (set(out_s) & set(in_t))
