"""Directed flow-augmentation, randomized and deterministic.

The recursion works on (G, s, t, k, kappa, flow).  Every call returns a list of
outputs; randomized and guided runs make a single choice at each guess so the
list has one element, deterministic runs branch over every option.

Internally an output is ``(A, paths)`` where ``A`` is a frozenset of vertex pairs
and each path is a tuple of steps ``(tail, head, arc_id)``; ``arc_id`` is None for
steps that use an added infinite arc.  Public results convert these into arc ids
of ``G + A`` as produced by ``Digraph.add_arcs``.
"""
from __future__ import annotations

import hashlib
import logging
import random
import time
from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple

from .derandom import separation_sets, splitter_functions
from .flow_cuts import (INFINITE, OVER, _augment, _decompose, _flow_counts, _inf_path,
                        delta_in, delta_out, is_flow, is_star_cut, max_flow, reach,
                        bottleneck_arcs)
from .graph_core import Arc, Digraph
from .patterns import FlowAnalysis, is_transitive

log = logging.getLogger(__name__)

EMPTY = (frozenset(), ())


class FamilyBudgetExceeded(RuntimeError):
    pass


class AugPair(NamedTuple):
    A: frozenset
    flow: tuple  # arc-id tuples in G + A

    def graph(self, g: Digraph) -> Digraph:
        return g.add_arcs(self.A)


@dataclass
class AugCall:
    G: Digraph
    s: int
    t: int
    k: int
    kappa: int
    P: list
    depth: int = 0


@dataclass
class Stats:
    calls: int = 0
    checkpoints: int = 0
    max_depth: int = 0
    over_depth: int = 0  # runs whose depth exceeded D(k0) of their own top-level k0
    fallbacks: int = 0
    sanitized: int = 0
    guidance_lost: int = 0
    large_cases: int = 0
    small_cases: int = 0
    base_cases: int = 0
    budget_checks: int = 0
    whitebox_checks: int = 0
    notes: list = field(default_factory=list)


# running totals over every public call in this process (depth and fallback auditing)
TOTALS = Stats()


def reset_totals():
    global TOTALS
    TOTALS = Stats()


def totals() -> Stats:
    return TOTALS


def st_pair(s, t):
    return (frozenset({(s, t)}), (((s, t, None),),))


def depth_bound(k0: int, c: int = 2) -> int:
    return 2 * k0 * (k0 * k0 + 2) + c


class _Target:
    """A known star cut carried through the recursion in guided (white-box) mode."""

    __slots__ = ("Z", "side", "g", "s", "t", "_core")

    def __init__(self, g: Digraph, s, t, Z):
        self.g, self.s, self.t = g, s, t
        self.Z = frozenset(Z)
        self.side = frozenset(reach(g, s, self.Z))
        self._core = None

    @classmethod
    def make(cls, g, s, t, Z):
        Z = frozenset(i for i in Z if i in g.arcs)
        if any(g.arcs[i].inf for i in Z):
            return None
        if not is_star_cut(g, s, t, Z):
            return None
        return cls(g, s, t, Z)

    @property
    def core(self):
        if self._core is None:
            T = reach(self.g, self.t, self.Z, reverse=True)
            self._core = frozenset(i for i in self.Z if self.g.arcs[i].head in T)
        return self._core

    def s_side(self, v) -> bool:
        return v in self.side


_NO = object()


def _steps_of(g: Digraph, base: Digraph, path) -> tuple:
    """Arc-id path of g as steps, marking arcs not present in base as added pairs."""
    out = []
    for i in path:
        a = g.arcs[i]
        out.append((a.tail, a.head, i if i in base.arcs else None))
    return tuple(out)


def _remove_cycles(steps) -> tuple:
    out = []
    seen = {}
    if not steps:
        return ()
    seen[steps[0][0]] = 0
    for st in steps:
        out.append(st)
        h = st[1]
        if h in seen:
            cut = seen[h]
            for x in out[cut:]:
                if x[1] in seen and seen[x[1]] > cut:
                    del seen[x[1]]
            out = out[:cut]
            seen[h] = cut
        else:
            seen[h] = len(out)
    return tuple(out)


def to_public(g: Digraph, res) -> AugPair:
    A, paths = res
    ids = g.pair_ids(A)
    flow = []
    for p in paths:
        flow.append(tuple(ids[(u, v)] if i is None else i for (u, v, i) in p))
    return AugPair(frozenset(A), tuple(flow))


class Augmenter:
    """One augmentation run (or one deterministic family) for a fixed top-level k."""

    def __init__(self, k0: int, mode: str = "rand", seed: int = 0, target_check: bool = True,
                 depth_const: int = 2, time_limit: float | None = None):
        if mode not in ("det", "rand", "guided"):
            raise ValueError("mode must be det, rand or guided")
        self.k0 = k0
        self.mode = mode
        self.seed = seed
        self.ell_big = 4 * k0 * k0 + 3
        self.D = depth_bound(k0, depth_const)
        self.cap = 4 * self.D
        self.stats = Stats()
        self.memo = {}
        self.analyses = {}
        self.target_check = target_check
        self.deadline = None if time_limit is None else time.perf_counter() + time_limit

    # ---------------------------------------------------------------- helpers
    def tick(self):
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise FamilyBudgetExceeded("deterministic family exceeded its time limit")

    def rng(self, path) -> random.Random:
        h = hashlib.blake2b(repr((self.seed, path)).encode(), digest_size=8).digest()
        return random.Random(int.from_bytes(h, "big"))

    def pick(self, rng, groups, truth=_NO, target=None):
        """groups: list of (weight, options).  Returns the options to explore."""
        groups = [(w, opts) for w, opts in groups if opts]
        if self.mode == "det":
            out = []
            for _, opts in groups:
                out.extend(opts)
            return out
        if self.mode == "guided" and target is not None:
            if truth is not _NO and any(truth in opts for _, opts in groups):
                return [truth]
            self.stats.guidance_lost += 1
        total = sum(w for w, _ in groups)
        x = rng.random() * total
        for w, opts in groups:
            if x < w:
                return [opts[rng.randrange(len(opts))]]
            x -= w
        return [groups[-1][1][-1]]

    @staticmethod
    def pinned(g, s, t):
        """Vertices joined to s (resp. to t) by infinite arcs alone; no cut separates them."""
        unit = [i for i, a in g.arcs.items() if not a.inf]
        return reach(g, s, unit), reach(g, t, unit, reverse=True)

    def analysis(self, g, s, t, P) -> FlowAnalysis:
        key = (g.key(), s, t, tuple(P))
        an = self.analyses.get(key)
        if an is None:
            if len(self.analyses) > 4096:
                self.analyses.clear()
            an = FlowAnalysis(g, s, t, P)
            self.analyses[key] = an
        return an

    @staticmethod
    def maximize(g, s, t, P, k=None):
        """Maximum flow starting from P; P itself is returned when already maximum."""
        p = _inf_path(g, s, t)
        if p is not None:
            return [p], INFINITE
        if P and not is_flow(g, s, t, P):
            P = []
        f = _flow_counts(g, P)
        value = len(P)
        grew = False
        while k is None or value <= k:
            if not _augment(g, s, t, f):
                break
            grew = True
            value += 1
        paths = _decompose(g, s, t, f, value) if grew else [tuple(p) for p in P]
        if k is not None and value > k:
            return paths, OVER
        return paths, value

    def child_target(self, target, g, s, t, Z=None):
        if target is None:
            return None
        tg = _Target.make(g, s, t, target.Z if Z is None else Z)
        if tg is None:
            self.stats.guidance_lost += 1
        return tg

    @staticmethod
    def lift(parent: Digraph, s, t, res, extra_A=(), extra_paths=()):
        A = set(res[0])
        A.update(p for p in extra_A if p[0] != p[1])
        out = []
        for p in res[1]:
            steps = []
            for (u, v, i) in p:
                if i is not None and i in parent.arcs:
                    a = parent.arcs[i]
                    if a.tail != u:
                        steps.append((s, a.tail, None))
                    steps.append((a.tail, a.head, i))
                    if a.head != v:
                        steps.append((a.head, t, None))
                elif u != v:
                    steps.append((u, v, None))
            out.append(tuple(steps))
        out.extend(extra_paths)
        for p in out:
            for (u, v, i) in p:
                if i is None:
                    A.add((u, v))
        return (frozenset(A), tuple(out))

    def is_valid_output(self, g, s, t, kappa, res) -> bool:
        A, paths = res
        ga = g.add_arcs(A)
        ids = g.pair_ids(A)
        try:
            flow = [tuple(ids[(u, v)] if i is None else i for (u, v, i) in p) for p in paths]
        except KeyError:
            return False
        if not is_flow(ga, s, t, flow):
            return False
        if _inf_path(ga, s, t) is not None:
            return any(all(ga.arcs[i].inf for i in p) for p in flow)
        if _augment(ga, s, t, _flow_counts(ga, flow)):
            return False
        return len(flow) >= kappa

    def sanitize(self, g, s, t, kappa, res):
        """Make sure the flow is a maximum flow of G+A of value at least kappa.

        Compatible outputs already satisfy this, so they are never changed.
        """
        if self.is_valid_output(g, s, t, kappa, res):
            return res
        self.stats.sanitized += 1
        A = res[0]
        ga = g.add_arcs(A)
        fr = max_flow(ga, s, t)
        if fr.value == INFINITE:
            return (A, (_steps_of(ga, g, fr.paths[0]),))
        if fr.value < kappa:
            return st_pair(s, t)
        return (A, tuple(_steps_of(ga, g, p) for p in fr.paths))

    # ------------------------------------------------------------- recursion
    def solve(self, G, s, t, k, kappa, P, target=None, path=(), depth=0) -> list:
        self.stats.calls += 1
        key = None
        if self.mode == "det":
            key = (G.key(), s, t, k, kappa, tuple(tuple(p) for p in P))
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        out = self._solve(G, s, t, k, kappa, P, target, path, depth)
        if self.mode == "det":
            seen = set()
            uniq = []
            for r in out:
                if r not in seen:
                    seen.add(r)
                    uniq.append(r)
            out = uniq
            self.memo[key] = out
        return out

    def _solve(self, G, s, t, k, kappa, P, target, path, depth):
        P, lam = self.maximize(G, s, t, P, k)
        if lam == INFINITE or lam == OVER:
            return [st_pair(s, t)]
        if lam == 0:
            return [EMPTY] if kappa <= 0 else [st_pair(s, t)]
        kappa = max(kappa, lam)
        if kappa > k:
            return [st_pair(s, t)]
        call = AugCall(G, s, t, k, kappa, P, depth)
        an = self.analysis(G, s, t, P)
        rng = self.rng(path)
        S = an.res_reach(s)
        if S != frozenset([s]):
            return self._source_side(call, an, S, target, path, rng)
        T = frozenset(_co_reach(an, t))
        if T != frozenset([t]):
            return self._sink_side(call, an, T, target, path, rng)
        st_arcs = [i for i in G.out_arcs(s) if G.arcs[i].head == t]
        if st_arcs:
            e = st_arcs[0]
            idx = next(j for j, p in enumerate(P) if e in p)
            rest = [p for j, p in enumerate(P) if j != idx]
            g2 = G.delete_arcs([e])
            tg = self.child_target(target, g2, s, t, (target.Z - {e}) if target else None)
            subs = self.solve(g2, s, t, k - 1, kappa - 1, rest, tg, path + (0,), depth)
            return [self.lift(G, s, t, r, extra_paths=(((s, t, e),),)) for r in subs]
        # proper boundaries from here on
        depth += 1
        self.stats.checkpoints += 1
        self.tick()
        if depth > self.D and self.stats.max_depth <= self.D:
            self.stats.over_depth += 1
        self.stats.max_depth = max(self.stats.max_depth, depth)
        if depth > self.cap:
            self.stats.fallbacks += 1
            log.warning("recursion depth cap exceeded; returning fallback output")
            return [st_pair(s, t)]
        call.depth = depth
        H = an.pattern()
        if len(H) == lam:
            self.stats.base_cases += 1
            return self._base_case(call, an, target, path, rng)
        seq = an.sequence(H)
        if len(seq) <= self.ell_big:
            self.stats.small_cases += 1
            return self._small_case(call, an, H, seq, target, path, rng)
        assert is_transitive(H)
        self.stats.large_cases += 1
        return self._large_case(call, an, H, seq, target, path, rng)

    # ---------------------------------------------------------- preprocessing
    def _source_side(self, call, an, S, target, path, rng):
        G, s, t = call.G, call.s, call.t
        C = delta_out(G, S)
        tails = sorted({G.arcs[i].tail for i in C} - {s})
        pin_s, _ = self.pinned(G, s, t)
        movable = [v for v in tails if v not in pin_s]
        truth = _NO
        if target is not None:
            bad = [v for v in tails if not target.s_side(v)]
            truth = ("tail", bad[0]) if bad else ("contract",)
        opts = self.pick(rng, [(0.5, [("tail", v) for v in movable]), (0.5, [("contract",)])], truth, target)
        out = []
        for n, opt in enumerate(opts):
            sub = path + (n,)
            if opt[0] == "tail":
                v = opt[1]
                g2 = G.add_arcs([(v, t)])
                tg = self.child_target(target, g2, s, t)
                for r in self.solve(g2, s, t, call.k, call.kappa, call.P, tg, sub, call.depth):
                    out.append(self.lift(G, s, t, r, extra_A=[(v, t)]))
            else:
                g2, _ = G.contract(S, s, avoid=t)
                P2 = [_suffix_from(G, p, S) for p in call.P]
                tg = self.child_target(target, g2, s, t)
                for r in self.solve(g2, s, t, call.k, call.kappa, P2, tg, sub, call.depth):
                    out.append(self.lift(G, s, t, r, extra_A=[(s, v) for v in tails]))
        return out

    def _sink_side(self, call, an, T, target, path, rng):
        G, s, t = call.G, call.s, call.t
        C = delta_in(G, T)
        heads = sorted({G.arcs[i].head for i in C} - {t})
        _, pin_t = self.pinned(G, s, t)
        movable = [v for v in heads if v not in pin_t]
        truth = _NO
        if target is not None:
            bad = [v for v in heads if target.s_side(v)]
            truth = ("head", bad[0]) if bad else ("contract",)
        opts = self.pick(rng, [(0.5, [("head", v) for v in movable]), (0.5, [("contract",)])], truth, target)
        out = []
        for n, opt in enumerate(opts):
            sub = path + (n,)
            if opt[0] == "head":
                v = opt[1]
                g2 = G.add_arcs([(s, v)])
                tg = self.child_target(target, g2, s, t)
                for r in self.solve(g2, s, t, call.k, call.kappa, call.P, tg, sub, call.depth):
                    out.append(self.lift(G, s, t, r, extra_A=[(s, v)]))
            else:
                g2, _ = G.contract(T, t, avoid=s)
                P2 = [_prefix_until(G, p, T) for p in call.P]
                tg = self.child_target(target, g2, s, t)
                for r in self.solve(g2, s, t, call.k, call.kappa, P2, tg, sub, call.depth):
                    out.append(self.lift(G, s, t, r, extra_A=[(v, t) for v in heads]))
        return out

    # -------------------------------------------------------------- base case
    def _base_case(self, call, an, target, path, rng):
        G, s, t, P = call.G, call.s, call.t, call.P
        lam = len(P)
        bn = bottleneck_arcs(G, s, t, P)
        per_path = [[i for i in p if i in bn] for p in P]
        options = [("dup", i) for i in range(lam)]
        groups = [(1.0, options)]
        if call.kappa == lam:
            groups = [(0.5, [("core",)]), (0.5, options)]
        truth = _NO
        if target is not None:
            if len(target.core) == lam:
                truth = ("core",)
            else:
                free = [i for i in range(lam) if not (set(per_path[i]) & target.Z)]
                truth = ("dup", free[0]) if free else _NO
        out = []
        for n, opt in enumerate(self.pick(rng, groups, truth, target)):
            if opt[0] == "core":
                A = set()
                paths = []
                for arcs in per_path:
                    steps = []
                    prev = s
                    for i in arcs:
                        a = G.arcs[i]
                        if prev != a.tail:
                            A.add((prev, a.tail))
                            steps.append((prev, a.tail, None))
                        steps.append((a.tail, a.head, i))
                        prev = a.head
                    if prev != t:
                        A.add((prev, t))
                        steps.append((prev, t, None))
                    paths.append(tuple(steps))
                out.append((frozenset(A), tuple(paths)))
            else:
                i = opt[1]
                pairs = {(G.arcs[e].tail, G.arcs[e].head) for e in per_path[i]}
                g2 = G.add_arcs(pairs)
                tg = self.child_target(target, g2, s, t)
                for r in self.solve(g2, s, t, call.k, call.kappa, P, tg, path + (n,), call.depth):
                    out.append(self.lift(G, s, t, r, extra_A=pairs))
        return out

    # --------------------------------------------------------- small-ell case
    def _small_case(self, call, an, H, seq, target, path, rng):
        G, s, t, P = call.G, call.s, call.t, call.P
        lam = len(P)
        B = set()
        for C in seq:
            for i in C.arcs:
                B.add(G.arcs[i].tail)
                B.add(G.arcs[i].head)
        Bidx = [[j for j, v in enumerate(an.verts[i]) if v in B] for i in range(lam)]
        pin_s, pin_t = self.pinned(G, s, t)

        def fits(i, p):
            # B vertex p of path i on the s-side and the next one (if any) on the t-side
            v = an.verts[i][Bidx[i][p]]
            if v == t or v in pin_t:
                return False
            return p + 1 >= len(Bidx[i]) or an.verts[i][Bidx[i][p + 1]] not in pin_s

        choices = [[p for p in range(len(Bidx[i])) if fits(i, p)] for i in range(lam)]
        cc2 = []
        for i in range(lam):
            for pu in range(len(Bidx[i])):
                u = an.verts[i][Bidx[i][pu]]
                if u == s or u in pin_s:
                    continue
                for pv in range(pu + 1, len(Bidx[i])):
                    v = an.verts[i][Bidx[i][pv]]
                    if v != t and v not in pin_t:
                        cc2.append(("cc2", i, pu, pv))

        def sides_of(tup):
            side = {}
            for i, p in enumerate(tup):
                for q, j in enumerate(Bidx[i]):
                    v = an.verts[i][j]
                    want = q <= p
                    if side.setdefault(v, want) != want:
                        return None
            return side

        truth = _NO
        if target is not None:
            tup = []
            for i in range(lam):
                flags = [target.s_side(an.verts[i][j]) for j in Bidx[i]]
                first_t = next((q for q, f in enumerate(flags) if not f), None)
                last_s = max(q for q, f in enumerate(flags) if f)
                if first_t is not None and first_t < last_s:
                    truth = ("cc2", i, first_t, last_s)
                    break
                tup.append(last_s)
            if truth is _NO:
                truth = ("tuple", tuple(tup))

        if self.mode == "det":
            opts = list(cc2)
            for tup in product(*choices):
                if sides_of(tup) is not None:
                    opts.append(("tuple", tuple(tup)))
        elif self.mode == "guided" and target is not None and truth is not _NO:
            opts = [truth]
        else:
            if self.mode == "guided":
                self.stats.guidance_lost += 1
            tup = None
            if all(choices) and not (cc2 and rng.random() < 0.25):
                for _ in range(1000):
                    cand = tuple(c[rng.randrange(len(c))] for c in choices)
                    if sides_of(cand) is not None:
                        tup = cand
                        break
            if tup is not None:
                opts = [("tuple", tup)]
            elif cc2:
                opts = [cc2[rng.randrange(len(cc2))]]
            else:
                return [EMPTY if call.kappa == lam else st_pair(s, t)]

        out = []
        for n, opt in enumerate(opts):
            sub = path + (n,)
            if opt[0] == "cc2":
                _, i, pu, pv = opt
                u = an.verts[i][Bidx[i][pu]]
                v = an.verts[i][Bidx[i][pv]]
                A0 = {(s, v), (u, t)}
                g2 = G.add_arcs(A0)
                tg = self.child_target(target, g2, s, t)
                for r in self.solve(g2, s, t, call.k, call.kappa, P, tg, sub, call.depth):
                    out.append(self.lift(G, s, t, r, extra_A=A0))
                continue
            tup = opt[1]
            side = sides_of(tup)
            out.extend(self._small_tuple(call, an, seq, B, Bidx, tup, side, target, sub, rng))
        return out

    def _small_tuple(self, call, an, seq, B, Bidx, tup, side, target, path, rng):
        G, s, t, P, k, kappa = call.G, call.s, call.t, call.P, call.k, call.kappa
        lam = len(P)
        left = {v for v, f in side.items() if f}
        right = {v for v, f in side.items() if not f}
        if not right:
            # every cut endpoint is on the source side: contract past the last cut
            X = seq[-1].side
            g2, _ = G.contract(X, s, avoid=t)
            P2 = [_suffix_from(G, p, X) for p in P]
            tg = self.child_target(target, g2, s, t)
            A0 = [(s, v) for v in B if v != s]
            return [self.lift(G, s, t, r, extra_A=A0)
                    for r in self.solve(g2, s, t, k, kappa, P2, tg, path + (0,), call.depth)]
        A0 = {(s, v) for v in left if v != s} | {(u, t) for u in right if u != t}
        g0 = G.add_arcs(A0)
        ids = G.pair_ids(A0)
        P0 = []
        for i in range(lam):
            vi = Bidx[i][tup[i]]
            ui = Bidx[i][tup[i] + 1] if tup[i] + 1 < len(Bidx[i]) else None
            arcs = list(P[i][vi:ui] if ui is not None else P[i][vi:])
            v = an.verts[i][vi]
            if v != s:
                arcs.insert(0, ids[(s, v)])
            if ui is not None and an.verts[i][ui] != t:
                arcs.append(ids[(an.verts[i][ui], t)])
            P0.append(tuple(arcs))
        P0max, val = self.maximize(g0, s, t, P0, lam)
        if val != lam:
            tg = self.child_target(target, g0, s, t)
            return [self.lift(G, s, t, r, extra_A=A0)
                    for r in self.solve(g0, s, t, k, kappa, P0, tg, path + (0,), call.depth)]
        for i, p in enumerate(P0):
            units = [e for e in p if not g0.arcs[e].inf]
            if len(units) == 1:
                e = units[0]
                g2 = g0.delete_arcs([e])
                rest = [q for j, q in enumerate(P0) if j != i]
                tg = self.child_target(target, g2, s, t, (target.Z - {e}) if target else None)
                mine = _steps_of(g0, G, p)
                return [self.lift(G, s, t, r, extra_A=A0, extra_paths=(mine,))
                        for r in self.solve(g2, s, t, k - 1, kappa - 1, rest, tg, path + (0,), call.depth)]
        # main case
        a = 0
        for idx, C in enumerate(seq):
            ends = set()
            for e in C.arcs:
                ends.add(G.arcs[e].tail)
                ends.add(G.arcs[e].head)
            if ends <= left:
                a = idx + 1
        if a == 0 or a >= len(seq):
            self.stats.notes.append("small case: inconsistent cut guess")
            return [EMPTY if kappa == lam else st_pair(s, t)]
        an0 = self.analysis(g0, s, t, P0)
        T0 = _co_reach(an0, t)
        C = sorted(delta_in(g0, T0))
        pin_s, pin_t = self.pinned(g0, s, t)
        cut_opts = [("cut", e) for e in C if G.arcs[e].tail not in pin_t and G.arcs[e].head not in pin_s]
        head_opts = [("head", w) for w in sorted({G.arcs[e].head for e in C} - {t}) if w not in pin_t]
        truth = _NO
        if target is not None:
            heads_s = [w for (_, w) in head_opts if target.s_side(w)]
            tails_s = [e for e in C if target.s_side(G.arcs[e].tail)]
            if heads_s:
                truth = ("head", heads_s[0])
            elif tails_s:
                truth = ("cut", tails_s[0])
            else:
                truth = ("contract",)
        opts = self.pick(rng, [(0.5, [("contract",)]), (0.25, head_opts), (0.25, cut_opts)], truth, target)
        out = []
        for n, opt in enumerate(opts):
            sub = path + (n + 1,)
            if opt[0] == "cut":
                e = opt[1]
                v, u = G.arcs[e].tail, G.arcs[e].head
                idx = next(j for j, p in enumerate(P) if e in p)
                rest = [q for j, q in enumerate(P) if j != idx]
                g2 = G.delete_arcs([e])
                tg = self.child_target(target, g2, s, t, (target.Z - {e}) if target else None)
                steps = []
                if v != s:
                    steps.append((s, v, None))
                steps.append((v, u, e))
                if u != t:
                    steps.append((u, t, None))
                for r in self.solve(g2, s, t, k - 1, kappa - 1, rest, tg, sub, call.depth):
                    out.append(self.lift(G, s, t, r, extra_A=[(s, v), (u, t)], extra_paths=(tuple(steps),)))
            elif opt[0] == "head":
                w = opt[1]
                g2 = g0.add_arcs([(s, w)])
                tg = self.child_target(target, g2, s, t)
                for r in self.solve(g2, s, t, k, kappa, P0, tg, sub, call.depth):
                    out.append(self.lift(G, s, t, r, extra_A=A0 | {(s, w)}))
            else:
                Xa = seq[a - 1].side
                g1, _ = G.contract(Xa, s, avoid=t)
                Cset = set(C)
                TC = g1.vertices - reach(g1, s, Cset)
                g2, _ = g1.contract(TC, t, avoid=s)
                P2 = []
                for i, p in enumerate(P):
                    lo = seq[a - 1].pos[i]
                    hi = next(j for j, e in enumerate(p) if e in Cset)
                    P2.append(tuple(p[lo:hi + 1]))
                endpoints = set()
                for e in C:
                    endpoints.add(G.arcs[e].tail)
                    endpoints.add(G.arcs[e].head)
                tg = self.child_target(target, g2, s, t)
                extra = set(A0) | {(v, t) for v in endpoints if v != t}
                for r in self.solve(g2, s, t, k, kappa, P2, tg, sub, call.depth):
                    out.append(self.lift(G, s, t, r, extra_A=extra))
        return out

    # --------------------------------------------------------- large-ell case
    def _large_case(self, call, an, H, seq, target, path, rng):
        return _LargeCase(self, call, an, H, seq, target, path, rng).run()


def _co_reach(an: FlowAnalysis, t) -> set:
    radj = {v: set() for v in an.adj}
    for u, ws in an.adj.items():
        for w in ws:
            radj[w].add(u)
    seen = {t}
    stack = [t]
    while stack:
        u = stack.pop()
        for w in radj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _suffix_from(g: Digraph, p, X) -> tuple:
    """Path suffix starting at its last arc leaving X."""
    start = 0
    for j, i in enumerate(p):
        a = g.arcs[i]
        if a.tail in X and a.head not in X:
            start = j
    return tuple(p[start:])


def _prefix_until(g: Digraph, p, T) -> tuple:
    """Path prefix ending at its first arc entering T."""
    for j, i in enumerate(p):
        a = g.arcs[i]
        if a.head in T and a.tail not in T:
            return tuple(p[:j + 1])
    return tuple(p)


class _LargeCase:
    """Long mincut sequence: split into blocks around the guessed touched indices."""

    def __init__(self, aug: Augmenter, call: AugCall, an: FlowAnalysis, H, seq, target, path, rng):
        self.aug = aug
        self.call = call
        self.an = an
        self.H = H
        self.seq = seq
        self.target = target
        self.path = path
        self.rng = rng
        self.G, self.s, self.t = call.G, call.s, call.t
        self.k, self.kappa, self.P = call.k, call.kappa, call.P
        self.lam = len(call.P)
        self.ell = len(seq)
        self.child_n = 0

    # vertex on path i at checkpoint a: tail of the arc of C_a, s before C_1, t after C_ell
    def tau(self, a, i):
        if a <= 1:
            return self.s
        if a > self.ell:
            return self.t
        return self.an.verts[i][self.seq[a - 1].pos[i]]

    def on_t_side(self, v, a) -> bool:
        if a <= 0:
            return True
        if a > self.ell:
            return False
        return v not in self.seq[a - 1].side

    def trivial(self):
        return [EMPTY if self.kappa == self.lam else st_pair(self.s, self.t)]

    def blocks_of(self, gamma):
        lam = self.lam
        blocks = []
        for a in sorted(gamma):
            if blocks and a - blocks[-1][-1] <= lam:
                blocks[-1].append(a)
            else:
                blocks.append([a])
        lim = 4 * self.k - 2 * lam
        return [b for b in blocks if len(b) <= lim and b[-1] - b[0] <= (lim - 1) * lam]

    def closure(self, L):
        return frozenset(j for (i, j) in self.H if i in L)

    def downward_closed(self, L) -> bool:
        return all(j in L for (i, j) in self.H if i in L)

    # ------------------------------------------------------------ white box
    def truth_L(self, a):
        if a <= 0:
            return frozenset(range(self.lam))
        if a > self.ell:
            return frozenset()
        tg = self.target
        C = self.seq[a - 1]
        out = set()
        for i in range(self.lam):
            j = C.pos[i]
            if tg.s_side(self.an.verts[i][j]) and tg.s_side(self.an.verts[i][j + 1]):
                out.add(i)
        return frozenset(out)

    def touched(self):
        tg = self.target
        G = self.G
        arcs = set(tg.Z)
        for p in self.P:
            for e in p:
                a = G.arcs[e]
                if not tg.s_side(a.tail) and tg.s_side(a.head):
                    arcs.add(e)
        idx = set()
        for e in arcs:
            for v in (G.arcs[e].tail, G.arcs[e].head):
                best = 0
                for a in range(1, self.ell + 1):
                    if self.on_t_side(v, a):
                        best = a
                idx.add(best)
        self.aug.stats.whitebox_checks += 1
        assert len(idx) <= 2 * len(arcs), "too many touched indices"
        Ls = [self.truth_L(a) for a in range(0, self.ell + 2)]
        for a in range(len(Ls)):
            cl = self.closure(Ls[a])
            for b in range(a, len(Ls)):
                assert Ls[b] <= cl, "later L escapes the closure of an earlier one"
        return idx

    # ------------------------------------------------------------------ run
    def run(self):
        aug = self.aug
        k, lam, ell = self.k, self.lam, self.ell
        tg = self.target
        U = list(range(ell + 1))
        guided = aug.mode == "guided" and tg is not None
        if aug.mode == "det":
            gammas = separation_sets(U, 4 * k - 2 * lam, 12 * k * lam)
        elif guided:
            gammas = [frozenset(self.touched())]
        else:
            gammas = [frozenset(a for a in U if self.rng.random() < 1.0 / k)]
        out = []
        for gamma in gammas:
            aug.tick()
            blocks = self.blocks_of(gamma)
            kept = frozenset(a for b in blocks for a in b)
            if guided and kept != gamma:
                aug.stats.guidance_lost += 1
            out.extend(self.with_blocks(blocks, kept))
        return out

    def with_blocks(self, blocks, gamma):
        aug = self.aug
        k, lam = self.k, self.lam
        xi = len(blocks)
        top = min(4 * k - 2 * lam, xi)
        if top < 1:
            return self.trivial()
        guided = aug.mode == "guided" and self.target is not None
        if aug.mode == "det":
            etas = list(range(1, top + 1))
        elif guided:
            etas = [xi] if xi <= top else [top]
        else:
            etas = [1 + self.rng.randrange(top)]
        out = []
        for eta in etas:
            for chain in self.chains(eta, blocks):
                out.extend(self.with_chain(blocks, gamma, eta, chain))
        return out

    def chains(self, eta, blocks):
        lam = self.lam
        valid = []
        for m in product(range(eta), repeat=lam):
            if all(m[j] >= m[i] for (i, j) in self.H):
                valid.append(m)
        if self.aug.mode == "det":
            pick = valid
        elif self.aug.mode == "guided" and self.target is not None:
            want = [self.truth_L(blocks[0][0] - 1)] + [self.truth_L(b[-1] + lam) for b in blocks]
            m = tuple(max([io for io in range(eta) if i in want[io]], default=-1) for i in range(lam))
            ok = (len(want) == eta + 1 and want[0] == frozenset(range(lam)) and not want[-1]
                  and all(want[x] >= want[x + 1] for x in range(eta)) and m in valid
                  and all(self.truth_L(blocks[x + 1][0] - 1) == want[x + 1] for x in range(eta - 1)))
            if not ok:
                self.aug.stats.guidance_lost += 1
                pick = [valid[self.rng.randrange(len(valid))]]
            else:
                pick = [m]
        else:
            pick = [valid[self.rng.randrange(len(valid))]]
        for m in pick:
            yield [frozenset(i for i in range(lam) if m[i] >= io) for io in range(eta + 1)]

    def with_chain(self, blocks, gamma, eta, chain):
        aug = self.aug
        xi = len(blocks)
        J = [io for io in range(1, eta + 1) if chain[io - 1] != chain[io]]
        Dset = {io: chain[io - 1] - chain[io] for io in J}
        n_lab = xi - 1
        if aug.mode == "det":
            if n_lab == 0:
                labelings = [()]
            else:
                fam = splitter_functions(range(1, xi), range(eta + 1), 2 * eta)
                labelings = [tuple(f[a] for a in range(1, xi)) for f in fam]
        elif aug.mode == "guided" and self.target is not None:
            labelings = [tuple(range(1, xi))] if xi - 1 <= eta else None
            if labelings is None:
                aug.stats.guidance_lost += 1
                labelings = [tuple(self.rng.randrange(eta + 1) for _ in range(n_lab))]
        else:
            labelings = [tuple(self.rng.randrange(eta + 1) for _ in range(n_lab))]
        out = []
        for lab in labelings:
            Lab = [chain[0]] + [chain[x] for x in lab] + [chain[eta]]
            out.extend(self.with_labels(blocks, gamma, eta, chain, J, Dset, Lab))
        return out

    def with_labels(self, blocks, gamma, eta, chain, J, Dset, Lab):
        aug = self.aug
        xi = len(blocks)
        good = {}
        excellent = {}
        for al in range(1, xi + 1):
            for io in range(1, eta + 1):
                if Lab[al - 1] == chain[io - 1] and Lab[al] == chain[io]:
                    good[al] = io
                    if io in Dset:
                        excellent[al] = io
                    break
        if any(all(excellent.get(al) != io for al in excellent) for io in J):
            return [] if aug.mode == "det" else self.trivial()
        # build sub-instances for excellent blocks
        subs = {al: self.sub_instance(blocks[al - 1], Dset[io]) for al, io in excellent.items()}
        budgets = self.budget_options(J, Dset, subs, excellent)
        out = []
        for kz, kapz in budgets:
            if len(J) >= 2:
                aug.stats.budget_checks += 1
                assert sum(2 * kz[io] - len(Dset[io]) for io in J) <= 2 * self.k - self.lam
            fams = {}
            targets = {}
            for al, io in sorted(excellent.items()):
                g_a, P_a, zids = subs[al]
                tg = None
                if self.target is not None:
                    tg = aug.child_target(self.target, g_a, self.s, self.t, self.target.Z & zids)
                targets[al] = tg
                self.child_n += 1
                res = aug.solve(g_a, self.s, self.t, kz[io], kapz[io], P_a, tg,
                                self.path + (self.child_n,), self.call.depth)
                res = [aug.sanitize(g_a, self.s, self.t, 0, r) for r in res]
                fams[al] = res
            # equal sizes per iota by repeating the last element
            size = {io: max(len(fams[al]) for al in fams if excellent[al] == io) for io in J}
            for al in fams:
                f = fams[al]
                fams[al] = f + [f[-1]] * (size[excellent[al]] - len(f))
            for pick in product(*[range(size[io]) for io in J]):
                choice = dict(zip(J, pick))
                chosen = {al: fams[al][choice[io]] for al, io in excellent.items()}
                out.extend(self.with_children(blocks, gamma, eta, chain, J, Dset, Lab, good,
                                              excellent, subs, kz, kapz, chosen, targets))
        return out

    def budget_options(self, J, Dset, subs, excellent):
        k = self.k
        aug = self.aug
        ranges = []
        for io in J:
            d = len(Dset[io])
            ranges.append([(kk, kp) for kk in range(d, k + 1) for kp in range(d, kk + 1)])
        combos = []
        if aug.mode == "guided" and self.target is not None:
            kz, kapz = {}, {}
            for al, io in excellent.items():
                zids = subs[al][2]
                Za = self.target.Z & zids
                # the actual block for iota is the one carrying cut arcs
                if Za or io not in kz:
                    kz[io] = len(Za)
                    kapz[io] = len(Za & self.target.core)
            ok = all(io in kz and len(Dset[io]) <= kapz[io] <= kz[io] for io in J) and sum(kz.values()) <= k
            if ok:
                return [(kz, kapz)]
            aug.stats.guidance_lost += 1
        if aug.mode == "det":
            for combo in product(*ranges):
                if sum(c[0] for c in combo) <= k:
                    combos.append(({io: c[0] for io, c in zip(J, combo)},
                                   {io: c[1] for io, c in zip(J, combo)}))
            return combos
        feasible = [combo for combo in product(*ranges) if sum(c[0] for c in combo) <= k]
        if not feasible:
            return []
        combo = feasible[self.rng.randrange(len(feasible))]
        return [({io: c[0] for io, c in zip(J, combo)}, {io: c[1] for io, c in zip(J, combo)})]

    def bounds(self, block):
        """Checkpoint interval (lo, hi) covered by a block; hi = ell+1 stands for t."""
        b_lo, b_hi = block[0], block[-1]
        lo = b_lo - 1 if b_lo > 1 else 1
        hi = b_hi + self.lam if b_hi + self.lam <= self.ell else self.ell + 1
        return lo, hi

    def sub_instance(self, block, D):
        G, s, t = self.G, self.s, self.t
        b_lo, b_hi = block[0], block[-1]
        lam = self.lam
        left_cut = b_lo - 1
        right_cut = b_hi + lam
        region = set()
        for v in G.vertices:
            if v == s or v == t:
                continue
            if self.on_t_side(v, left_cut) and not self.on_t_side(v, right_cut):
                region.add(v)
        arcs = {}
        for i, a in G.arcs.items():
            if a.tail in region and a.head in region:
                arcs[i] = a
        real = set(arcs)
        P_a = []
        for i in sorted(D):
            p = self.P[i]
            if b_lo > 1:
                j0 = self.seq[left_cut - 1].pos[i]
                e = p[j0]
                arcs[e] = Arc(s, G.arcs[e].head, False)
            else:
                j0 = 0
                arcs[p[0]] = G.arcs[p[0]]
                real.add(p[0])
            if right_cut <= self.ell:
                j1 = self.seq[right_cut - 1].pos[i]
                e = p[j1]
                arcs[e] = Arc(G.arcs[e].tail, t, False)
            else:
                j1 = len(p) - 1
                arcs[p[j1]] = G.arcs[p[j1]]
                real.add(p[j1])
            P_a.append(tuple(p[j0:j1 + 1]))
        g0 = Digraph(region | {s, t}, arcs, G.next_id)
        keep = reach(g0, s) & reach(g0, t, reverse=True)
        keep |= {s, t}
        g_a = g0.induced(keep)
        real = frozenset(i for i in real if i in g_a.arcs)
        return g_a, P_a, real

    def with_children(self, blocks, gamma, eta, chain, J, Dset, Lab, good, excellent, subs,
                      kz, kapz, chosen, targets):
        aug = self.aug
        s, t = self.s, self.t
        child_lam = {}
        for al, (A_a, paths_a) in chosen.items():
            g_a = subs[al][0]
            child_lam[al] = None if _inf_path(g_a.add_arcs(A_a), s, t) is not None else len(paths_a)
        if aug.mode == "det":
            lam_opts = list(product(*[range(kapz[io], kz[io] + 1) for io in J]))
        elif aug.mode == "guided" and self.target is not None:
            guess = {}
            for al, io in excellent.items():
                if targets.get(al) is not None and (io not in guess or self.target.Z & subs[al][2]):
                    guess[io] = child_lam[al]
            vals = tuple(guess.get(io) for io in J)
            if all(v is not None and kapz[io] <= v <= kz[io] for v, io in zip(vals, J)):
                lam_opts = [vals]
            else:
                aug.stats.guidance_lost += 1
                lam_opts = [tuple(kapz[io] + self.rng.randrange(kz[io] - kapz[io] + 1) for io in J)]
        else:
            lam_opts = [tuple(kapz[io] + self.rng.randrange(kz[io] - kapz[io] + 1) for io in J)]
        out = []
        for lv in lam_opts:
            aug.tick()
            lz = dict(zip(J, lv))
            superb = {al for al, io in excellent.items() if child_lam[al] == lz[io]}
            res = self.assemble(blocks, gamma, J, Dset, good, excellent, superb, chosen, lz, subs)
            res = aug.sanitize(self.G, s, t, self.kappa, res)
            if aug.mode == "guided" and self.target is not None and aug.target_check:
                self.whitebox_final(res, excellent, chosen, targets, subs)
            out.append(res)
        return out

    def whitebox_final(self, res, excellent, chosen, targets, subs):
        from .flow_cuts import core_cut, is_compatible
        aug = self.aug
        tg = self.target
        if aug.stats.guidance_lost:
            return
        carriers = [al for al in excellent if tg.Z & subs[al][2]]
        good_children = True
        zprime = set()
        for al in carriers:
            ctg = targets.get(al)
            if ctg is None:
                good_children = False
                break
            pub = to_public(subs[al][0], chosen[al])
            if not is_compatible(subs[al][0], self.s, self.t, ctg.Z, pub.A, pub.flow):
                good_children = False
                break
            zprime |= core_cut(subs[al][0].add_arcs(pub.A), self.s, self.t, ctg.Z)
        if not good_children:
            return
        aug.stats.whitebox_checks += 1
        ga = self.G.add_arcs(res[0])
        assert self.s in ga.vertices
        assert self.t not in reach(ga, self.s, zprime), "union of child cores is not a cut of G+A"
        pub = to_public(self.G, res)
        assert is_compatible(self.G, self.s, self.t, tg.Z, pub.A, pub.flow), "large case output not compatible"

    def assemble(self, blocks, gamma, J, Dset, good, excellent, superb, chosen, lz, subs):
        lam, ell = self.lam, self.ell
        s, t = self.s, self.t
        tau = self.tau
        A = set()
        ranges = {al: self.bounds(blocks[al - 1]) for al in good}

        def add(u, v):
            if u != v:
                A.add((u, v))

        for al in good:
            lo, hi = ranges[al]
            block = blocks[al - 1]
            if al in superb:
                D = Dset[excellent[al]]
                A_a = chosen[al][0]
                lo_tails = [tau(lo, i) for i in sorted(D)] if block[0] > 1 else [s]
                hi_tails = [tau(hi, i) for i in sorted(D)] if hi <= ell else [t]
                for (x, y) in A_a:
                    xs = lo_tails if x == s else [x]
                    ys = hi_tails if y == t else [y]
                    for u in xs:
                        for v in ys:
                            add(u, v)
                for i in range(lam):
                    if i not in D:
                        add(tau(lo, i), tau(hi, i))
            else:
                for i in range(lam):
                    add(tau(lo, i), tau(hi, i))
        for a in range(1, ell + 1):
            if any(blocks[al - 1][0] <= a <= blocks[al - 1][-1] + 1 for al in good):
                continue
            for i in range(lam):
                add(tau(a, i), tau(a + 1, i))
        milestones = [a for a in range(1, ell + 1) if all(c not in gamma for c in range(a - lam + 1, a + 1))]
        for a in milestones:
            for io in J:
                for i in Dset[io]:
                    for j in Dset[io]:
                        add(tau(a, i), tau(a, j))
        # route the flow checkpoint by checkpoint
        units = []
        for io in J:
            D = sorted(Dset[io])
            for n in range(lz[io]):
                units.append([io, D[n % len(D)], []])
        starts = {ranges[al][0]: al for al in good}
        cur = 1
        while cur <= ell:
            al = starts.get(cur)
            if al is None:
                for u in units:
                    u[2].append((tau(cur, u[1]), tau(cur + 1, u[1]), None))
                cur += 1
                continue
            lo, hi = ranges[al]
            if al in superb:
                io0 = excellent[al]
                self.route_child(al, io0, lo, hi, blocks[al - 1], units, chosen[al], subs[al][0], Dset[io0])
                for u in units:
                    if u[0] != io0:
                        u[2].append((tau(lo, u[1]), tau(hi, u[1]), None))
            else:
                for u in units:
                    u[2].append((tau(lo, u[1]), tau(hi, u[1]), None))
            cur = hi
        paths = []
        for u in units:
            steps = tuple(st for st in u[2] if st[0] != st[1] or st[2] is not None)
            paths.append(_remove_cycles(steps))
        for p in paths:
            for (x, y, i) in p:
                if i is None:
                    A.add((x, y))
        return (frozenset(A), tuple(paths))

    def route_child(self, al, io0, lo, hi, block, units, child_res, g_a, D):
        s, t = self.s, self.t
        tau = self.tau
        ell = self.ell
        G = self.G
        mine = [u for u in units if u[0] == io0]
        child_paths = list(child_res[1])
        lo_proj = block[0] > 1
        hi_proj = hi <= ell
        proj_lo = {}
        proj_hi = {}
        for i in D:
            if lo_proj:
                proj_lo[self.P[i][self.seq[lo - 1].pos[i]]] = i
            if hi_proj:
                proj_hi[self.P[i][self.seq[hi - 1].pos[i]]] = i
        for u, cp in zip(mine, child_paths):
            steps = u[2]
            if cp and lo_proj:
                first = cp[0]
                need = proj_lo.get(first[2]) if first[2] is not None else None
                if need is not None and need != u[1]:
                    steps.append((tau(lo, u[1]), tau(lo, need), None))
                    u[1] = need
            for (x, y, i) in cp:
                if i is not None and i in proj_lo and lo_proj:
                    a = G.arcs[i]
                    steps.append((a.tail, a.head, i))
                elif i is not None and i in proj_hi and hi_proj:
                    u[1] = proj_hi[i]
                elif i is not None and i in G.arcs:
                    steps.append((x, y, i))
                else:
                    xx = tau(lo, u[1]) if (x == s and lo_proj) else x
                    yy = tau(hi, u[1]) if (y == t and hi_proj) else y
                    steps.append((xx, yy, None))
        return units


# ------------------------------------------------------------------ public API
def _initial_flow(G, s, t, P):
    if P is None:
        return []
    return [tuple(p) for p in P]


def augment_randomized(G: Digraph, s, t, k: int, kappa: int = 0, P=None, rng=None,
                       target=None, stats: Stats | None = None) -> AugPair:
    """One randomized augmentation.  With ``target`` (a star cut) the guesses follow it."""
    if rng is None:
        seed = 0
    elif isinstance(rng, int):
        seed = rng
    else:
        seed = rng.getrandbits(64)
    aug = Augmenter(k, "guided" if target is not None else "rand", seed)
    tg = _Target.make(G, s, t, target) if target is not None else None
    res = aug.solve(G, s, t, k, kappa, _initial_flow(G, s, t, P), tg)[0]
    res = finalize(aug, G, s, t, kappa, res)
    if stats is not None:
        _merge(stats, aug.stats)
    _merge(TOTALS, aug.stats, notes=False)
    return to_public(G, res)


def finalize(aug, G, s, t, kappa, res):
    A, paths = res
    res = (A, tuple(_remove_cycles(p) for p in paths))
    return aug.sanitize(G, s, t, kappa, res)


def augment_deterministic(G: Digraph, s, t, k: int, kappa: int = 0, P=None,
                          stats: Stats | None = None, time_limit: float | None = None) -> list:
    """The whole deterministic family; raises FamilyBudgetExceeded past ``time_limit`` seconds."""
    aug = Augmenter(k, "det", time_limit=time_limit)
    outs = aug.solve(G, s, t, k, kappa, _initial_flow(G, s, t, P))
    seen = set()
    fam = []
    for r in outs:
        r = finalize(aug, G, s, t, kappa, r)
        if r not in seen:
            seen.add(r)
            fam.append(to_public(G, r))
    if stats is not None:
        _merge(stats, aug.stats)
    _merge(TOTALS, aug.stats, notes=False)
    return fam


def _merge(dst: Stats, src: Stats, notes: bool = True):
    for name in ("calls", "checkpoints", "over_depth", "fallbacks", "sanitized", "guidance_lost", "large_cases",
                 "small_cases", "base_cases", "budget_checks", "whitebox_checks"):
        setattr(dst, name, getattr(dst, name) + getattr(src, name))
    dst.max_depth = max(dst.max_depth, src.max_depth)
    if notes:
        dst.notes.extend(src.notes)


class PreprocessOutcome(NamedTuple):
    terminal: bool
    results: list
    call: AugCall | None


def preprocess(call: AugCall, aug: Augmenter | None = None, target=None) -> PreprocessOutcome:
    """Run the normalisation steps; returns final outputs or a call with proper boundaries."""
    aug = aug or Augmenter(call.k, "det")
    G, s, t = call.G, call.s, call.t
    P, lam = aug.maximize(G, s, t, call.P, call.k)
    if lam in (INFINITE, OVER):
        return PreprocessOutcome(True, [st_pair(s, t)], None)
    if lam == 0:
        return PreprocessOutcome(True, [EMPTY] if call.kappa <= 0 else [st_pair(s, t)], None)
    kappa = max(call.kappa, lam)
    if kappa > call.k:
        return PreprocessOutcome(True, [st_pair(s, t)], None)
    an = aug.analysis(G, s, t, P)
    proper = (an.res_reach(s) == frozenset([s]) and _co_reach(an, t) == {t}
              and not any(G.arcs[i].head == t for i in G.out_arcs(s)))
    if proper:
        return PreprocessOutcome(False, [], AugCall(G, s, t, call.k, kappa, P, call.depth))
    return PreprocessOutcome(True, aug.solve(G, s, t, call.k, kappa, P, target), None)


def _proper_parts(call: AugCall, aug: Augmenter):
    an = aug.analysis(call.G, call.s, call.t, call.P)
    H = an.pattern()
    return an, H, an.sequence(H)


def base_case_selfloops(call: AugCall, aug: Augmenter | None = None, target=None) -> list:
    aug = aug or Augmenter(call.k, "det")
    an, H, _ = _proper_parts(call, aug)
    assert len(H) == len(call.P)
    return aug._base_case(call, an, target, (), aug.rng(()))


def small_ell_case(call: AugCall, aug: Augmenter | None = None, target=None) -> list:
    aug = aug or Augmenter(call.k, "det")
    an, H, seq = _proper_parts(call, aug)
    assert len(H) > len(call.P)
    return aug._small_case(call, an, H, seq, target, (), aug.rng(()))


def large_ell_case(call: AugCall, aug: Augmenter | None = None, target=None) -> list:
    aug = aug or Augmenter(call.k, "rand")
    an, H, seq = _proper_parts(call, aug)
    assert len(H) > len(call.P) and len(seq) > aug.ell_big
    return aug._large_case(call, an, H, seq, target, (), aug.rng(()))
