"""Cut problems solved through deterministic flow-augmentation.

Weighted st-Cut, Weighted Bundled Cut with pairwise linked deletable arcs (and its
chain special case), Weighted Skew Multicut via bundles, and weighted directed
feedback arc / vertex set via iterative compression.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from itertools import combinations, permutations, product

from .augment import augment_deterministic
from .derandom import splitter_functions
from .flow_cuts import INFINITE, max_flow, reach
from .graph_core import Arc, Digraph

log = logging.getLogger(__name__)

NO = "no"
INT64_MAX = 2 ** 63 - 1


class SolverError(ValueError):
    pass


def _checked_sum(values) -> int:
    total = 0
    for v in values:
        total += v
        if total > INT64_MAX:
            raise OverflowError("weight sum exceeds 64-bit range")
    return total


@dataclass
class CutAnswer:
    weight: int
    arcs: frozenset
    bundles: frozenset = frozenset()


# ------------------------------------------------------------ weighted mincut
def _capacity_flow(vertices, arcs, s, t):
    """Edmonds-Karp on (tail, head, capacity) triples; returns the source side of a min cut."""
    cap = {}
    adj = {v: set() for v in vertices}
    for (u, v, c) in arcs:
        if u == v:
            continue
        cap[(u, v)] = cap.get((u, v), 0) + c
        cap.setdefault((v, u), 0)
        adj[u].add(v)
        adj[v].add(u)
    nbrs = {v: sorted(ws) for v, ws in adj.items()}
    while True:
        par = {s: None}
        q = deque([s])
        while q and t not in par:
            u = q.popleft()
            for w in nbrs[u]:
                if w not in par and cap[(u, w)] > 0:
                    par[w] = u
                    q.append(w)
        if t not in par:
            return set(par)
        push = None
        v = t
        while par[v] is not None:
            c = cap[(par[v], v)]
            push = c if push is None else min(push, c)
            v = par[v]
        v = t
        while par[v] is not None:
            u = par[v]
            cap[(u, v)] -= push
            cap[(v, u)] += push
            v = u


def min_weight_mincut(g: Digraph, weights: dict, s, t) -> frozenset:
    """Minimum-cardinality st-cut of minimum weight among those (ties: closest to s)."""
    unit = [i for i, a in g.arcs.items() if not a.inf]
    for i in unit:
        if weights.get(i, 0) <= 0:
            raise SolverError(f"arc {i} needs a positive integer weight")
    M = 1 + _checked_sum(weights[i] for i in unit)
    finite = _checked_sum(weights[i] + M for i in unit)
    big = finite + 1
    if big > INT64_MAX:
        raise OverflowError("capacities exceed 64-bit range")
    triples = [(a.tail, a.head, big if a.inf else weights[i] + M) for i, a in g.arcs.items()]
    S = _capacity_flow(g.vertices, triples, s, t)
    if t in S:
        raise SolverError("no finite st-cut")
    cut = frozenset(i for i, a in g.arcs.items() if a.tail in S and a.head not in S)
    if any(g.arcs[i].inf for i in cut):
        raise SolverError("no finite st-cut")
    return cut


def is_st_cut(g: Digraph, s, t, Z) -> bool:
    return t not in reach(g, s, Z)


def solve_weighted_st_cut(g: Digraph, weights: dict, s, t, k: int, W: int):
    """Lightest st-cut with at most k arcs and weight at most W, or NO."""
    best = None
    for pair in augment_deterministic(g, s, t, k, 0):
        ga = g.add_arcs(pair.A)
        fr = max_flow(ga, s, t, k)
        if fr.value == INFINITE or not isinstance(fr.value, int) or fr.value > k:
            continue
        if fr.value == 0:
            return CutAnswer(0, frozenset())
        Y = min_weight_mincut(ga, weights, s, t)
        w = sum(weights[i] for i in Y)
        if best is None or (w, sorted(Y)) < (best.weight, sorted(best.arcs)):
            best = CutAnswer(w, Y)
    if best is None or best.weight > W:
        return NO
    assert len(best.arcs) <= k and is_st_cut(g, s, t, best.arcs)
    return best


# --------------------------------------------------------------- bundled cut
@dataclass
class BundledInstance:
    graph: Digraph
    s: int
    t: int
    k: int
    bundles: list  # lists of arc ids, pairwise disjoint
    weights: list  # one positive weight per bundle
    W: int

    def bundle_of(self) -> dict:
        out = {}
        for b, arcs in enumerate(self.bundles):
            for i in arcs:
                if i in out:
                    raise SolverError(f"arc {i} lies in two bundles")
                out[i] = b
        return out

    def deletable(self) -> set:
        g = self.graph
        owner = self.bundle_of()
        crisp_pairs = {(a.tail, a.head) for i, a in g.arcs.items() if i not in owner or a.inf}
        return {i for i in owner if not g.arcs[i].inf and (g.arcs[i].tail, g.arcs[i].head) not in crisp_pairs}


def _reach_within(g: Digraph, sources, allowed) -> set:
    adj = {}
    for i in allowed:
        a = g.arcs[i]
        adj.setdefault(a.tail, []).append(a.head)
    seen = set(sources)
    stack = list(sources)
    while stack:
        u = stack.pop()
        for w in adj.get(u, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def check_pairwise_linked(inst: BundledInstance):
    """Raise naming the first bundle whose deletable arcs are not pairwise linked."""
    g = inst.graph
    dele = inst.deletable()
    undeletable = [i for i in g.arcs if i not in dele]
    for b, arcs in enumerate(inst.bundles):
        mine = [i for i in arcs if i in dele]
        allowed = set(arcs) | set(undeletable)
        for e1, e2 in combinations(mine, 2):
            a1, a2 = g.arcs[e1], g.arcs[e2]
            R1 = _reach_within(g, [a1.tail, a1.head], allowed)
            R2 = _reach_within(g, [a2.tail, a2.head], allowed)
            if not ({a2.tail, a2.head} & R1 or {a1.tail, a1.head} & R2):
                raise SolverError(f"bundle {b} does not have pairwise linked deletable arcs")


def _cut_weight(inst, Z):
    owner = inst.bundle_of()
    touched = {owner[i] for i in Z}
    return touched, sum(inst.weights[b] for b in touched)


def validate_bundled(inst: BundledInstance, Z) -> bool:
    owner = inst.bundle_of()
    if any(i not in owner for i in Z):
        return False
    if not is_st_cut(inst.graph, inst.s, inst.t, Z):
        return False
    touched, w = _cut_weight(inst, Z)
    return len(touched) <= inst.k and w <= inst.W


def solve_bundled_cut(inst: BundledInstance, stats: dict | None = None):
    """Lightest cut touching at most k bundles with weight at most W, or NO."""
    check_pairwise_linked(inst)
    for w in inst.weights:
        if w <= 0:
            raise SolverError("bundle weights must be positive")
    g, s, t = inst.graph, inst.s, inst.t
    owner = inst.bundle_of()
    dele = inst.deletable()
    # only deletable arcs may be cut: everything else behaves like an infinite arc
    work = Digraph(g.vertices, {i: (a if i in dele else Arc(a.tail, a.head, True)) for i, a in g.arcs.items()},
                   g.next_id)
    d = max([sum(1 for i in b if i in dele) for b in inst.bundles] + [0])
    K = inst.k * d
    fr = max_flow(work, s, t)
    if fr.value == 0:
        return CutAnswer(0, frozenset(), frozenset())
    if fr.value == INFINITE or K == 0:
        return NO
    best = None
    seen_graphs = set()
    for pair in augment_deterministic(work, s, t, K, 0):
        ga = work.add_arcs(pair.A)
        key = ga.key()
        if key in seen_graphs:
            continue
        seen_graphs.add(key)
        fr = max_flow(ga, s, t, K)
        if not isinstance(fr.value, int) or fr.value == INFINITE or fr.value > K:
            continue
        for ans in _bundled_on_mincut(inst, ga, fr.paths, owner, dele, stats):
            if best is None or (ans.weight, sorted(ans.bundles)) < (best.weight, sorted(best.bundles)):
                best = ans
    if best is None or best.weight > inst.W:
        return NO
    assert validate_bundled(inst, best.arcs)
    return best


def _bundled_on_mincut(inst, ga: Digraph, paths, owner, dele, stats):
    """Search cuts that are minimum in ga; yields validated answers."""
    lam = len(paths)
    pos = [{e: j for j, e in enumerate(p)} for p in paths]
    nb = len(inst.bundles)
    # candidate arcs of bundle b on path i
    cand = {}
    for b in range(nb):
        for i in range(lam):
            c = sorted(e for e in inst.bundles[b] if e in dele and e in pos[i])
            if c:
                cand[(b, i)] = c
    for kappa in range(1, min(inst.k, lam) + 1):
        colourings = splitter_functions(range(nb), range(kappa), kappa)
        for alpha in product(range(kappa), repeat=lam):
            if len(set(alpha)) != kappa:
                continue
            for gamma in colourings:
                pairs = sorted((b, i) for b in range(nb) for i in range(lam) if alpha[i] == gamma[b])
                # bundles missing a candidate for some required path are discarded
                alive = {b for b in range(nb)
                         if all((b, i) in cand for i in range(lam) if alpha[i] == gamma[b])}
                multi = [p for p in pairs if p[0] in alive and len(cand[p]) > 1]
                if multi:
                    width = max(len(cand[p]) for p in multi)
                    selections = splitter_functions(multi, range(width), lam)
                else:
                    selections = [{}]
                for sel in selections:
                    e_of = {}
                    ok_b = set(alive)
                    for p in pairs:
                        if p[0] not in ok_b:
                            continue
                        c = cand[p]
                        idx = sel.get(p, 0)
                        if idx >= len(c):
                            ok_b.discard(p[0])
                            continue
                        e_of[p] = c[idx]
                    yield from _bundled_relations(inst, ga, paths, pos, owner, kappa, alpha, gamma,
                                                  ok_b, e_of, stats)


RELATIONS = ("tail1", "tail2", "head1", "head2", "fwd", "bwd")


def _bundled_relations(inst, ga, paths, pos, owner, kappa, alpha, gamma, alive, e_of, stats):
    s, t = inst.s, inst.t
    lam = len(paths)
    groups = {j: [i for i in range(lam) if alpha[i] == j] for j in range(kappa)}
    # arcs outside every other bundle, for the linkage relation of bundle b
    other_cache = {}

    def linked(b, e1, e2) -> bool:
        if b not in other_cache:
            other_cache[b] = [i for i in ga.arcs if owner.get(i, b) == b]
        allowed = other_cache[b]
        a1, a2 = ga.arcs[e1], ga.arcs[e2]
        R = _reach_within(ga, [a1.tail, a1.head], allowed)
        return bool({a2.tail, a2.head} & R)

    def complies(b, i1, i2, r) -> bool:
        f1, f2 = e_of[(b, i1)], e_of[(b, i2)]
        if r == "tail1":
            return ga.arcs[f1].tail == s
        if r == "tail2":
            return ga.arcs[f2].tail == s
        if r == "head1":
            return ga.arcs[f1].head == t
        if r == "head2":
            return ga.arcs[f2].head == t
        if r == "fwd":
            return linked(b, f1, f2)
        return linked(b, f2, f1)

    def survivors(members, i1, i2, r) -> frozenset:
        # a bypass through a complying bundle rules out every bundle it overtakes
        keep = {b for b in members if complies(b, i1, i2, r)}
        drop = set()
        if r in ("fwd", "bwd"):
            for b in keep:
                for b2 in keep:
                    if (b != b2 and pos[i1][e_of[(b, i1)]] < pos[i1][e_of[(b2, i1)]]
                            and pos[i2][e_of[(b, i2)]] > pos[i2][e_of[(b2, i2)]]):
                        drop.add(b2 if r == "fwd" else b)
        if stats is not None:
            stats["filtered"] = stats.get("filtered", 0) + len(drop)
        return frozenset(keep - drop)

    per_j = []
    for j in range(kappa):
        members = frozenset(b for b in alive if gamma[b] == j)
        idx = groups[j]
        states = {members}
        for (i1, i2) in combinations(idx, 2):
            options = {survivors(members, i1, i2, r) for r in RELATIONS}
            states = {st & o for st in states for o in options}
            states.discard(frozenset())
        outcomes = []
        for keep in sorted(states, key=sorted):
            if not keep:
                continue
            order = sorted(keep, key=lambda b: pos[idx[0]][e_of[(b, idx[0])]])
            if all(pos[i][e_of[(x, i)]] < pos[i][e_of[(y, i)]]
                   for i in idx for x, y in zip(order, order[1:])):
                outcomes.append(tuple(order))
        if not outcomes:
            return
        per_j.append(outcomes)
    if stats is not None:
        stats["aux_graphs"] = stats.get("aux_graphs", 0) + 1
    for orders in product(*per_j):
        ans = _aux_cut(inst, ga, paths, alpha, orders, e_of)
        if ans is not None:
            yield ans


def _aux_cut(inst, ga, paths, alpha, orders, e_of):
    """Build the auxiliary path graph, take its lightest kappa-arc cut and lift it."""
    s, t = inst.s, inst.t
    kappa = len(orders)
    lam = len(paths)
    # vertex (j, a) sits after the a-th arc of the j-th path; (j, 0) is s, (j, n_j) is t
    S, T = ("s",), ("t",)

    def node(j, a):
        n = len(orders[j])
        return S if a == 0 else T if a == n else (j, a)

    selected = {e_of[(b, i)] for j in range(kappa) for b in orders[j] for i in range(lam) if alpha[i] == j}
    crisp = [i for i in ga.arcs if i not in selected]
    verts = {S, T}
    arcs = []
    weights = {}
    for j in range(kappa):
        for a, b in enumerate(orders[j], start=1):
            verts.add(node(j, a))
            weights[len(arcs)] = inst.weights[b]
            arcs.append((node(j, a - 1), node(j, a), False))
    reach_cache = {}
    ends = []
    for i1 in range(lam):
        j1 = alpha[i1]
        for a1, b1 in enumerate(orders[j1], start=1):
            e1 = ga.arcs[e_of[(b1, i1)]]
            ends.append((e1.tail, node(j1, a1 - 1)))
            ends.append((e1.head, node(j1, a1)))
    for (u1, h1) in ends:
        if u1 not in reach_cache:
            reach_cache[u1] = _reach_within(ga, [u1], crisp)
        R = reach_cache[u1]
        for (u2, h2) in ends:
            if u2 in R and h1 != h2:
                arcs.append((h1, h2, True))
    index = {v: n for n, v in enumerate(sorted(verts, key=repr))}
    H = Digraph.build(len(index), [(index[u], index[v], inf) for (u, v, inf) in arcs])
    fr = max_flow(H, index[S], index[T], kappa)
    if fr.value != kappa:
        return None
    Y = min_weight_mincut(H, weights, index[S], index[T])
    if len(Y) != kappa:
        return None
    chosen = {}
    # recover (j, a) of each cut arc from its position in the arc list
    pos_of = {}
    n = 0
    for j in range(kappa):
        for a in range(1, len(orders[j]) + 1):
            pos_of[n] = (j, a)
            n += 1
    for e in Y:
        j, a = pos_of[e]
        chosen[j] = orders[j][a - 1]
    if len(chosen) != kappa:
        return None
    Z = frozenset(e_of[(chosen[alpha[i]], i)] for i in range(lam))
    if not is_st_cut(inst.graph, s, t, Z):
        return None
    touched, w = _cut_weight(inst, Z)
    return CutAnswer(w, Z, frozenset(touched))


# ------------------------------------------------------------------ chain SAT
def solve_chain_sat(graph: Digraph, s, t, ell: int, chains, weights, k: int, W: int):
    """Bundled cut where every bundle is a directed path of at most ell arcs."""
    for c, arcs in enumerate(chains):
        if not arcs or len(arcs) > ell:
            raise SolverError(f"chain {c} must have between 1 and {ell} arcs")
        for x, y in zip(arcs, arcs[1:]):
            if graph.arcs[x].head != graph.arcs[y].tail:
                raise SolverError(f"chain {c} is not a directed path")
    return solve_bundled_cut(BundledInstance(graph, s, t, k, [list(c) for c in chains], list(weights), W))


# -------------------------------------------------------------- skew multicut
@dataclass
class SkewInstance:
    graph: Digraph
    pairs: list  # (s_i, t_i)
    weights: dict  # arc id -> weight; arcs without a weight cannot be deleted
    k: int
    W: int


@dataclass
class SkewReduction:
    bundled: BundledInstance
    bundle_arc: list  # original arc id per bundle


def reduce_skew_to_bundled(inst: SkewInstance) -> SkewReduction:
    g = inst.graph
    b = len(inst.pairs)
    if b < 1:
        raise SolverError("skew multicut needs at least one terminal pair")
    verts = sorted(g.vertices)
    n = max(verts) + 1 if verts else 0
    copy = lambda v, i: i * n + v
    s, t = b * n, b * n + 1
    arc_list = []
    per_arc = {}
    for i in range(b):
        for e in sorted(g.arcs):
            a = g.arcs[e]
            per_arc.setdefault(e, []).append(len(arc_list))
            arc_list.append((copy(a.tail, i), copy(a.head, i), a.inf))
    for v in verts:
        for i in range(b):
            for j in range(i + 1, b):
                arc_list.append((copy(v, i), copy(v, j), True))
    for i, (si, ti) in enumerate(inst.pairs):
        arc_list.append((s, copy(si, i), True))
        arc_list.append((copy(ti, i), t, True))
    G2 = Digraph.build([copy(v, i) for i in range(b) for v in verts] + [s, t], arc_list)
    bundles, weights, origin = [], [], []
    for e in sorted(g.arcs):
        if e in inst.weights and not g.arcs[e].inf:
            bundles.append(per_arc[e])
            weights.append(inst.weights[e])
            origin.append(e)
    bundled = BundledInstance(G2, s, t, inst.k, bundles, weights, inst.W)
    dele = bundled.deletable()
    assert all(sum(1 for x in bd if x in dele) <= b for bd in bundles)
    return SkewReduction(bundled, origin)


def validate_skew(inst: SkewInstance, Z) -> bool:
    g = inst.graph
    if len(Z) > inst.k or any(e not in inst.weights for e in Z):
        return False
    if sum(inst.weights[e] for e in Z) > inst.W:
        return False
    for i, (si, _) in enumerate(inst.pairs):
        R = reach(g, si, Z)
        if any(tj in R for (_, tj) in inst.pairs[i:]):
            return False
    return True


def solve_skew_multicut(inst: SkewInstance):
    red = reduce_skew_to_bundled(inst)
    ans = solve_bundled_cut(red.bundled)
    if ans == NO:
        return NO
    Z = frozenset(red.bundle_arc[b] for b in ans.bundles)
    w = sum(inst.weights[e] for e in Z)
    assert validate_skew(inst, Z)
    return CutAnswer(w, Z)


# ------------------------------------------------------------------------ DFAS
def _is_acyclic(g: Digraph, removed=frozenset()) -> bool:
    indeg = {v: 0 for v in g.vertices}
    out = {v: [] for v in g.vertices}
    for i, a in g.arcs.items():
        if i in removed:
            continue
        if a.tail == a.head:
            return False
        out[a.tail].append(a.head)
        indeg[a.head] += 1
    q = deque(v for v in g.vertices if indeg[v] == 0)
    seen = 0
    while q:
        u = q.popleft()
        seen += 1
        for w in out[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                q.append(w)
    return seen == len(g.vertices)


def _compress(g: Digraph, weights: dict, X: list, k: int, W: int | None):
    """Feedback arc set of size <= k (and weight <= W) given a feedback arc set X.

    With W=None any small enough set is returned as soon as one is found; otherwise
    the lightest one is returned.  Arcs of X that stay are ordered and turned into
    terminal pairs of a skew multicut instance on g - X.
    """
    best = None
    deletable_X = [e for e in X if e in weights]
    rest = g.delete_arcs(X)
    sub_w = {e: weights[e] for e in rest.arcs if e in weights}
    total = _checked_sum(sub_w.values()) + 1
    for r in range(min(len(deletable_X), k) + 1):
        for gone in combinations(deletable_X, r):
            gone = frozenset(gone)
            w_gone = sum(weights[e] for e in gone)
            limit = total if W is None else W
            if best is not None:
                limit = min(limit, best.weight - 1)
            if w_gone > limit:
                continue
            kept = [e for e in X if e not in gone]
            if any(g.arcs[e].head == g.arcs[e].tail for e in kept):
                continue
            if not kept:
                best = CutAnswer(w_gone, gone)
                if W is None:
                    return best
                continue
            for order in permutations(kept):
                if best is not None:
                    limit = min(limit, best.weight - 1)
                if w_gone > limit:
                    break
                pairs = [(g.arcs[e].head, g.arcs[e].tail) for e in order]
                inst = SkewInstance(rest, pairs, sub_w, k - r, limit - w_gone)
                ans = solve_skew_multicut(inst)
                if ans == NO:
                    continue
                best = CutAnswer(w_gone + ans.weight, gone | ans.arcs)
                if W is None:
                    return best
    return best


def solve_wdfas(g: Digraph, weights: dict, k: int, W: int):
    """Lightest arc set (at most k arcs, weight at most W) whose removal leaves g acyclic, or NO.

    Arcs missing from ``weights`` are crisp and never deleted.
    """
    # crisp arcs first: if they alone close a cycle nothing can be done
    order = sorted(g.arcs, key=lambda e: (e in weights, e))
    X = []
    built = Digraph(g.vertices, {}, g.next_id)
    for e in order:
        built = Digraph(g.vertices, {**built.arcs, e: g.arcs[e]}, g.next_id)
        if _is_acyclic(built, frozenset(X)):
            continue
        if e not in weights:
            return NO
        X.append(e)
        if len(X) <= k:
            continue
        ans = _compress(built, weights, X, k, None)
        if ans is None:
            return NO
        X = sorted(ans.arcs)
    if not X:
        return CutAnswer(0, frozenset())
    ans = _compress(g, weights, X, k, W)
    if ans is None or ans.weight > W:
        return NO
    assert _is_acyclic(g, ans.arcs) and len(ans.arcs) <= k
    return ans


def solve_wdfvs(g: Digraph, vertex_weights: dict, k: int, W: int):
    """Lightest vertex set (at most k, weight at most W) hitting every cycle, or NO."""
    verts = sorted(g.vertices)
    n = max(verts) + 1 if verts else 0
    arc_list = []
    inner = {}
    for v in verts:
        inner[len(arc_list)] = v
        arc_list.append((v, n + v, False))
    for a in g.arcs.values():
        arc_list.append((n + a.tail, a.head, True))
    split = Digraph.build(list(verts) + [n + v for v in verts], arc_list)
    weights = {e: vertex_weights[v] for e, v in inner.items()}
    ans = solve_wdfas(split, weights, k, W)
    if ans == NO:
        return NO
    X = frozenset(inner[e] for e in ans.arcs)
    return CutAnswer(sum(vertex_weights[v] for v in X), X)
