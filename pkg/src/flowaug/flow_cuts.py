"""Maxflow over {1, inf} capacities, residual reachability and cut predicates."""
from __future__ import annotations

from collections import deque
from typing import Iterable, NamedTuple

from .graph_core import Arc, Digraph, GraphError

INFINITE = "infinite"
OVER = ">k"


class FlowError(ValueError):
    pass


class FlowResult(NamedTuple):
    paths: list  # list of arc-id tuples
    value: object  # int, INFINITE or OVER

    @property
    def finite(self) -> bool:
        return isinstance(self.value, int)


def reach(g: Digraph, src, removed: Iterable[int] = (), reverse: bool = False) -> set:
    """Vertices reachable from src (a vertex or a collection) avoiding the removed arc ids."""
    removed = removed if isinstance(removed, (set, frozenset)) else set(removed)
    start = [src] if not isinstance(src, (set, frozenset, list, tuple)) else list(src)
    seen = set(start)
    dq = deque(start)
    arcs = g.arcs
    nbrs = g.in_arcs if reverse else g.out_arcs
    while dq:
        u = dq.popleft()
        for i in nbrs(u):
            if i in removed:
                continue
            a = arcs[i]
            w = a.tail if reverse else a.head
            if w not in seen:
                seen.add(w)
                dq.append(w)
    return seen


def _inf_path(g: Digraph, s, t):
    prev = {s: None}
    dq = deque([s])
    while dq:
        u = dq.popleft()
        for i in g.out_arcs(u):
            a = g.arcs[i]
            if a.inf and a.head not in prev:
                prev[a.head] = i
                if a.head == t:
                    path = []
                    v = t
                    while prev[v] is not None:
                        path.append(prev[v])
                        v = g.arcs[prev[v]].tail
                    return tuple(reversed(path))
                dq.append(a.head)
    return None


def _flow_counts(g: Digraph, paths) -> dict:
    f = {}
    for p in paths:
        for i in p:
            f[i] = f.get(i, 0) + 1
    return f


def _decompose(g: Digraph, s, t, f: dict, count: int) -> list:
    """Split an integral flow into simple s-t paths, dropping circulations."""
    f = dict(f)
    out = {}
    for i in sorted(f):
        if f[i] > 0:
            out.setdefault(g.arcs[i].tail, []).append(i)
    paths = []
    for _ in range(count):
        path = []
        pos = {s: 0}
        v = s
        while v != t:
            nxt = None
            for i in out.get(v, ()):
                if f[i] > 0:
                    nxt = i
                    break
            if nxt is None:
                raise FlowError("flow is not conserved")
            f[nxt] -= 1
            path.append(nxt)
            v = g.arcs[nxt].head
            if v in pos:
                # cycle: the units on it stay cancelled
                del_from = pos[v]
                for j in path[del_from:]:
                    hv = g.arcs[j].head
                    if hv in pos and pos[hv] > del_from:
                        del pos[hv]
                path = path[:del_from]
            else:
                pos[v] = len(path)
        paths.append(tuple(path))
    return paths


def _augment(g: Digraph, s, t, f: dict) -> bool:
    """One BFS augmentation in the residual network of flow f; mutates f."""
    arcs = g.arcs
    prev = {s: None}
    dq = deque([s])
    while dq:
        u = dq.popleft()
        # forward residual arcs then backward ones, both by ascending id
        cand = []
        for i in g.out_arcs(u):
            a = arcs[i]
            if a.head not in prev and a.head != u and (a.inf or f.get(i, 0) == 0):
                cand.append((i, a.head, 1))
        for i in g.in_arcs(u):
            a = arcs[i]
            if a.tail not in prev and a.tail != u and f.get(i, 0) > 0:
                cand.append((i, a.tail, -1))
        cand.sort()
        for i, w, d in cand:
            if w in prev:
                continue
            prev[w] = (i, d)
            if w == t:
                v = t
                while prev[v] is not None:
                    j, dd = prev[v]
                    f[j] = f.get(j, 0) + dd
                    v = arcs[j].tail if dd == 1 else arcs[j].head
                return True
            dq.append(w)
    return False


def max_flow(g: Digraph, s, t, k: int | None = None, initial=None) -> FlowResult:
    """Maximum s-t flow, optionally starting from a given flow and capped at k+1 units."""
    if s == t:
        raise FlowError("source and sink coincide")
    p = _inf_path(g, s, t)
    if p is not None:
        return FlowResult([p], INFINITE)
    f = _flow_counts(g, initial) if initial else {}
    value = len(initial) if initial else 0
    while k is None or value <= k:
        if not _augment(g, s, t, f):
            break
        value += 1
    paths = _decompose(g, s, t, f, value)
    if k is not None and value > k:
        return FlowResult(paths, OVER)
    return FlowResult(paths, value)


def flow_value(g: Digraph, s, t, k: int | None = None):
    return max_flow(g, s, t, k).value


def path_vertices(g: Digraph, s, path) -> list:
    vs = [s]
    for i in path:
        vs.append(g.arcs[i].head)
    return vs


def is_flow(g: Digraph, s, t, paths) -> bool:
    """Paths are s-t walks in g and no unit arc is used twice overall."""
    used = set()
    for p in paths:
        v = s
        for i in p:
            a = g.arcs.get(i)
            if a is None or a.tail != v:
                return False
            if not a.inf:
                if i in used:
                    return False
                used.add(i)
            v = a.head
        if v != t or (not p and s != t):
            return False
    return True


def residual_adj(g: Digraph, paths) -> dict:
    """Adjacency sets of the residual network (unit flow arcs reversed)."""
    onflow = set()
    for p in paths:
        onflow.update(p)
    adj = {v: set() for v in g.vertices}
    for i, a in g.arcs.items():
        if a.tail == a.head:
            continue
        if i in onflow:
            adj[a.head].add(a.tail)
            if a.inf:
                adj[a.tail].add(a.head)
        else:
            adj[a.tail].add(a.head)
    return adj


def adj_reach(adj: dict, src) -> set:
    start = [src] if not isinstance(src, (set, frozenset, list, tuple)) else list(src)
    seen = set(start)
    stack = list(start)
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def reverse_adj(adj: dict) -> dict:
    radj = {v: set() for v in adj}
    for u, ws in adj.items():
        for w in ws:
            radj[w].add(u)
    return radj


def residual(g: Digraph, paths) -> Digraph:
    """Flow arcs reversed; unit reversals keep their id, infinite ones get a fresh reverse arc."""
    onflow = set()
    for p in paths:
        onflow.update(p)
    arcs = {}
    nid = g.next_id
    extra = []
    for i, a in g.arcs.items():
        if i in onflow:
            if a.inf:
                arcs[i] = a
                extra.append(Arc(a.head, a.tail, False))
            else:
                arcs[i] = Arc(a.head, a.tail, False)
        else:
            arcs[i] = a
    for a in extra:
        arcs[nid] = a
        nid += 1
    return Digraph(g.vertices, arcs, nid)


def residual_of(g: Digraph, s, t, paths) -> Digraph:
    """Residual network after checking that paths form a flow."""
    if not is_flow(g, s, t, paths):
        raise FlowError("not a flow in the given graph")
    return residual(g, paths)


def delta_out(g: Digraph, X) -> frozenset:
    return frozenset(i for i, a in g.arcs.items() if a.tail in X and a.head not in X)


def delta_in(g: Digraph, X) -> frozenset:
    return frozenset(i for i, a in g.arcs.items() if a.head in X and a.tail not in X)


def closest_sides(g: Digraph, s, t, paths):
    """(s-side of the closest-to-s mincut, t-side of the closest-to-t mincut) for a maxflow."""
    adj = residual_adj(g, paths)
    S = adj_reach(adj, s)
    T = adj_reach(reverse_adj(adj), t)
    return S, T


def mincut_closest(g: Digraph, s, t, side: str = "s") -> frozenset:
    res = max_flow(g, s, t)
    if res.value == INFINITE:
        raise FlowError("no st-cut exists")
    S, T = closest_sides(g, s, t, res.paths)
    if side == "s":
        return delta_out(g, S)
    if side == "t":
        return delta_in(g, T)
    raise ValueError("side must be 's' or 't'")


def _check_unit(g: Digraph, Z):
    for i in Z:
        a = g.arcs.get(i)
        if a is None:
            raise GraphError(f"arc {i} not in graph")
        if a.inf:
            raise GraphError(f"arc {i} has infinite capacity and cannot be cut")


def is_st_cut(g: Digraph, s, t, Z) -> bool:
    return t not in reach(g, s, set(Z))


def is_star_cut(g: Digraph, s, t, Z) -> bool:
    Z = set(Z)
    _check_unit(g, Z)
    R = reach(g, s, Z)
    if t in R:
        return False
    return all(g.arcs[i].tail in R and g.arcs[i].head not in R for i in Z)


def core_cut(g: Digraph, s, t, Z) -> frozenset:
    Z = set(Z)
    if not is_star_cut(g, s, t, Z):
        raise GraphError("not a star st-cut")
    T = reach(g, t, Z, reverse=True)
    return frozenset(i for i in Z if g.arcs[i].head in T)


def is_minimal_cut(g: Digraph, s, t, Z) -> bool:
    Z = set(Z)
    if not is_st_cut(g, s, t, Z):
        return False
    return all(not is_st_cut(g, s, t, Z - {i}) for i in Z)


def is_maxflow(g: Digraph, s, t, paths) -> bool:
    """Valid flow with no augmenting path (or an all-infinite path when the value is unbounded)."""
    if not is_flow(g, s, t, paths):
        return False
    if _inf_path(g, s, t) is not None:
        return len(paths) >= 1 and any(all(g.arcs[i].inf for i in p) for p in paths)
    f = _flow_counts(g, paths)
    return not _augment(g, s, t, f)


def aug_graph(g: Digraph, A) -> tuple[Digraph, dict]:
    """G+A together with the id given to each added pair."""
    ids = g.pair_ids(A)
    return g.add_arcs(A), ids


def is_compatible(g: Digraph, s, t, Z, A, paths) -> bool:
    """Compatibility of (A, paths) with the star cut Z; paths live in G+A with ids from add_arcs."""
    Z = set(Z)
    if not is_star_cut(g, s, t, Z):
        return False
    S = reach(g, s, Z)
    for u, v in A:
        if u in S and v not in S:
            return False
    ga = g.add_arcs(A)
    core = core_cut(ga, s, t, Z)
    if not is_flow(ga, s, t, paths) or len(paths) != len(core):
        return False
    lam = flow_value(ga, s, t, len(core))
    if lam != len(core):
        return False
    for p in paths:
        hit = [i for i in p if i in Z]
        if len(hit) != 1 or hit[0] not in core:
            return False
    return True


def _scc_ids(adj: dict) -> dict:
    """Tarjan's algorithm, iterative; returns vertex -> component id."""
    index = {}
    low = {}
    comp = {}
    stack = []
    onstack = set()
    counter = 0
    ncomp = 0
    for root in adj:
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in onstack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


def bottleneck_arcs(g: Digraph, s, t, paths=None) -> frozenset:
    """Unit arcs lying on at least one st-mincut (empty when no finite cut exists)."""
    if paths is None:
        res = max_flow(g, s, t)
        if res.value == INFINITE:
            return frozenset()
        paths = res.paths
    adj = residual_adj(g, paths)
    comp = _scc_ids(adj)
    onflow = set()
    for p in paths:
        onflow.update(p)
    # an arc on the flow with both ends in one residual SCC can be re-routed around
    out = set()
    for i in onflow:
        a = g.arcs[i]
        if not a.inf and comp[a.tail] != comp[a.head]:
            out.add(i)
    return frozenset(out)
