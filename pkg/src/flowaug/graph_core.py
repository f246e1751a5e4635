"""Directed multigraphs whose arcs have capacity 1 or infinity.

Graphs are treated as immutable values: every operation returns a new
graph and arc ids survive additions, deletions and contractions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple


class GraphError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class Arc(NamedTuple):
    tail: int
    head: int
    inf: bool = False


class Digraph:
    """Multigraph over integer vertices with arcs indexed by stable ids."""

    __slots__ = ("vertices", "arcs", "next_id", "_out", "_in", "_inc", "_key")

    def __init__(self, vertices: Iterable[int], arcs: dict[int, Arc], next_id: int | None = None):
        self.vertices = frozenset(vertices)
        self.arcs = arcs
        if next_id is None:
            next_id = max(arcs) + 1 if arcs else 0
        self.next_id = next_id
        self._out = None
        self._in = None
        self._inc = None
        self._key = None

    @classmethod
    def build(cls, n_or_vertices, arc_list) -> "Digraph":
        """Build from a vertex count (or iterable) and (tail, head[, inf]) tuples; ids follow list order."""
        verts = range(n_or_vertices) if isinstance(n_or_vertices, int) else n_or_vertices
        arcs = {}
        for i, a in enumerate(arc_list):
            arcs[i] = Arc(a[0], a[1], bool(a[2]) if len(a) > 2 else False)
        g = cls(verts, arcs, len(arcs))
        for a in arcs.values():
            if a.tail not in g.vertices or a.head not in g.vertices:
                raise GraphError(f"arc {a} references an unknown vertex")
        return g

    # adjacency, built lazily and cached since the graph never changes
    def _adj(self):
        out = {v: [] for v in self.vertices}
        inn = {v: [] for v in self.vertices}
        for i in sorted(self.arcs):
            a = self.arcs[i]
            out[a.tail].append(i)
            inn[a.head].append(i)
        self._out, self._in = out, inn

    def out_arcs(self, v: int) -> list[int]:
        if self._out is None:
            self._adj()
        return self._out[v]

    def in_arcs(self, v: int) -> list[int]:
        if self._in is None:
            self._adj()
        return self._in[v]

    def incident(self, v: int) -> list[int]:
        """Ids of non-loop arcs touching v, ascending."""
        if self._inc is None:
            inc = {u: [] for u in self.vertices}
            for i in sorted(self.arcs):
                a = self.arcs[i]
                if a.tail != a.head:
                    inc[a.tail].append(i)
                    inc[a.head].append(i)
            self._inc = inc
        return self._inc[v]

    def unit_arcs(self) -> list[int]:
        return sorted(i for i, a in self.arcs.items() if not a.inf)

    def key(self):
        if self._key is None:
            self._key = (tuple(sorted(self.vertices)), tuple(sorted(self.arcs.items())))
        return self._key

    def __eq__(self, other):
        return isinstance(other, Digraph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Digraph(n={len(self.vertices)}, arcs={dict(sorted(self.arcs.items()))})"

    def same_structure(self, other: "Digraph") -> bool:
        """Equality up to arc ids: same vertices and the same multiset of arcs."""
        return self.vertices == other.vertices and sorted(self.arcs.values()) == sorted(other.arcs.values())

    def pair_ids(self, pairs: Iterable[tuple[int, int]]) -> dict:
        """Ids that add_arcs would give to the given pairs."""
        return {p: self.next_id + i for i, p in enumerate(sorted(set(pairs)))}

    def add_arcs(self, pairs: Iterable[tuple[int, int]]) -> "Digraph":
        pairs = sorted(set(pairs))
        if not pairs:
            return self
        arcs = dict(self.arcs)
        nid = self.next_id
        for u, v in pairs:
            if u not in self.vertices or v not in self.vertices:
                raise GraphError(f"pair {(u, v)} references an unknown vertex")
            arcs[nid] = Arc(u, v, True)
            nid += 1
        return Digraph(self.vertices, arcs, nid)

    def add_unit_arcs(self, pairs) -> "Digraph":
        arcs = dict(self.arcs)
        nid = self.next_id
        for u, v in pairs:
            arcs[nid] = Arc(u, v, False)
            nid += 1
        return Digraph(self.vertices, arcs, nid)

    def delete_arcs(self, ids: Iterable[int]) -> "Digraph":
        ids = set(ids)
        arcs = {i: a for i, a in self.arcs.items() if i not in ids}
        return Digraph(self.vertices, arcs, self.next_id)

    def induced(self, keep: Iterable[int]) -> "Digraph":
        keep = frozenset(keep)
        arcs = {i: a for i, a in self.arcs.items() if a.tail in keep and a.head in keep}
        return Digraph(keep, arcs, self.next_id)

    def contract(self, X: Iterable[int], target: int, avoid: int | None = None) -> tuple["Digraph", dict]:
        X = frozenset(X)
        if target not in X:
            raise GraphError("contraction target must lie in the contracted set")
        if avoid is not None and avoid in X:
            raise GraphError("contracted set contains the opposite terminal")
        vmap = {v: (target if v in X else v) for v in self.vertices}
        arcs = {}
        for i, a in self.arcs.items():
            tin, hin = a.tail in X, a.head in X
            if tin and hin:
                continue
            if tin or hin:
                a = Arc(vmap[a.tail], vmap[a.head], a.inf)
            arcs[i] = a
        verts = (self.vertices - X) | {target}
        return Digraph(verts, arcs, self.next_id), vmap


def add_arcs(g: Digraph, pairs) -> Digraph:
    return g.add_arcs(pairs)


def contract(g: Digraph, X, target: int, avoid: int | None = None) -> tuple[Digraph, dict]:
    return g.contract(X, target, avoid)


@dataclass
class Instance:
    """A graph with terminals plus the optional bundled-cut extension fields."""

    graph: Digraph
    s: int
    t: int
    k: int | None = None
    W: int | None = None
    bundles: list = field(default_factory=list)  # (weight, [arc ids])
    vertex_weights: dict = field(default_factory=dict)
    pairs: list = field(default_factory=list)  # terminal pairs for skew multicut

    def structurally_equal(self, other: "Instance") -> bool:
        return (self.graph == other.graph and self.s == other.s and self.t == other.t
                and self.k == other.k and self.W == other.W
                and [(w, sorted(b)) for w, b in self.bundles] == [(w, sorted(b)) for w, b in other.bundles]
                and self.vertex_weights == other.vertex_weights and self.pairs == other.pairs)


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(lineno, f"expected integer {what}, got {tok!r}") from None


def parse_instance(text: str) -> Instance:
    n = m = None
    s = t = None
    k = W = None
    arc_list = []
    bundles = []
    vweights = {}
    pairs = []
    p_line = 0

    def vertex(tok, lineno):
        v = _int(tok, lineno, "vertex")
        if n is None:
            raise ParseError(lineno, "vertex used before the 'p' line")
        if not 0 <= v < n:
            raise ParseError(lineno, f"vertex {v} out of range 0..{n - 1}")
        return v

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        if kind == "p":
            if n is not None:
                raise ParseError(lineno, "duplicate 'p' line")
            if len(tok) != 4 or tok[1] != "faug":
                raise ParseError(lineno, "expected 'p faug <n> <m>'")
            n, m = _int(tok[2], lineno, "n"), _int(tok[3], lineno, "m")
            if n < 0 or m < 0:
                raise ParseError(lineno, "negative size")
            p_line = lineno
        elif kind in ("s", "t"):
            if len(tok) != 2:
                raise ParseError(lineno, f"expected '{kind} <id>'")
            v = vertex(tok[1], lineno)
            if kind == "s":
                if s is not None:
                    raise ParseError(lineno, "duplicate s declaration")
                s = v
            else:
                if t is not None:
                    raise ParseError(lineno, "duplicate t declaration")
                t = v
        elif kind == "a":
            if len(tok) != 4:
                raise ParseError(lineno, "expected 'a <tail> <head> <cap>'")
            u, v = vertex(tok[1], lineno), vertex(tok[2], lineno)
            if tok[3] == "1":
                inf = False
            elif tok[3] == "inf":
                inf = True
            else:
                raise ParseError(lineno, f"capacity must be 1 or inf, got {tok[3]!r}")
            arc_list.append((u, v, inf))
        elif kind == "k":
            if len(tok) != 2:
                raise ParseError(lineno, "expected 'k <k>'")
            k = _int(tok[1], lineno, "k")
        elif kind == "w":
            if len(tok) != 2:
                raise ParseError(lineno, "expected 'w <W>'")
            W = _int(tok[1], lineno, "W")
        elif kind == "b":
            if len(tok) < 3:
                raise ParseError(lineno, "expected 'b <weight> <arc-idx>...'")
            w = _int(tok[1], lineno, "weight")
            idx = [_int(x, lineno, "arc index") for x in tok[2:]]
            for i in idx:
                if not 0 <= i < len(arc_list):
                    raise ParseError(lineno, f"arc index {i} not declared")
            bundles.append((w, idx))
        elif kind == "x":
            if len(tok) != 3:
                raise ParseError(lineno, "expected 'x <vertex> <weight>'")
            vweights[vertex(tok[1], lineno)] = _int(tok[2], lineno, "weight")
        elif kind == "q":
            if len(tok) != 3:
                raise ParseError(lineno, "expected 'q <source> <sink>'")
            pairs.append((vertex(tok[1], lineno), vertex(tok[2], lineno)))
        else:
            raise ParseError(lineno, f"unknown line type {kind!r}")

    if n is None:
        raise ParseError(0, "missing 'p' line")
    if m != len(arc_list):
        raise ParseError(p_line, f"declared {m} arcs but found {len(arc_list)}")
    seen = set()
    for lineno_b, (_, idx) in enumerate(bundles):
        for i in idx:
            if i in seen:
                raise ParseError(p_line, f"arc {i} appears in two bundles")
            seen.add(i)
    g = Digraph.build(n, arc_list)
    return Instance(g, -1 if s is None else s, -1 if t is None else t, k, W, bundles, vweights, pairs)


def serialize_instance(inst: Instance) -> str:
    g = inst.graph
    ids = sorted(g.arcs)
    pos = {a: i for i, a in enumerate(ids)}
    n = max(g.vertices) + 1 if g.vertices else 0
    lines = [f"p faug {n} {len(ids)}"]
    if inst.s >= 0:
        lines.append(f"s {inst.s}")
    if inst.t >= 0:
        lines.append(f"t {inst.t}")
    for i in ids:
        a = g.arcs[i]
        lines.append(f"a {a.tail} {a.head} {'inf' if a.inf else 1}")
    if inst.k is not None:
        lines.append(f"k {inst.k}")
    if inst.W is not None:
        lines.append(f"w {inst.W}")
    for w, b in inst.bundles:
        lines.append("b " + " ".join(str(x) for x in [w] + [pos[i] for i in b]))
    for v, w in sorted(inst.vertex_weights.items()):
        lines.append(f"x {v} {w}")
    for a, b in inst.pairs:
        lines.append(f"q {a} {b}")
    return "\n".join(lines) + "\n"
