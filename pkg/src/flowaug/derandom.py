"""Deterministic covering families: splitters (functions) and separating set families.

Small ground sets use a greedy cover driven by conditional expectations; larger ones
use a two-level hash: a prime-field multiplicative hash that is injective on the
relevant points for at least one multiplier, followed by low-degree polynomials that
interpolate any assignment on those points.
"""
from __future__ import annotations

from itertools import combinations, product

SMALL_LIMIT = 16


class DerandError(ValueError):
    pass


def _next_prime(n: int) -> int:
    n = max(n, 2)
    while True:
        if all(n % d for d in range(2, int(n ** 0.5) + 1)):
            return n
        n += 1


def _greedy_cover(elems: list, values: list, patterns: list, weights: list) -> list:
    """Pick functions elems -> values covering every pattern (a tuple of (elem, value) pairs).

    Each new function starts from the first uncovered pattern and then fixes the
    remaining elements one at a time, maximising the expected number of newly
    covered patterns if the unfixed elements were drawn from the value weights.
    """
    uncovered = set(range(len(patterns)))
    pat_dicts = [dict(p) for p in patterns]
    by_elem = {e: [] for e in elems}
    for idx, p in enumerate(pat_dicts):
        for e in p:
            by_elem[e].append(idx)
    family = []
    while uncovered:
        first = min(uncovered)
        f = dict(pat_dicts[first])
        # score[idx] = product of match probabilities over fixed elements
        score = {}
        for idx in uncovered:
            p = pat_dicts[idx]
            sc = 1.0
            for e, v in p.items():
                if e in f:
                    sc = sc if f[e] == v else 0.0
                else:
                    sc *= weights[values.index(v)]
            score[idx] = sc
        for e in elems:
            if e in f:
                continue
            best, best_gain = None, -1.0
            wv = None
            for vi, v in enumerate(values):
                gain = 0.0
                for idx in by_elem[e]:
                    if idx in uncovered:
                        pv = pat_dicts[idx][e]
                        if pv == v:
                            gain += score[idx] / weights[vi]
                if gain > best_gain:
                    best, best_gain, wv = v, gain, vi
            f[e] = best
            for idx in by_elem[e]:
                if idx in uncovered:
                    pv = pat_dicts[idx][e]
                    score[idx] = score[idx] / weights[wv] if pv == best else 0.0
        family.append(f)
        uncovered = {idx for idx in uncovered if any(f[e] != v for e, v in patterns[idx])}
    return family


def _fks_multipliers(elems: list, r: int):
    p = _next_prime(len(elems) + 1)
    pos = {e: i + 1 for i, e in enumerate(elems)}
    for a in range(1, p):
        yield {e: (a * pos[e] % p) % r for e in elems}


def splitter_functions(A, B, k: int) -> list:
    """Functions A -> B (as dicts) such that every partial map on at most k points is extended by one."""
    A = sorted(A)
    B = sorted(B)
    if k < 0:
        raise DerandError("k must be non-negative")
    if not A:
        return [{}]
    if not B:
        raise DerandError("empty codomain with non-empty domain")
    if len(B) == 1 or k == 0:
        return [{a: B[0] for a in A}]
    k = min(k, len(A))
    if len(B) ** len(A) <= 64:
        return [dict(zip(A, vals)) for vals in product(B, repeat=len(A))]
    if len(A) <= SMALL_LIMIT:
        patterns = [tuple(zip(S, vals)) for S in combinations(A, k) for vals in product(B, repeat=k)]
        return _greedy_cover(A, B, patterns, [1.0 / len(B)] * len(B))
    r = k * k
    q = _next_prime(max(r, len(B)))
    family = []
    seen = set()
    for h in _fks_multipliers(A, r):
        for coeffs in product(range(q), repeat=k):
            f = {}
            for a in A:
                x = h[a]
                y = 0
                for c in coeffs:
                    y = (y * x + c) % q
                f[a] = B[y] if y < len(B) else B[0]
            key = tuple(f[a] for a in A)
            if key not in seen:
                seen.add(key)
                family.append(f)
    return family


def separation_sets(U, a: int, b: int) -> list:
    """Subsets S of U such that any disjoint (X, Y), |X| <= a, |Y| <= b, has X inside S and Y outside."""
    U = sorted(U)
    if a < 0 or b < 0:
        raise DerandError("a and b must be non-negative")
    a = min(a, len(U))
    b = min(b, len(U))
    if a == 0:
        return [frozenset()]
    if b == 0:
        return [frozenset(U)]
    if 2 ** len(U) <= 64:
        return [frozenset(x for x, keep in zip(U, bits) if keep) for bits in product((0, 1), repeat=len(U))]
    if len(U) <= SMALL_LIMIT:
        patterns = [tuple(sorted([(x, 1) for x in X] + [(y, 0) for y in Y]))
                    for X, Y in _disjoint_pairs(U, a, b)]
        p_in = a / (a + b)
        fam = _greedy_cover(U, [0, 1], patterns, [1.0 - p_in, p_in])
        return [frozenset(u for u in U if f[u] == 1) for f in fam]
    if a + b >= len(U):
        # hashing cannot shrink anything here; S = X itself always separates (X, Y)
        return [frozenset(X) for size in range(a + 1) for X in combinations(U, size)]
    # hash the at most a+b relevant points injectively, then choose the image of X exactly
    r = (a + b) ** 2
    family = []
    seen = set()
    for h in _fks_multipliers(U, r):
        for size in range(a + 1):
            for T in combinations(range(r), size):
                T = set(T)
                S = frozenset(u for u in U if h[u] in T)
                if S not in seen:
                    seen.add(S)
                    family.append(S)
    return family


def _disjoint_pairs(U, a: int, b: int):
    """Disjoint (X, Y) with |X| <= a, |Y| <= b that cannot be enlarged within those bounds."""
    for xa in range(a + 1):
        for X in combinations(U, xa):
            rest = [u for u in U if u not in X]
            if xa < a and len(rest) > 0 and len(rest) > b:
                continue
            yb = min(b, len(rest))
            for Y in combinations(rest, yb):
                if xa < a and len(rest) > yb:
                    continue
                yield X, Y


def verify_splitter(family, A, B, k: int) -> bool:
    A = sorted(A)
    B = sorted(B)
    k = min(k, len(A))
    for S in combinations(A, k):
        have = {tuple(f[x] for x in S) for f in family}
        if len(have) < len(B) ** k:
            return False
    return True


def verify_separation(family, U, a: int, b: int) -> bool:
    U = sorted(U)
    for X, Y in _disjoint_pairs(U, min(a, len(U)), min(b, len(U))):
        if not any(set(X) <= S and not (S & set(Y)) for S in family):
            return False
    return True
