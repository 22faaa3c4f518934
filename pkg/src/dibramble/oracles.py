"""Brute-force reference implementations for small instances.

Nothing here is clever on purpose: each function enumerates its search space
directly so it can be compared against the fast routines elsewhere.
"""
from __future__ import annotations

from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import UGraph
from .digraph import Digraph
from .errors import TooLargeForExhaustive


def reach_matrix(G: Digraph, S: Iterable[int] | None = None) -> np.ndarray:
    """Reflexive transitive closure of G[S] by repeated boolean squaring."""
    verts = sorted(range(G.n) if S is None else set(S))
    idx = {v: t for t, v in enumerate(verts)}
    R = np.eye(len(verts), dtype=bool)
    for u, v in G.arcs:
        if u in idx and v in idx:
            R[idx[u], idx[v]] = True
    while True:
        nxt = R | ((R.astype(np.int64) @ R.astype(np.int64)) > 0)
        if (nxt == R).all():
            return R
        R = nxt


def strongly_connected(G: Digraph, S: Iterable[int]) -> bool:
    S = set(S)
    if not S:
        return False
    return bool(reach_matrix(G, S).all())


def simple_paths(G: Digraph, sources, sinks, allowed) -> list[tuple[int, ...]]:
    """Every simple path from a source to a sink inside ``allowed``."""
    allowed = set(allowed)
    sinks = set(sinks)
    out = []

    def extend(path, seen):
        v = path[-1]
        if v in sinks:
            out.append(tuple(path))
        for w in G.out_neighbors(v):
            if w in allowed and w not in seen:
                seen.add(w)
                path.append(w)
                extend(path, seen)
                path.pop()
                seen.discard(w)

    for s in sorted(set(sources) & allowed):
        extend([s], {s})
    return out


def max_disjoint_paths(G: Digraph, A, B, removed=(), cap: int = 10) -> int:
    """Largest set of vertex-disjoint A-B paths avoiding ``removed``, by packing search."""
    if G.n > cap:
        raise TooLargeForExhaustive(f"n = {G.n} exceeds {cap}")
    allowed = set(range(G.n)) - set(removed)
    paths = [frozenset(p) for p in simple_paths(G, A, B, allowed)]
    best = 0

    def go(start, used, count):
        nonlocal best
        best = max(best, count)
        for t in range(start, len(paths)):
            if not (paths[t] & used):
                go(t + 1, used | paths[t], count + 1)

    go(0, frozenset(), 0)
    return best


def well_linked(G: Digraph, X: Iterable[int]) -> bool:
    """All equal-size A, B in X, intersecting or not, linked inside G - (X - A - B)."""
    X = sorted(set(X))
    for size in range(1, len(X) + 1):
        for A in combinations(X, size):
            for B in combinations(X, size):
                removed = set(X) - set(A) - set(B)
                if max_disjoint_paths(G, A, B, removed, cap=max(G.n, 10)) < size:
                    return False
    return True


def degeneracy(H: UGraph, cap: int = 12) -> int:
    """max over nonempty vertex subsets of the minimum induced degree."""
    if H.n > cap:
        raise TooLargeForExhaustive(f"n = {H.n} exceeds {cap}")
    best = 0
    for mask in range(1, 1 << H.n):
        S = [v for v in range(H.n) if mask >> v & 1]
        low = min(sum(1 for w in H.adj[v] if mask >> w & 1) for v in S)
        best = max(best, low)
    return best


def min_hitting_set(sets: Sequence[Iterable[int]], cap: int = 20) -> int:
    """Smallest vertex set meeting every set, by increasing-size enumeration."""
    sets = [frozenset(s) for s in sets]
    if not sets:
        return 0
    if any(not s for s in sets):
        raise ValueError("an empty set cannot be hit")
    universe = sorted(frozenset().union(*sets))
    if len(universe) > cap:
        raise TooLargeForExhaustive(f"universe of {len(universe)} exceeds {cap}")
    for size in range(1, len(universe) + 1):
        for C in combinations(universe, size):
            C = set(C)
            if all(s & C for s in sets):
                return size
    return len(universe)


def is_bramble(G: Digraph, elements: Sequence[Iterable[int]]) -> bool:
    """Strong connectivity per element and the touching rule per pair, from the arc set."""
    els = [frozenset(e) for e in elements]
    for S in els:
        if not S or any(not (0 <= v < G.n) for v in S) or not strongly_connected(G, S):
            return False
    for X, Y in combinations(els, 2):
        if X & Y:
            continue
        fwd = any(u in X and v in Y for u, v in G.arcs)
        back = any(u in Y and v in X for u, v in G.arcs)
        if not (fwd and back):
            return False
    return True


def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for t in range(len(part)):
            yield part[:t] + [[first] + part[t]] + part[t + 1:]
        yield [[first]] + part


def _connected(H: UGraph, S: set) -> bool:
    start = min(S)
    seen, stack = {start}, [start]
    while stack:
        u = stack.pop()
        for w in H.adj[u]:
            if w in S and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == S


def clique_minor_number(H: UGraph, cap: int = 7) -> int:
    """Largest t with a K_t minor, over all partitions of V(H) plus an 'unused' marker."""
    if H.n > cap:
        raise TooLargeForExhaustive(f"n = {H.n} exceeds {cap}")
    if H.n == 0:
        return 0
    marker = -1
    best = 1
    for part in _set_partitions([marker] + list(range(H.n))):
        blocks = [set(b) for b in part if marker not in b]
        if len(blocks) <= best:
            continue
        if not all(_connected(H, b) for b in blocks):
            continue
        if all(any(w in Y for v in X for w in H.adj[v]) for X, Y in combinations(blocks, 2)):
            best = len(blocks)
    return best


def has_transversal(H: UGraph, classes: Sequence[Sequence[int]], cap: int = 10**6) -> bool:
    space = 1
    for c in classes:
        space *= len(c)
    if space > cap:
        raise TooLargeForExhaustive(f"search space {space} exceeds {cap}")
    for pick in product(*classes):
        if all(not H.has_edge(u, v) for u, v in combinations(pick, 2)):
            return True
    return False


def random_digraph(rng: np.random.Generator, n: int, p: float) -> Digraph:
    return Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p])


def random_ugraph(rng: np.random.Generator, n: int, p: float) -> UGraph:
    return UGraph(n, [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p])
