"""The three ways to turn walks or paths into a bramble."""
from __future__ import annotations

import math
from collections import deque
from itertools import combinations
from typing import Mapping, Sequence

from .bramble import Bramble, make_bramble, verify_bramble
from .combinatorics import (UGraph, bipartite_intersection, bipartite_is_degenerate, degeneracy,
                            find_clique_minor, independent_transversal, intersection_graph,
                            largest_clique_minor)
from .digraph import Digraph, Walk, congestion, is_path, splice_closed_walks
from .errors import DegenerateOutcome, InvariantBreach, NoTransversal, PreconditionUnmet
from .linkage import Linkage, PathSystem

FOUR_E = 4 * math.e


def _finish(G: Digraph, elements, walks, bound: int, what: str) -> Bramble:
    B = make_bramble(G, elements, walks)
    report = verify_bramble(G, B)
    if not report.ok:
        raise InvariantBreach(f"{what} produced an invalid bramble: {report.violations[0]}")
    if B.congestion > bound:
        raise InvariantBreach(f"{what} bramble congestion {B.congestion} exceeds {bound}")
    return B


def dense_scenario(G: Digraph, F: Sequence[Walk], d: int, threshold: int, seed: int = 0,
                   info: dict | None = None) -> Bramble | None:
    """Bramble of size d from a closed-walk family with a non-degenerate intersection graph.

    Each branch set of a K_d minor of the intersection graph becomes one
    element (the union of its walks).  Returns None when no minor is found.
    """
    F = [w if isinstance(w, Walk) else Walk(tuple(w), closed=True) for w in F]
    H = intersection_graph(F)
    degen, _ = degeneracy(H)
    if info is not None:
        info["degeneracy"] = degen
    if degen <= threshold:
        raise PreconditionUnmet(f"intersection graph is {threshold}-degenerate (degeneracy {degen})")
    bd = find_clique_minor(H, d, seed=seed)
    if bd is None:
        return None
    elements, walks = [], []
    for S in bd.sets:
        members = [F[t] for t in sorted(S)]
        w = splice_closed_walks(members)
        elements.append(w.vertices)
        walks.append(w)
    return _finish(G, elements, walks, congestion(F), "dense scenario")


def _enough_pairs(I, a: int) -> bool:
    # |I| >= 0.6 a (a-1), in integers
    return 5 * len(I) >= 3 * a * (a - 1)


def last_a_arc(ps: PathSystem, i: int) -> tuple[int, int]:
    """The arc of P_i leaving its last A_i vertex."""
    P = ps.paths[i]
    t = max(k for k, v in enumerate(P) if v in ps.A[i])
    return P[t], P[t + 1]


def _bfs_tree(H: UGraph, S: frozenset) -> list[tuple[int, int]]:
    root = min(S)
    seen = {root}
    queue = deque([root])
    edges = []
    while queue:
        u = queue.popleft()
        for w in sorted(H.adj[u]):
            if w in S and w not in seen:
                seen.add(w)
                edges.append((min(u, w), max(u, w)))
                queue.append(w)
    if seen != S:
        raise InvariantBreach("tree vertex set is not connected")
    return edges


def pair_walk(ps: PathSystem, Pij: Sequence[int], Pji: Sequence[int], i: int, j: int) -> Walk:
    """P_ij, along P_j to the start of P_ji, P_ji, along P_i back to the start."""
    pos_j, pos_i = ps.position(j), ps.position(i)
    a, b = pos_j[Pij[-1]], pos_j[Pji[0]]
    c, e = pos_i[Pji[-1]], pos_i[Pij[0]]
    if not (a <= b and c <= e):
        raise InvariantBreach(f"pair ({i},{j}): connecting segments run backwards along the system paths")
    seq = (tuple(Pij) + ps.paths[j][a + 1:b + 1] + tuple(Pji[1:]) + ps.paths[i][c + 1:e + 1])
    return Walk(seq, closed=True)


def sparse_scenario(G: Digraph, ps: PathSystem, I, P: Mapping, alpha: int, seed: int = 0,
                    info: dict | None = None) -> Bramble:
    """Bramble from one B_i-A_j path per ordered pair in I, congestion <= 2 + 2 alpha."""
    a = ps.a
    I = {tuple(p) for p in I}
    if not _enough_pairs(I, a):
        raise PreconditionUnmet(f"|I| = {len(I)} < 0.6 a (a-1) = {0.6 * a * (a - 1):.1f}")
    for (i, j) in I:
        p = P[(i, j)]
        if i == j or not is_path(G, p) or p[0] not in ps.B[i] or p[-1] not in ps.A[j]:
            raise PreconditionUnmet(f"P[{i},{j}] is not a path from B_{i} to A_{j}")
    measured = congestion(P[key] for key in I)
    if measured > alpha:
        raise PreconditionUnmet(f"path congestion {measured} exceeds alpha = {alpha}")

    H = UGraph(a, [(i, j) for i, j in combinations(range(a), 2) if (i, j) in I and (j, i) in I])
    minor = largest_clique_minor(H, seed=seed)
    p = len(minor)
    if p < 3:
        raise DegenerateOutcome(f"clique minor of size {p} < 3 in the pair graph")
    q = max(t for t in range(2, p + 2) if t * (t - 1) // 2 <= p)
    labels = list(combinations(range(q), 2))
    branch = dict(zip(labels, minor.sets))

    trees = []
    for x in range(q):
        S = frozenset().union(*(branch[tuple(sorted((x, y)))] for y in range(q) if y != x))
        trees.append(_bfs_tree(H, S))

    walk_of = {}
    for tree in trees:
        for (i, j) in tree:
            if (i, j) not in walk_of:
                W = pair_walk(ps, P[(i, j)], P[(j, i)], i, j)
                arcs = set(zip(W.seq, W.seq[1:]))
                if last_a_arc(ps, i) not in arcs or last_a_arc(ps, j) not in arcs:
                    raise InvariantBreach(f"walk for edge {i}{j} misses a marker arc")
                walk_of[(i, j)] = W

    # congestion chain: vertex multiplicity over used paths, then at most two trees per walk
    used_paths = [P[(i, j)] for (i, j) in walk_of] + [P[(j, i)] for (i, j) in walk_of]
    if congestion(list(used_paths)) > alpha:
        raise InvariantBreach("used paths exceed alpha")
    tree_count = {}
    for tree in trees:
        for e in tree:
            tree_count[e] = tree_count.get(e, 0) + 1
    if max(tree_count.values(), default=0) > 2:
        raise InvariantBreach("a pair walk lies in more than two trees")

    elements, walks = [], []
    for tree in trees:
        w = splice_closed_walks([walk_of[e] for e in tree])
        elements.append(w.vertices)
        walks.append(w)
    B = _finish(G, elements, walks, 2 + 2 * alpha, "sparse scenario")
    if info is not None:
        info.update({"pair_graph_edges": len(H.edges), "minor_size": p, "q": q})
    return B


def _paths_of(L) -> tuple:
    if isinstance(L, Linkage):
        return L.paths
    return tuple(tuple(p) for p in L)


def sparse_wrapped(G: Digraph, ps: PathSystem, I, L: Mapping, d: int, seed: int = 0,
                   budget: int = 100_000, info: dict | None = None) -> Bramble:
    """Pick pairwise disjoint paths, one per linkage, then run the sparse scenario."""
    a = ps.a
    keys = sorted({tuple(p) for p in I})
    if not _enough_pairs(keys, a):
        raise PreconditionUnmet(f"|I| = {len(keys)} < 0.6 a (a-1)")
    paths = {key: _paths_of(L[key]) for key in keys}
    for k1, k2 in combinations(keys, 2):
        if not bipartite_is_degenerate(bipartite_intersection(paths[k1], paths[k2]), d):
            raise PreconditionUnmet(f"linkages {k1} and {k2} are not {d}-degenerate against each other")
    smallest = min(len(p) for p in paths.values())
    if info is not None:
        info["min_linkage_size"] = smallest
        info["size_hypothesis"] = smallest > FOUR_E * a * a * d

    nodes, classes = [], []
    holders: dict[int, list[int]] = {}
    for key in keys:
        cls = []
        for p in paths[key]:
            idx = len(nodes)
            nodes.append((key, p))
            cls.append(idx)
            for v in p:
                holders.setdefault(v, []).append(idx)
        classes.append(cls)
    owner = {idx: c for c, cls in enumerate(classes) for idx in cls}
    edges = set()
    for hs in holders.values():
        for x, y in combinations(hs, 2):
            if owner[x] != owner[y]:
                edges.add((min(x, y), max(x, y)))
    conflict = UGraph(len(nodes), edges)
    pick = independent_transversal(conflict, classes, seed=seed, budget=budget)
    if pick is None:
        raise NoTransversal("no pairwise disjoint choice of one path per linkage exists")
    chosen = {nodes[idx][0]: nodes[idx][1] for idx in pick}
    if congestion(chosen.values()) > 1:
        raise InvariantBreach("transversal paths are not pairwise disjoint")
    return sparse_scenario(G, ps, keys, chosen, alpha=1, seed=seed, info=info)
