"""Undirected helpers: intersection graphs, degeneracy, clique minors,
independent transversals, bipartite segment partitions and matchings."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .digraph import Walk
from .errors import BudgetExhausted, ConstructionGap, HypothesisUnmet


def make_rng(seed: int, *tags: int) -> np.random.Generator:
    """Independent stream for (seed, tags); callers never share generators."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, *map(int, tags)]))


class UGraph:
    """Simple undirected graph on ``0..n-1``."""

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        adj = [set() for _ in range(n)]
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            e = (u, v) if u < v else (v, u)
            if e in es:
                raise ValueError(f"duplicate edge {e}")
            es.add(e)
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self.edges = frozenset(es)
        self.adj = tuple(frozenset(a) for a in adj)

    def __repr__(self):
        return f"UGraph(n={self.n}, m={len(self.edges)})"

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def induced(self, keep: Sequence[int]) -> tuple["UGraph", list[int]]:
        """Induced subgraph relabelled ``0..len(keep)-1``; also return the label map."""
        keep = list(keep)
        idx = {v: i for i, v in enumerate(keep)}
        es = [(idx[u], idx[v]) for u, v in self.edges if u in idx and v in idx]
        return UGraph(len(keep), es), keep

    @classmethod
    def from_biadjacency(cls, M: np.ndarray) -> "UGraph":
        """Rows become ``0..p-1`` and columns ``p..p+q-1``."""
        p, q = M.shape
        rows, cols = np.nonzero(M)
        return cls(p + q, zip(rows.tolist(), (cols + p).tolist()))


def _vertex_set(S):
    if isinstance(S, Walk):
        return S.vertices
    return frozenset(S)


def intersection_graph(family: Sequence) -> UGraph:
    """One vertex per member; adjacent iff the vertex sets meet.  Walks use V(W)."""
    sets = [_vertex_set(S) for S in family]
    holders: dict[int, list[int]] = {}
    for idx, S in enumerate(sets):
        for v in S:
            holders.setdefault(v, []).append(idx)
    es = set()
    for owners in holders.values():
        for x, y in combinations(owners, 2):
            es.add((x, y))
    return UGraph(len(sets), es)


def bipartite_intersection(family1: Sequence, family2: Sequence) -> np.ndarray:
    """Biadjacency matrix of the intersection graph between two families."""
    s1 = [_vertex_set(S) for S in family1]
    s2 = [_vertex_set(S) for S in family2]
    M = np.zeros((len(s1), len(s2)), dtype=bool)
    where: dict[int, list[int]] = {}
    for j, S in enumerate(s2):
        for v in S:
            where.setdefault(v, []).append(j)
    for i, S in enumerate(s1):
        for v in S:
            for j in where.get(v, ()):
                M[i, j] = True
    return M


# degeneracy and cores ------------------------------------------------------

def degeneracy(H: UGraph) -> tuple[int, list[int]]:
    """Min-degree elimination; ties go to the smallest vertex id."""
    deg = [len(a) for a in H.adj]
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * H.n
    order, best = [], 0
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        best = max(best, d)
        for u in H.adj[v]:
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    return best, order


def elimination_width(H: UGraph, order: Sequence[int]) -> int:
    """Largest back-degree met when deleting vertices in the given order."""
    gone = set()
    width = 0
    for v in order:
        width = max(width, sum(1 for u in H.adj[v] if u not in gone))
        gone.add(v)
    return width


def is_degenerate(H: UGraph, t: int) -> bool:
    return degeneracy(H)[0] <= t


def extract_min_degree_core(H: UGraph, t: int) -> frozenset[int]:
    """Largest vertex set inducing minimum degree >= t (possibly empty)."""
    alive = set(range(H.n))
    deg = [len(a) for a in H.adj]
    stack = [v for v in alive if deg[v] < t]
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for u in H.adj[v]:
            if u in alive:
                deg[u] -= 1
                if deg[u] < t:
                    stack.append(u)
    return frozenset(alive)


def bipartite_core(M: np.ndarray, t: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column indices of the min-degree->=t core of a bipartite graph."""
    M = np.asarray(M, dtype=bool)
    rows = np.ones(M.shape[0], dtype=bool)
    cols = np.ones(M.shape[1], dtype=bool)
    while True:
        rdeg = (M[:, cols].sum(axis=1)) * rows
        cdeg = (M[rows, :].sum(axis=0)) * cols
        kill_r = rows & (rdeg < t)
        kill_c = cols & (cdeg < t)
        if not kill_r.any() and not kill_c.any():
            break
        rows &= ~kill_r
        cols &= ~kill_c
    return np.flatnonzero(rows), np.flatnonzero(cols)


def bipartite_is_degenerate(M: np.ndarray, t: int) -> bool:
    r, c = bipartite_core(M, t + 1)
    return len(r) + len(c) == 0


# clique minors -------------------------------------------------------------

@dataclass(frozen=True)
class BranchDecomposition:
    sets: tuple[frozenset[int], ...]

    def __len__(self):
        return len(self.sets)


def _connected(H: UGraph, S: frozenset) -> bool:
    if not S:
        return False
    start = next(iter(S))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in H.adj[u]:
            if w in S and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(S)


def check_branch_decomposition(H: UGraph, bd: BranchDecomposition) -> list[str]:
    problems = []
    used = set()
    for i, S in enumerate(bd.sets):
        if not S:
            problems.append(f"branch set {i} is empty")
            continue
        if used & S:
            problems.append(f"branch set {i} overlaps an earlier one")
        used |= S
        if not _connected(H, S):
            problems.append(f"branch set {i} is not connected")
    for i, j in combinations(range(len(bd.sets)), 2):
        if not any(H.adj[u] & bd.sets[j] for u in bd.sets[i]):
            problems.append(f"branch sets {i} and {j} are not adjacent")
    return problems


EXACT_MINOR_LIMIT = 10


def _connected_masks(H: UGraph) -> list[int]:
    out = []
    for mask in range(1, 1 << H.n):
        S = frozenset(v for v in range(H.n) if mask >> v & 1)
        if _connected(H, S):
            out.append(mask)
    return out


def exact_clique_minor(H: UGraph, target: int | None = None) -> BranchDecomposition:
    """Largest clique minor by search over connected vertex sets (small graphs only)."""
    if H.n > EXACT_MINOR_LIMIT:
        raise ValueError(f"exact clique-minor search is limited to {EXACT_MINOR_LIMIT} vertices")
    if H.n == 0:
        return BranchDecomposition(())
    masks = _connected_masks(H)
    masks.sort(key=lambda m: (bin(m).count("1"), m))
    nbr = [0] * H.n
    for u, v in H.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    closed_nbr = {}
    for m in masks:
        c = 0
        x = m
        while x:
            low = x & -x
            c |= nbr[low.bit_length() - 1]
            x ^= low
        closed_nbr[m] = c
    best: list[int] = []
    goal = target if target is not None else H.n

    def grow(chosen, cands, free):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(best) >= goal:
            return True
        if len(chosen) + min(len(cands), bin(free).count("1")) <= len(best):
            return False
        for idx, m in enumerate(cands):
            if len(chosen) + len(cands) - idx <= len(best):
                break
            rest = [c for c in cands[idx + 1:] if not c & m and closed_nbr[c] & m]
            if grow(chosen + [m], rest, free & ~m):
                return True
        return False

    grow([], masks, (1 << H.n) - 1)
    sets = tuple(frozenset(v for v in range(H.n) if m >> v & 1) for m in best)
    return BranchDecomposition(sets)


def _greedy_clique(nodes, adj, order_key) -> list:
    chosen = []
    for v in sorted(nodes, key=order_key):
        if all(u in adj[v] for u in chosen):
            chosen.append(v)
    return chosen


def _contract_once(H: UGraph, rng: np.random.Generator | None, target: int | None):
    """One greedy contraction run; returns the best branch sets seen."""
    adj = {v: set(H.adj[v]) for v in range(H.n)}
    members = {v: {v} for v in range(H.n)}
    best: list[frozenset] = []

    def jitter():
        return rng.random() if rng is not None else 0.0

    while adj:
        clique = _greedy_clique(adj, adj, lambda v: (-len(adj[v]), jitter(), v))
        if len(clique) > len(best):
            best = [frozenset(members[v]) for v in clique]
            if target is not None and len(best) >= target:
                break
        if len(clique) == len(adj):
            break
        v = min(adj, key=lambda u: (len(adj[u]), jitter(), u))
        if not adj[v]:
            del adj[v]
            del members[v]
            continue
        u = max(adj[v], key=lambda w: (len(adj[v] & adj[w]), jitter(), -w))
        for w in adj[v]:
            adj[w].discard(v)
            if w != u:
                adj[w].add(u)
                adj[u].add(w)
        members[u] |= members.pop(v)
        del adj[v]
    return best


def largest_clique_minor(H: UGraph, seed: int = 0, restarts: int = 32) -> BranchDecomposition:
    """Best clique minor found; exact for graphs with at most ten vertices."""
    if H.n <= EXACT_MINOR_LIMIT:
        return exact_clique_minor(H)
    best = _contract_once(H, None, None)
    for r in range(restarts):
        cand = _contract_once(H, make_rng(seed, 0x4B54, r), None)
        if len(cand) > len(best):
            best = cand
    return BranchDecomposition(tuple(best))


def find_clique_minor(H: UGraph, target: int, seed: int = 0, restarts: int = 32) -> BranchDecomposition | None:
    """A verified K_target minor (exactly ``target`` branch sets) or None."""
    if target < 1:
        raise ValueError("target must be positive")
    if H.n <= EXACT_MINOR_LIMIT:
        bd = exact_clique_minor(H, target)
        sets = bd.sets
    else:
        sets = _contract_once(H, None, target)
        r = 0
        while len(sets) < target and r < restarts:
            sets = _contract_once(H, make_rng(seed, 0x4B54, r), target)
            r += 1
    if len(sets) < target:
        return None
    bd = BranchDecomposition(tuple(sets[:target]))
    problems = check_branch_decomposition(H, bd)
    if problems:
        raise ConstructionGap(f"clique minor failed its own check: {problems[0]}")
    return bd


# independent transversals --------------------------------------------------

def check_transversal(H: UGraph, classes: Sequence[Sequence[int]], choice: Sequence[int]) -> list[str]:
    problems = []
    if len(choice) != len(classes):
        return ["one vertex per class required"]
    for i, (c, v) in enumerate(zip(classes, choice)):
        if v not in c:
            problems.append(f"choice {v} is not in class {i}")
    for i, j in combinations(range(len(choice)), 2):
        if H.has_edge(choice[i], choice[j]):
            problems.append(f"choices of classes {i} and {j} are adjacent")
    return problems


def _exhaustive_transversal(H: UGraph, classes, node_cap: int) -> list[int] | None:
    """Backtracking with forward checking; the class with fewest options goes next."""
    pick = [None] * len(classes)
    nodes = 0

    def go(options):
        nonlocal nodes
        if not options:
            return True
        nodes += 1
        if nodes > node_cap:
            raise BudgetExhausted(f"exhaustive search passed {node_cap} nodes")
        i = min(options, key=lambda c: (len(options[c]), c))
        rest = {c: o for c, o in options.items() if c != i}
        for v in options[i]:
            nxt = {}
            for c, o in rest.items():
                kept = [u for u in o if u not in H.adj[v]]
                if not kept:
                    break
                nxt[c] = kept
            else:
                pick[i] = v
                if go(nxt):
                    return True
        return False

    return list(pick) if go({i: list(c) for i, c in enumerate(classes)}) else None


def independent_transversal(H: UGraph, classes: Sequence[Sequence[int]], seed: int = 0,
                            budget: int = 100_000, exhaustive_cap: int = 10**6) -> list[int] | None:
    """One vertex per class, pairwise nonadjacent.

    Resampling first (a violated pair re-draws both classes); if the budget
    runs out, exhaustive backtracking limited to ``exhaustive_cap`` search
    nodes (BudgetExhausted beyond that).  None means no transversal exists.
    """
    classes = [sorted(c) for c in classes]
    if any(not c for c in classes):
        return None
    owner = {}
    for i, c in enumerate(classes):
        for v in c:
            if v in owner:
                raise ValueError(f"vertex {v} lies in two classes")
            owner[v] = i
    if all(not (H.adj[v] & owner.keys()) for v in owner):
        return [c[0] for c in classes]
    rng = make_rng(seed, 0x4C4C)
    pick = [c[int(rng.integers(len(c)))] for c in classes]
    for _ in range(budget):
        bad = None
        for i, v in enumerate(pick):
            for u in H.adj[v]:
                j = owner.get(u)
                if j is not None and j != i and pick[j] == u:
                    bad = (i, j)
                    break
            if bad:
                break
        if bad is None:
            return pick
        for i in bad:
            pick[i] = classes[i][int(rng.integers(len(classes[i])))]
    if not check_transversal(H, classes, pick):
        return pick
    return _exhaustive_transversal(H, classes, exhaustive_cap)


# matchings -----------------------------------------------------------------

def maximal_matching(H: UGraph, allowed: Callable[[int, int], bool] | None = None) -> frozenset[tuple[int, int]]:
    """Greedy inclusion-maximal matching over allowed edges in lexicographic order."""
    used = set()
    out = []
    for u, v in sorted(H.edges):
        if allowed is not None and not allowed(u, v):
            continue
        if u in used or v in used:
            continue
        used.update((u, v))
        out.append((u, v))
    return frozenset(out)


def matched_vertices(M: Iterable[tuple[int, int]]) -> set[int]:
    out = set()
    for u, v in M:
        out.update((u, v))
    return out


# bipartite segment partitions ---------------------------------------------

Segment = tuple[int, int]  # half-open index range


def _avg_degree(M: np.ndarray, U: Segment, W: Segment) -> float:
    size = (U[1] - U[0]) + (W[1] - W[0])
    if size == 0:
        return 0.0
    e = int(M[U[0]:U[1], W[0]:W[1]].sum())
    return 2 * e / size


def check_partition(M: np.ndarray, parts: Sequence[tuple[Sequence[int], Sequence[int]]], k: int, r: float) -> list[str]:
    """The three clauses: segments, pairwise disjointness, average degree >= r."""
    problems = []
    if len(parts) != k:
        problems.append(f"expected {k} pairs, got {len(parts)}")
    for i, (U, W) in enumerate(parts):
        for name, S in (("U", U), ("W", W)):
            S = list(S)
            if not S or S != list(range(S[0], S[0] + len(S))):
                problems.append(f"{name}_{i} is not a nonempty segment")
    for i, j in combinations(range(len(parts)), 2):
        if set(parts[i][0]) & set(parts[j][0]):
            problems.append(f"U_{i} and U_{j} intersect")
        if set(parts[i][1]) & set(parts[j][1]):
            problems.append(f"W_{i} and W_{j} intersect")
    for i, (U, W) in enumerate(parts):
        U, W = list(U), list(W)
        if not U or not W:
            continue
        e = int(M[np.ix_(U, W)].sum())
        if 2 * e < r * (len(U) + len(W)):
            problems.append(f"pair {i} has average degree {2 * e / (len(U) + len(W)):.3f} < {r}")
    return problems


def _sweep(M: np.ndarray, k: int, r: float) -> list[tuple[Segment, Segment]]:
    p, q = M.shape
    parts = []
    x0 = y0 = 0
    while len(parts) < k and (x0 < p or y0 < q):
        x1, y1, e = x0, y0, 0
        sealed = False
        while True:
            can_x, can_y = x1 < p, y1 < q
            if not can_x and not can_y:
                break
            gx = int(M[x1, y0:y1].sum()) if can_x else -1
            gy = int(M[x0:x1, y1].sum()) if can_y else -1
            if gx >= gy:
                e += gx
                x1 += 1
            else:
                e += gy
                y1 += 1
            if x1 > x0 and y1 > y0 and 2 * e >= r * ((x1 - x0) + (y1 - y0)):
                sealed = True
                break
        if not sealed:
            break
        parts.append(((x0, x1), (y0, y1)))
        x0, y0 = x1, y1
    return parts


EXHAUSTIVE_PARTITION_LIMIT = 24


def _exhaustive_partition(M: np.ndarray, k: int, r: float):
    p, q = M.shape
    cands = []
    for a in range(p):
        for b in range(a + 1, p + 1):
            for c in range(q):
                for d in range(c + 1, q + 1):
                    if 2 * int(M[a:b, c:d].sum()) >= r * ((b - a) + (d - c)):
                        cands.append(((a, b), (c, d)))
    cands.sort(key=lambda t: (t[0][1] - t[0][0] + t[1][1] - t[1][0], t))

    def disjoint(s, t):
        return s[1] <= t[0] or t[1] <= s[0]

    def go(chosen, start):
        if len(chosen) == k:
            return list(chosen)
        for idx in range(start, len(cands)):
            U, W = cands[idx]
            if all(disjoint(U, u) and disjoint(W, w) for u, w in chosen):
                got = go(chosen + [(U, W)], idx + 1)
                if got:
                    return got
        return None

    return go([], 0)


def partition_bipartite(M: np.ndarray, k: int, r: float, factor: float = 2**9) -> list[tuple[range, range]]:
    """k pairs of disjoint segments (rows U_i, columns W_i) with average degree >= r.

    Rows and columns of ``M`` are taken in index order.  The hypothesis being
    guarded is minimum degree at least ``factor * r * k``.
    """
    M = np.asarray(M, dtype=bool)
    if k < 1 or r <= 0:
        raise ValueError("k and r must be positive")
    parts = _sweep(M, k, r)
    if len(parts) < k and sum(M.shape) <= EXHAUSTIVE_PARTITION_LIMIT:
        parts = _exhaustive_partition(M, k, r) or parts
    if len(parts) < k:
        degs = np.concatenate([M.sum(axis=1), M.sum(axis=0)])
        min_deg = int(degs.min()) if degs.size else 0
        if min_deg < factor * r * k:
            raise HypothesisUnmet(
                f"found {len(parts)} of {k} pairs; minimum degree {min_deg} < {factor * r * k:g}")
        raise ConstructionGap(f"found {len(parts)} of {k} pairs although minimum degree {min_deg} suffices")
    out = [(range(*U), range(*W)) for U, W in parts]
    problems = check_partition(M, out, k, r)
    if problems:
        raise ConstructionGap(f"partition failed its own check: {problems[0]}")
    return out
