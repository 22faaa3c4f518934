"""Deterministic instance generators for tests, demos and the CLI."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .digraph import Digraph, is_strongly_connected
from .errors import ConstructionGap
from .linkage import PathSystem, is_well_linked, validate_path_system
from .threaded import ThreadedLinkage


def gen_cylindrical_grid(g: int) -> Digraph:
    """g concentric directed cycles of length 2g joined by 2g alternating radial paths.

    Vertex ``c * 2g + p`` is position p on cycle c (cycle 0 innermost).
    Radial paths at even positions point outward, at odd positions inward.
    """
    if g < 2:
        raise ValueError("cylindrical grids need g >= 2")
    L = 2 * g
    arcs = []
    for c in range(g):
        for p in range(L):
            arcs.append((c * L + p, c * L + (p + 1) % L))
    for c in range(g - 1):
        for p in range(L):
            inner, outer = c * L + p, (c + 1) * L + p
            arcs.append((inner, outer) if p % 2 == 0 else (outer, inner))
    G = Digraph(g * L, arcs)
    if not is_strongly_connected(G, range(G.n)):
        raise ConstructionGap("cylindrical grid is not strongly connected")
    return G


def grid_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    out = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                out.append((v, v + 1))
            if r + 1 < rows:
                out.append((v, v + cols))
    return out


def bidirected_grid(rows: int, cols: int | None = None) -> Digraph:
    cols = rows if cols is None else cols
    return Digraph.bidirected(rows * cols, grid_edges(rows, cols))


def spread_rows(g: int, a: int) -> list[int]:
    if a == 1:
        return [0]
    step = (g - 1) // (a - 1)
    return [t * step for t in range(a)]


def gen_grid_path_system(g: int, a: int, b: int, rows: Sequence[int] | None = None,
                         verify: bool = True) -> tuple[Digraph, PathSystem]:
    """Rows of a bidirected g x g grid as the paths; A_i on the first b columns, B_i on the last b.

    The terminal set is verified well-linked exhaustively when it has at most
    12 vertices (and ``verify`` is set); otherwise that property is taken on
    trust from the grid routing.
    """
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive")
    if a > g:
        raise ValueError(f"a = {a} exceeds the grid size {g}")
    if 2 * b > g:
        raise ValueError(f"2b = {2 * b} exceeds the grid size {g}")
    rows = spread_rows(g, a) if rows is None else sorted(rows)
    if len(rows) != a or len(set(rows)) != a or not all(0 <= r < g for r in rows):
        raise ValueError(f"rows must be {a} distinct indices in [0, {g})")
    G = bidirected_grid(g)
    paths = [tuple(r * g + c for c in range(g)) for r in rows]
    A = [frozenset(r * g + c for c in range(b)) for r in rows]
    B = [frozenset(r * g + c for c in range(g - b, g)) for r in rows]
    checked = False
    ps = PathSystem(paths, A, B)
    report = validate_path_system(G, ps)
    if not report.ok:
        raise ConstructionGap(f"generated path system is invalid: {report.violations[0]}")
    if verify and 2 * a * b <= 12:
        if not is_well_linked(G, ps.terminals):
            raise ValueError(f"terminals on rows {rows} are not well-linked")
        checked = True
    return G, PathSystem(paths, A, B, well_linked_verified=checked)


def bridge_gadget(a: int, b: int, shift: int = 0, shared_hubs: bool = False) -> tuple[Digraph, PathSystem, dict]:
    """Directed system paths with private bridges between every ordered pair.

    P_i is a directed path ``A_i`` (b vertices) then ``B_i`` (b vertices).
    For each ordered pair (i, j) and t < b there is a forward bridge
    ``B_i[t] -> m -> A_j[t]`` and a backward bridge
    ``A_j[t] -> m' -> B_i[(t + shift) % b]``.  With ``shared_hubs`` the forward
    bridges of (i, j) and (j, i) at the same t run through one common hub.
    Returns the graph, the system and the forward bridge paths per pair.
    """
    arcs = set()
    n = 0

    def fresh():
        nonlocal n
        n += 1
        return n - 1

    paths = []
    for _ in range(a):
        P = tuple(fresh() for _ in range(2 * b))
        paths.append(P)
        arcs.update(zip(P, P[1:]))
    A = [P[:b] for P in paths]
    B = [P[b:] for P in paths]
    forward = {}
    hubs = {}
    for i in range(a):
        for j in range(a):
            if i == j:
                continue
            bridges = []
            for t in range(b):
                key = (min(i, j), max(i, j), t)
                if shared_hubs:
                    if key not in hubs:
                        hubs[key] = fresh()
                    m = hubs[key]
                else:
                    m = fresh()
                arcs.update({(B[i][t], m), (m, A[j][t])})
                bridges.append((B[i][t], m, A[j][t]))
                back = fresh()
                arcs.update({(A[j][t], back), (back, B[i][(t + shift) % b])})
            forward[(i, j)] = tuple(bridges)
    G = Digraph(n, sorted(arcs))
    ps = PathSystem(paths, [frozenset(s) for s in A], [frozenset(s) for s in B])
    return G, ps, forward


def hub_walks(d: int) -> tuple[Digraph, list]:
    """d + 1 closed walks through one hub vertex 0; walk k is (0, k, 0)."""
    from .digraph import Walk
    G = Digraph.bidirected(d + 2, [(0, k) for k in range(1, d + 2)])
    return G, [Walk((0, k, 0), closed=True) for k in range(1, d + 2)]


def grid_line_walks(n: int) -> tuple[Digraph, list]:
    """Closed back-and-forth walks along every row and column of a bidirected n x n grid."""
    from .digraph import Walk
    G = bidirected_grid(n)
    walks = []
    for r in range(n):
        line = [r * n + c for c in range(n)]
        walks.append(Walk(tuple(line + line[-2::-1]), closed=True))
    for c in range(n):
        line = [r * n + c for r in range(n)]
        walks.append(Walk(tuple(line + line[-2::-1]), closed=True))
    return G, walks


# crafted threaded linkages on grids ----------------------------------------

def snake_rows(n: int) -> ThreadedLinkage:
    """Rows of an n x n grid traversed boustrophedon; threads are empty."""
    seq, spans = [], []
    for r in range(n):
        cols = range(n) if r % 2 == 0 else range(n - 1, -1, -1)
        start = len(seq)
        seq.extend(r * n + c for c in cols)
        spans.append((start, len(seq) - 1))
    return ThreadedLinkage(tuple(seq), tuple(spans), untangled=True)


def snake_columns(n: int) -> ThreadedLinkage:
    seq, spans = [], []
    for c in range(n):
        rows = range(n) if c % 2 == 0 else range(n - 1, -1, -1)
        start = len(seq)
        seq.extend(r * n + c for r in rows)
        spans.append((start, len(seq) - 1))
    return ThreadedLinkage(tuple(seq), tuple(spans), untangled=True)


def _transpose(tl: ThreadedLinkage, n: int) -> ThreadedLinkage:
    seq = tuple((v % n) * n + v // n for v in tl.walk)
    return ThreadedLinkage(seq, tl.spans, tl.untangled)


def tangled_columns(n: int) -> ThreadedLinkage:
    """Columns 1..n-1 top to bottom; the thread after column c climbs column c-1.

    The thread from the bottom of column c walks up column c - 1 and steps
    across the top row into column c + 1, so it meets an earlier linkage path
    (tangled) and the top-row vertices occur three times.
    """
    seq, spans = [], []
    for c in range(1, n):
        if c > 1:
            prev = c - 2
            seq.extend(r * n + prev for r in range(n - 1, -1, -1))
            seq.append(0 * n + prev + 1)
        start = len(seq)
        seq.extend(r * n + c for r in range(n))
        spans.append((start, len(seq) - 1))
    return ThreadedLinkage(tuple(seq), tuple(spans), untangled=False)


def tangled_rows(n: int) -> ThreadedLinkage:
    return _transpose(tangled_columns(n), n)


# random threaded linkages --------------------------------------------------

def complete_digraph(n: int) -> Digraph:
    return Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v])


def random_threaded_linkage(rng: np.random.Generator, n: int, size: int, max_path: int = 4,
                            max_thread: int = 6) -> ThreadedLinkage:
    """Random threaded linkage in the complete digraph on n vertices.

    Linkage paths are disjoint random vertex runs; threads are random paths
    that may revisit any vertex, so tangles and useful walks are common.
    """
    lengths = rng.integers(1, max_path + 1, size=size)
    if lengths.sum() > n:
        raise ValueError("not enough vertices for the requested linkage")
    perm = rng.permutation(n).tolist()
    paths, pos = [], 0
    for ln in lengths:
        paths.append(tuple(perm[pos:pos + ln]))
        pos += ln
    seq = list(paths[0])
    spans = [(0, len(seq) - 1)]
    for P in paths[1:]:
        t = int(rng.integers(0, max_thread + 1))
        pool = [v for v in rng.permutation(n).tolist() if v != seq[-1] and v != P[0]]
        body = pool[:t]
        seq.extend(body)
        start = len(seq)
        seq.extend(P)
        spans.append((start, len(seq) - 1))
    return ThreadedLinkage(tuple(seq), tuple(spans))
