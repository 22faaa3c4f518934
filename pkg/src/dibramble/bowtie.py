"""Closed walks through one full path of each of two threaded linkages."""
from __future__ import annotations

import math

import numpy as np

from .combinatorics import bipartite_core, bipartite_intersection, partition_bipartite
from .digraph import Digraph, Walk, congestion
from .errors import ConstructionGap, InvariantBreach, TooSparse
from .threaded import AnchoredWalkFamily, ThreadedLinkage, check_anchored_family

BOWTIE_FACTOR = 2**9 * 5
BOWTIE_R = 5


def congestion_bound(tl1: ThreadedLinkage, tl2: ThreadedLinkage) -> int:
    alpha, beta = tl1.overlap, tl2.overlap
    if tl1.untangled and tl2.untangled:
        return 2
    if tl1.untangled:
        return beta + 1
    if tl2.untangled:
        return alpha + 1
    return alpha + beta


def _pick(M, last_row_first: bool, limit):
    """Smallest index among the first ``limit + 1`` neighbours of the last member."""
    if last_row_first:
        nbrs = M[-1, :]
    else:
        nbrs = M[:, -1]
    for idx in range(limit + 1):
        if nbrs[idx]:
            return idx
    return None


def bowtie(tl1: ThreadedLinkage, tl2: ThreadedLinkage, d: int, factor: float = BOWTIE_FACTOR,
           r: int = BOWTIE_R, G: Digraph | None = None, labels=("first", "second")) -> AnchoredWalkFamily:
    """d closed walks, walk i carrying a full path of each linkage.

    The linkage intersection graph must not be ``factor * d``-degenerate; its
    peeled core is split into d segment pairs, each pair is cut down to its
    minimum-degree-3 core, and one walk is routed through that core.
    """
    if d < 1:
        raise ValueError("d must be positive")
    paths1, paths2 = tl1.paths, tl2.paths
    M = bipartite_intersection(paths1, paths2)
    rows, cols = bipartite_core(M, math.floor(factor * d) + 1)
    if len(rows) == 0:
        raise TooSparse(f"intersection graph is {factor * d:g}-degenerate")
    core = M[rows][:, cols]
    parts = partition_bipartite(core, d, r, factor=factor / r)

    pos1 = [range(s, e + 1) for s, e in tl1.spans]
    pos2 = [range(s, e + 1) for s, e in tl2.spans]
    walks, anchors1, anchors2 = [], [], []
    for i, (U, W) in enumerate(parts):
        sub = core[U.start:U.stop, W.start:W.stop]
        r3, c3 = bipartite_core(sub, 3)
        if len(r3) == 0:
            raise ConstructionGap(f"part {i}: the minimum-degree-3 core is empty")
        side1 = [int(rows[U.start + t]) for t in r3]
        side2 = [int(cols[W.start + t]) for t in c3]
        part = sub[np.ix_(r3, c3)]
        z, z2 = len(side1), len(side2)
        q2 = _pick(part, True, z2 - 3)
        q1 = _pick(part, False, z - 3)
        if q1 is None or q2 is None:
            raise ConstructionGap(f"part {i}: no admissible crossing for the closed walk")
        last1, last2 = side1[-1], side2[-1]
        v = min(set(paths1[last1]) & set(paths2[side2[q2]]))
        w = min(set(paths2[last2]) & set(paths1[side1[q1]]))
        v_in_w2 = next(t for t in pos2[side2[q2]] if tl2.walk[t] == v)
        w_in_w2 = next(t for t in pos2[last2] if tl2.walk[t] == w)
        w_in_w1 = next(t for t in pos1[side1[q1]] if tl1.walk[t] == w)
        v_in_w1 = next(t for t in pos1[last1] if tl1.walk[t] == v)
        seq = tl2.walk[v_in_w2:w_in_w2 + 1] + tl1.walk[w_in_w1 + 1:v_in_w1 + 1]
        walks.append(Walk(seq, closed=True))
        anchors1.append(paths1[side1[q1 + 1]])
        anchors2.append(paths2[side2[q2 + 1]])

    fam = AnchoredWalkFamily(tuple(walks), (tuple(anchors1), tuple(anchors2)), tuple(labels))
    problems = check_anchored_family(G, fam)
    if problems:
        raise InvariantBreach(f"bowtie walks: {problems[0]}")
    bound = congestion_bound(tl1, tl2)
    measured = congestion(fam.walks)
    if measured > bound or measured > tl1.overlap + tl2.overlap:
        raise InvariantBreach(f"bowtie congestion {measured} exceeds {bound}")
    return fam
