"""Threaded linkages: one walk stringing together all paths of a linkage.

A threaded linkage is a walk ``L_1, Q_1, L_2, ..., Q_{l-1}, L_l`` where the
``L_k`` are the linkage paths (stored as inclusive index spans into the walk)
and the threads ``Q_k`` are whatever lies strictly between consecutive spans.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .digraph import Digraph, Walk, is_walk, overlap, shortcut_to_path
from .errors import InvariantBreach, NoLinkage, SizeTooSmall
from .linkage import Linkage, PathSystem, find_disjoint_paths

Span = tuple[int, int]


@dataclass(frozen=True)
class ThreadedLinkage:
    walk: tuple[int, ...]
    spans: tuple[Span, ...]
    untangled: bool = False

    @property
    def size(self) -> int:
        return len(self.spans)

    @property
    def paths(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.walk[s:e + 1] for s, e in self.spans)

    @property
    def thread_spans(self) -> tuple[Span, ...]:
        """Half-open ``(start, stop)`` ranges of the threads; may be empty."""
        return tuple((self.spans[k][1] + 1, self.spans[k + 1][0]) for k in range(self.size - 1))

    @property
    def threads(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.walk[a:b] for a, b in self.thread_spans)

    @property
    def overlap(self) -> int:
        return overlap([Walk(self.walk)])

    def to_json(self) -> dict:
        return {"walk": list(self.walk), "paths": [list(s) for s in self.spans],
                "untangled": self.untangled}

    @classmethod
    def from_json(cls, data: dict) -> "ThreadedLinkage":
        return cls(tuple(data["walk"]), tuple(tuple(s) for s in data["paths"]),
                   bool(data.get("untangled", False)))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass(frozen=True)
class AnchoredWalkFamily:
    """Closed walks, each carrying designated linkage paths as contiguous subwalks.

    ``anchors[r][k]`` is the anchor of walk ``k`` taken from the linkage named
    ``labels[r]``.
    """

    walks: tuple[Walk, ...]
    anchors: tuple[tuple[tuple[int, ...], ...], ...]
    labels: tuple = ()

    def __len__(self):
        return len(self.walks)

    def anchor_paths(self, row: int = 0) -> tuple[tuple[int, ...], ...]:
        return self.anchors[row]


def contains_subwalk(seq: Sequence[int], sub: Sequence[int]) -> bool:
    n, m = len(seq), len(sub)
    first = sub[0]
    for i in range(n - m + 1):
        if seq[i] == first and tuple(seq[i:i + m]) == tuple(sub):
            return True
    return False


def check_threaded_linkage(G: Digraph | None, tl: ThreadedLinkage) -> list[str]:
    """Audit the concatenation structure; untangledness is checked literally."""
    problems = []
    W, spans = tl.walk, tl.spans
    if not W or not spans:
        return ["empty threaded linkage"]
    if G is not None and not is_walk(G, W):
        problems.append("walk uses a non-arc")
    if spans[0][0] != 0 or spans[-1][1] != len(W) - 1:
        problems.append("walk must start and end with a linkage path")
    for k, (s, e) in enumerate(spans):
        if s > e:
            problems.append(f"span {k} is empty")
        if k and s <= spans[k - 1][1]:
            problems.append(f"span {k} overlaps its predecessor")
    if problems:
        return problems
    owner = {}
    for k, p in enumerate(tl.paths):
        if len(set(p)) != len(p):
            problems.append(f"linkage path {k} repeats a vertex")
        for v in p:
            if v in owner and owner[v] != k:
                problems.append(f"linkage paths {owner[v]} and {k} share vertex {v}")
            owner[v] = k
    paths = tl.paths
    for k, (a, b) in enumerate(tl.thread_spans):
        if len(set(W[a:b])) != b - a:
            problems.append(f"thread {k} is not a path")
    if tl.untangled:
        for k, (a, b) in enumerate(tl.thread_spans):
            inside = set(W[a:b])
            rest = set(W[:a]) | set(W[b:])
            allowed = set(paths[k]) | set(paths[k + 1])
            bad = (inside & rest) - allowed
            if bad:
                problems.append(f"thread {k} meets the walk outside its neighbours at {sorted(bad)}")
    return problems


def _glue(segments: Sequence[Sequence[int]]) -> list[int]:
    seq = list(segments[0])
    for seg in segments[1:]:
        if seg[0] != seq[-1]:
            raise InvariantBreach("segments do not meet")
        seq.extend(seg[1:])
    return seq


def _assemble(paths: Sequence[Sequence[int]], raw_threads: Sequence[Sequence[int]], untangled=False) -> ThreadedLinkage:
    """Join linkage paths with threads given junction-inclusive; threads are shortcut to paths."""
    seq = list(paths[0])
    spans = [(0, len(seq) - 1)]
    for k, raw in enumerate(raw_threads):
        thread = shortcut_to_path(Walk(tuple(raw)))
        seq.extend(thread[1:-1])
        start = len(seq)
        seq.extend(paths[k + 1])
        spans.append((start, len(seq) - 1))
    return ThreadedLinkage(tuple(seq), tuple(spans), untangled)


def threaded_segments(G: Digraph, ps: PathSystem, i: int, j: int):
    """Forward linkage, backward linkage and the classified pieces of the trimmed walk.

    Each piece is ``(kind, seq)`` with kind ``"forward"``, ``"backward"`` or
    ``"spine"`` (a subpath of ``P_i``); consecutive pieces share their junction
    vertex.
    """
    if i == j:
        raise ValueError("threaded linkages are built for distinct indices")
    fwd = find_disjoint_paths(G, ps.B[i], ps.A[j])
    if fwd is None:
        raise NoLinkage(i, j, "forward")
    bwd = find_disjoint_paths(G, ps.A[j], ps.B[i])
    if bwd is None:
        raise NoLinkage(i, j, "backward")
    spine = ps.paths[i]
    pos = {v: k for k, v in enumerate(spine)}
    f_by_start = {p[0]: p for p in fwd.paths}
    b_by_start = {p[0]: p for p in bwd.paths}

    def rho(p):
        return b_by_start[p[-1]]

    def pi(p):
        return f_by_start[rho(p)[-1]]

    # walking P_i in order, the first unseen path of a cycle is its representative
    cycles, seen = [], set()
    for p in sorted(fwd.paths, key=lambda p: pos[p[0]]):
        if p in seen:
            continue
        cyc = [p]
        seen.add(p)
        q = pi(p)
        while q != p:
            cyc.append(q)
            seen.add(q)
            q = pi(q)
        cycles.append(cyc)

    pieces = []
    for c, cyc in enumerate(cycles):
        if c:
            a, b = pos[cycles[c - 1][0][0]], pos[cyc[0][0]]
            pieces.append(("spine", spine[a:b + 1]))
        for p in cyc:
            pieces.append(("forward", p))
            pieces.append(("backward", rho(p)))
    # trim: drop the final return to the last representative
    pieces.pop()
    return fwd, bwd, pieces


def build_threaded_linkage(G: Digraph, ps: PathSystem, i: int, j: int) -> ThreadedLinkage:
    """Threaded linkage of size b from B_i to A_j through cycle detours along P_i."""
    fwd, _, pieces = threaded_segments(G, ps, i, j)
    raw = _glue([seq for _, seq in pieces])
    # locate the forward paths inside the glued walk
    paths, threads = [], []
    cursor, pending = 0, None
    for kind, seq in pieces:
        length = len(seq) - 1
        if kind == "forward":
            if pending is not None:
                threads.append(raw[pending:cursor + 1])
            paths.append(tuple(seq))
            pending = cursor + length
        cursor += length
    tl = _assemble(paths, threads)
    problems = check_threaded_linkage(G, tl)
    if problems:
        raise InvariantBreach(f"threaded linkage ({i},{j}): {problems[0]}")
    if tl.size != len(fwd):
        raise InvariantBreach(f"threaded linkage ({i},{j}) lost linkage paths in trimming")
    if tl.overlap > 3:
        raise InvariantBreach(f"threaded linkage ({i},{j}) has overlap {tl.overlap} > 3")
    return tl


def _min_end_from(tl: ThreadedLinkage) -> list[float]:
    """For each index p, the smallest end of a span starting at or after p."""
    z = len(tl.walk)
    out = [float("inf")] * (z + 1)
    k = len(tl.spans) - 1
    for p in range(z - 1, -1, -1):
        out[p] = out[p + 1]
        while k >= 0 and tl.spans[k][0] >= p:
            out[p] = min(out[p], tl.spans[k][1])
            k -= 1
    return out


def greedy_useful_walks(tl: ThreadedLinkage, limit: int | None = None) -> list[Span]:
    """Greedy disjoint useful intersections ``(p, q)``, each with the smallest possible q.

    A useful walk ``W[p..q]`` has ``W[p] == W[q]`` (``p < q``) and contains a
    whole linkage span.  For a fixed q the leftmost admissible p is taken.
    """
    W = tl.walk
    min_end = _min_end_from(tl)
    found = []
    start = 0
    while start < len(W) and (limit is None or len(found) < limit):
        first = {}
        for q in range(start, len(W)):
            v = W[q]
            p = first.get(v)
            if p is None:
                first[v] = q
            elif min_end[p] <= q:
                found.append((p, q))
                start = q + 1
                break
        else:
            break
    return found


def has_useful_intersection(tl: ThreadedLinkage) -> bool:
    W, spans = tl.walk, tl.spans
    for p in range(len(W)):
        for q in range(p + 1, len(W)):
            if W[p] == W[q] and any(p <= s and e <= q for s, e in spans):
                return True
    return False


def _spans_inside(spans, lo, hi):
    return [k for k, (s, e) in enumerate(spans) if lo <= s and e <= hi]


def refine_threaded_linkage(tl: ThreadedLinkage, x: int, d: int):
    """Either d anchored closed walks or an untangled threaded linkage of size >= x.

    Returns an :class:`AnchoredWalkFamily` for the first outcome and an
    untangled :class:`ThreadedLinkage` (a subwalk of the input) for the second.
    """
    if x < 1 or d < 1:
        raise ValueError("x and d must be positive")
    if tl.size < x * d + (d - 1):
        raise SizeTooSmall(f"size {tl.size} < x*d + d - 1 = {x * d + d - 1}")
    useful = greedy_useful_walks(tl, limit=d)
    W, spans = tl.walk, tl.spans
    if len(useful) >= d:
        walks, anchors = [], []
        for p, q in useful[:d]:
            k = next(k for k, (s, _) in enumerate(spans) if s >= p)
            walks.append(Walk(W[p:q + 1], closed=True))
            anchors.append(tl.paths[k])
        return AnchoredWalkFamily(tuple(walks), (tuple(anchors),))

    cuts = [q for _, q in useful]
    bounds = []
    lo = 0
    for q in cuts:
        bounds.append((lo, q - 1))
        lo = q + 1
    bounds.append((lo, len(W) - 1))
    best = max(range(len(bounds)), key=lambda t: (len(_spans_inside(spans, *bounds[t])), -t))
    keep = _spans_inside(spans, *bounds[best])
    if len(keep) < x:
        raise InvariantBreach(f"refinement kept {len(keep)} < x = {x} paths")
    base = spans[keep[0]][0]
    sub = ThreadedLinkage(W[base:spans[keep[-1]][1] + 1],
                          tuple((spans[k][0] - base, spans[k][1] - base) for k in keep),
                          untangled=True)
    return sub


def sub_threaded(tl: ThreadedLinkage, keep: Sequence[tuple[int, ...]]) -> ThreadedLinkage:
    """Restrict to the given linkage paths; threads between them are re-shortcut."""
    keep_set = set(keep)
    idx = [k for k, p in enumerate(tl.paths) if p in keep_set]
    if len(idx) != len(keep_set):
        raise ValueError("kept paths must belong to the threaded linkage")
    paths = [tl.paths[k] for k in idx]
    threads = [tl.walk[tl.spans[idx[t]][1]:tl.spans[idx[t + 1]][0] + 1] for t in range(len(idx) - 1)]
    return _assemble(paths, threads, untangled=False)


def check_anchored_family(G: Digraph | None, fam: AnchoredWalkFamily) -> list[str]:
    problems = []
    for k, w in enumerate(fam.walks):
        if not w.closed:
            problems.append(f"walk {k} is not closed")
        if G is not None and not is_walk(G, w.seq):
            problems.append(f"walk {k} uses a non-arc")
    for r, row in enumerate(fam.anchors):
        if len(row) != len(fam.walks):
            problems.append(f"anchor row {r} has the wrong length")
            continue
        if len(set(row)) != len(row):
            problems.append(f"anchor row {r} repeats a path")
        for k, p in enumerate(row):
            if not contains_subwalk(fam.walks[k].seq, p):
                problems.append(f"anchor {r} of walk {k} is not a subwalk")
    return problems


def linkage_of(tl: ThreadedLinkage) -> Linkage:
    paths = tl.paths
    return Linkage(paths, frozenset(p[0] for p in paths), frozenset(p[-1] for p in paths))
