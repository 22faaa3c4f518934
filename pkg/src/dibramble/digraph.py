"""Directed graphs, walks, and the occurrence / overlap / congestion counts.

Vertices are dense integer ids ``0..n-1``.  Walks are vertex sequences; a
path is simply a walk without repeated vertices and is passed around as a
plain tuple.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptySet, GraphFormatError, InvalidWalk, NotOpenWalk


class Digraph:
    """Immutable simple digraph on vertices ``0..n-1``.

    Self-loops and duplicate arcs are rejected.
    """

    __slots__ = ("n", "arcs", "_out", "_in")

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]]):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        seen = set()
        out = [[] for _ in range(n)]
        inc = [[] for _ in range(n)]
        for u, v in arcs:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"arc ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if (u, v) in seen:
                raise ValueError(f"duplicate arc ({u}, {v})")
            seen.add((u, v))
            out[u].append(v)
            inc[v].append(u)
        self.n = n
        self.arcs = frozenset(seen)
        self._out = tuple(tuple(sorted(x)) for x in out)
        self._in = tuple(tuple(sorted(x)) for x in inc)

    def __repr__(self):
        return f"Digraph(n={self.n}, m={len(self.arcs)})"

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.arcs == other.arcs

    def __hash__(self):
        return hash((self.n, self.arcs))

    @property
    def m(self) -> int:
        return len(self.arcs)

    def out_neighbors(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    def vertices(self) -> range:
        return range(self.n)

    @classmethod
    def bidirected(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Digraph":
        """Each undirected edge becomes a pair of opposite arcs."""
        arcs = set()
        for u, v in edges:
            arcs.add((u, v))
            arcs.add((v, u))
        return cls(n, sorted(arcs))


@dataclass(frozen=True)
class Walk:
    """A vertex sequence; ``closed`` walks begin and end at the same vertex."""

    seq: tuple[int, ...]
    closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "seq", tuple(self.seq))
        if not self.seq:
            raise InvalidWalk("walks are nonempty")
        if self.closed and (len(self.seq) < 2 or self.seq[0] != self.seq[-1]):
            raise InvalidWalk("closed walk must start and end at the same vertex")

    def __len__(self):
        return len(self.seq)

    def __iter__(self):
        return iter(self.seq)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.seq)

    @property
    def first(self) -> int:
        return self.seq[0]

    @property
    def last(self) -> int:
        return self.seq[-1]


def as_walk(w) -> Walk:
    """Accept a Walk or a bare sequence (treated as an open walk)."""
    return w if isinstance(w, Walk) else Walk(tuple(w))


def is_walk(G: Digraph, seq: Sequence[int]) -> bool:
    if not seq:
        return False
    if any(not (0 <= v < G.n) for v in seq):
        return False
    return all(G.has_arc(seq[i], seq[i + 1]) for i in range(len(seq) - 1))


def is_path(G: Digraph, seq: Sequence[int]) -> bool:
    return is_walk(G, seq) and len(set(seq)) == len(seq)


def occurrences(v: int, W) -> int:
    """Number of times ``v`` occurs in ``W``; the basepoint of a closed walk counts once."""
    W = as_walk(W)
    c = W.seq.count(v)
    if W.closed and v == W.seq[0]:
        c -= 1
    return c


def occurrence_counts(W) -> Counter:
    W = as_walk(W)
    counts = Counter(W.seq)
    if W.closed:
        counts[W.seq[0]] -= 1
    return counts


def overlap(walks: Iterable) -> int:
    total = Counter()
    for W in walks:
        total.update(occurrence_counts(W))
    return max(total.values(), default=0)


def congestion(sets: Iterable[Iterable[int]]) -> int:
    """Maximum number of sets containing a single vertex.

    Walks may be passed directly; each contributes its vertex set.
    """
    total = Counter()
    for S in sets:
        if isinstance(S, Walk):
            S = S.vertices
        total.update(set(S))
    return max(total.values(), default=0)


def walk_congestion(walks: Iterable) -> int:
    return congestion(as_walk(W).vertices for W in walks)


def reachable(G: Digraph, start: int, allowed: frozenset | set | None = None, reverse=False) -> set[int]:
    nbrs = G.in_neighbors if reverse else G.out_neighbors
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in nbrs(u):
            if v not in seen and (allowed is None or v in allowed):
                seen.add(v)
                queue.append(v)
    return seen


def is_strongly_connected(G: Digraph, S: Iterable[int]) -> bool:
    """Whether the subgraph induced by ``S`` is strongly connected."""
    S = frozenset(S)
    if not S:
        raise EmptySet("strong connectivity of an empty vertex set is undefined")
    root = min(S)
    return reachable(G, root, S) == S and reachable(G, root, S, reverse=True) == S


def shortcut_to_path(W) -> tuple[int, ...]:
    """Excise loops from an open walk, leftmost first.

    Scanning forward, whenever a vertex recurs later we jump straight to its
    last occurrence.  The result keeps both endpoints and is a subsequence of
    ``W`` whose consecutive pairs were consecutive in ``W``.
    """
    W = as_walk(W)
    if W.closed:
        raise NotOpenWalk("cannot shortcut a closed walk to a path")
    seq = W.seq
    last = {v: i for i, v in enumerate(seq)}
    out = []
    i = 0
    while i < len(seq):
        v = seq[i]
        out.append(v)
        i = last[v] + 1
    return tuple(out)


def splice_closed_walks(walks: Sequence[Walk]) -> Walk:
    """Merge closed walks whose intersection graph is connected into one closed walk.

    Every input walk is inserted, rotated, at a vertex it shares with the
    walks merged so far, so the result visits exactly the union of their
    vertex sets using only their arcs.
    """
    walks = [as_walk(w) for w in walks]
    if not walks:
        raise EmptySet("nothing to splice")
    for w in walks:
        if not w.closed:
            raise InvalidWalk("splice_closed_walks needs closed walks")
    seq = list(walks[0].seq)
    covered = set(seq)
    pending = list(range(1, len(walks)))
    while pending:
        for idx, wi in enumerate(pending):
            w = walks[wi]
            common = covered & w.vertices
            if common:
                break
        else:
            raise InvalidWalk("walks to splice do not form a connected family")
        pending.pop(idx)
        v = min(common)
        body = w.seq[:-1]
        k = body.index(v)
        rotated = body[k:] + body[:k] + (v,)
        pos = seq.index(v)
        seq[pos:pos + 1] = list(rotated)
        covered |= w.vertices
    return Walk(tuple(seq), closed=True)


def arcs_of(seq: Sequence[int]) -> list[tuple[int, int]]:
    return [(seq[i], seq[i + 1]) for i in range(len(seq) - 1)]


# text format ---------------------------------------------------------------

def parse_graph(text: str) -> Digraph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"``; errors carry line numbers."""
    lines = text.split("\n")
    rows = [(no, ln.strip()) for no, ln in enumerate(lines, 1) if ln.strip()]
    if not rows:
        raise GraphFormatError("line 1: missing header 'n m'")
    no, header = rows[0]
    parts = header.split()
    try:
        if len(parts) != 2:
            raise ValueError
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphFormatError(f"line {no}: header must be two integers 'n m'") from None
    if n < 0 or m < 0:
        raise GraphFormatError(f"line {no}: negative count")
    if len(rows) - 1 != m:
        raise GraphFormatError(f"line {no}: header declares {m} arcs, found {len(rows) - 1}")
    seen = set()
    arcs = []
    for no, row in rows[1:]:
        parts = row.split()
        try:
            if len(parts) != 2:
                raise ValueError
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {no}: expected 'u v'") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"line {no}: vertex id out of range [0, {n})")
        if u == v:
            raise GraphFormatError(f"line {no}: self-loop at {u}")
        if (u, v) in seen:
            raise GraphFormatError(f"line {no}: duplicate arc ({u}, {v})")
        seen.add((u, v))
        arcs.append((u, v))
    return Digraph(n, arcs)


def format_graph(G: Digraph) -> str:
    lines = [f"{G.n} {G.m}"]
    lines.extend(f"{u} {v}" for u, v in sorted(G.arcs))
    return "\n".join(lines) + "\n"


def read_graph(path) -> Digraph:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_graph(fh.read())


def write_graph(G: Digraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_graph(G))
