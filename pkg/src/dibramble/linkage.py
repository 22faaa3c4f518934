"""Vertex-disjoint routing, well-linked sets and (a, b)-path systems."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .digraph import Digraph, is_path
from .errors import SizeMismatch, TooLargeForExhaustive

WELL_LINKED_BOUND = 12


@dataclass(frozen=True)
class Linkage:
    paths: tuple[tuple[int, ...], ...]
    sources: frozenset[int]
    sinks: frozenset[int]

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


def check_linkage(G: Digraph, L: Linkage) -> list[str]:
    """Independent audit of a linkage; returns human-readable problems."""
    problems = []
    used: dict[int, int] = {}
    starts, ends = set(), set()
    for idx, p in enumerate(L.paths):
        if not is_path(G, p):
            problems.append(f"path {idx} is not a path of G")
            continue
        for v in p:
            if v in used:
                problems.append(f"paths {used[v]} and {idx} share vertex {v}")
            used[v] = idx
        if p[0] not in L.sources:
            problems.append(f"path {idx} does not start in the sources")
        if p[-1] not in L.sinks:
            problems.append(f"path {idx} does not end in the sinks")
        starts.add(p[0])
        ends.add(p[-1])
    if len(starts) != len(L.paths) or len(ends) != len(L.paths):
        problems.append("endpoints are not distinct")
    return problems


def _max_flow_paths(G: Digraph, A: Sequence[int], B: Sequence[int], removed: frozenset, want: int):
    # vertex v is split into 2v (in) and 2v+1 (out); S, T are the two extra nodes
    n = G.n
    S, T = 2 * n, 2 * n + 1
    cap: dict[tuple[int, int], int] = {}
    adj: dict[int, set[int]] = {}

    def add(x, y):
        cap[(x, y)] = cap.get((x, y), 0) + 1
        cap.setdefault((y, x), 0)
        adj.setdefault(x, set()).add(y)
        adj.setdefault(y, set()).add(x)

    for a in A:
        add(S, 2 * a)
    for v in range(n):
        if v in removed:
            continue
        add(2 * v, 2 * v + 1)
        for w in G.out_neighbors(v):
            if w not in removed:
                add(2 * v + 1, 2 * w)
    for b in B:
        add(2 * b + 1, T)
    order = {x: sorted(ys) for x, ys in adj.items()}

    flow = 0
    while flow < want:
        parent = {S: None}
        queue = deque([S])
        while queue and T not in parent:
            x = queue.popleft()
            for y in order.get(x, ()):
                if y not in parent and cap[(x, y)] > 0:
                    parent[y] = x
                    queue.append(y)
        if T not in parent:
            break
        y = T
        while parent[y] is not None:
            x = parent[y]
            cap[(x, y)] -= 1
            cap[(y, x)] += 1
            y = x
        flow += 1

    def carries(x, y):
        # original edges have capacity 1, so flow 1 means residual 0 forward
        return (x, y) in cap and cap[(y, x)] > 0 and _is_original(x, y)

    def _is_original(x, y):
        if x == S:
            return True
        if y == T:
            return True
        if x < 2 * n and y < 2 * n:
            if x % 2 == 0:
                return y == x + 1
            return y % 2 == 0 and y != x - 1
        return False

    paths = []
    for a in sorted(A):
        if not carries(S, 2 * a):
            continue
        path = [a]
        node = 2 * a + 1
        while True:
            nxt = [y for y in order[node] if carries(node, y)]
            y = nxt[0]
            if y == T:
                break
            v = y // 2
            path.append(v)
            node = 2 * v + 1
        paths.append(tuple(path))
    return flow, paths


def disjoint_path_count(G: Digraph, A: Iterable[int], B: Iterable[int], removed: Iterable[int] = ()) -> int:
    """Maximum number of vertex-disjoint A-B paths in G - removed."""
    A, B = sorted(set(A)), sorted(set(B))
    flow, _ = _max_flow_paths(G, A, B, frozenset(removed), want=len(A))
    return flow


def find_disjoint_paths(G: Digraph, A: Iterable[int], B: Iterable[int], removed: Iterable[int] = ()) -> Linkage | None:
    """|A| vertex-disjoint A-B paths avoiding ``removed``, or None.

    A vertex lying in both A and B is a one-vertex path.  Augmenting paths are
    found breadth-first over sorted neighbour lists, so the output is
    deterministic.
    """
    A, B = frozenset(A), frozenset(B)
    removed = frozenset(removed)
    if len(A) != len(B):
        raise SizeMismatch(f"|A|={len(A)} but |B|={len(B)}")
    if (A | B) & removed:
        raise ValueError("endpoint sets must avoid the removed vertices")
    flow, paths = _max_flow_paths(G, sorted(A), sorted(B), removed, want=len(A))
    if flow < len(A):
        return None
    return Linkage(tuple(paths), A, B)


_PRIME = 2**31 - 1


def _mod_inv(x: np.ndarray) -> np.ndarray:
    out = np.ones_like(x)
    base, e = x % _PRIME, _PRIME - 2
    while e:
        if e & 1:
            out = out * base % _PRIME
        base = base * base % _PRIME
        e >>= 1
    return out


def _solve_mod(M: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    """M^{-1} rhs over GF(p), or None when M is singular."""
    n = M.shape[0]
    aug = np.concatenate([M, rhs], axis=1) % _PRIME
    for col in range(n):
        nz = np.nonzero(aug[col:, col])[0]
        if nz.size == 0:
            return None
        r = col + int(nz[0])
        if r != col:
            aug[[col, r]] = aug[[r, col]]
        aug[col] = aug[col] * _mod_inv(aug[col, col]) % _PRIME
        f = aug[:, col].copy()
        f[col] = 0
        aug = (aug - f[:, None] * aug[col][None, :]) % _PRIME
    return aug[:, n:]


def _batch_nonsingular(mats: np.ndarray) -> np.ndarray:
    """Which of a stack of square matrices over GF(p) are nonsingular."""
    M = mats % _PRIME
    N, s, _ = M.shape
    ok = np.ones(N, dtype=bool)
    rows = np.arange(N)
    for col in range(s):
        nz = M[:, col:, col] != 0
        has = nz.any(axis=1)
        ok &= has
        piv = col + nz.argmax(axis=1)
        top = M[rows, col].copy()
        M[rows, col] = M[rows, piv]
        M[rows, piv] = top
        inv = _mod_inv(M[:, col, col])
        for r in range(col + 1, s):
            f = M[:, r, col] * inv % _PRIME
            M[:, r] = (M[:, r] - f[:, None] * M[:, col]) % _PRIME
    return ok


def _terminal_schur(G: Digraph, X: Sequence[int], rng: np.random.Generator) -> np.ndarray | None:
    """Random Schur complement whose minors S[A, B] decide the linkage tests.

    Rows are U = core + A, columns core + B, entry (v, u) random when u == v
    (core only) or (v, u) is an arc.  A perfect matching of that bipartite
    graph is the same thing as |A| disjoint A-B paths with interiors in the
    core, and its determinant factors as det(R_CC) * det(S[A, B]).
    """
    Xs = set(X)
    core = [v for v in range(G.n) if v not in Xs]
    pos = {v: t for t, v in enumerate(core)}
    tpos = {v: t for t, v in enumerate(X)}
    c, x = len(core), len(X)

    def w():
        return int(rng.integers(1, _PRIME))

    R_CC = np.zeros((c, c), dtype=np.int64)
    R_CX = np.zeros((c, x), dtype=np.int64)
    R_XC = np.zeros((x, c), dtype=np.int64)
    R_XX = np.zeros((x, x), dtype=np.int64)
    for v in core:
        R_CC[pos[v], pos[v]] = w()
    for u, v in sorted(G.arcs):
        if u in pos and v in pos:
            R_CC[pos[u], pos[v]] = w()
        elif u in pos:
            R_CX[pos[u], tpos[v]] = w()
        elif v in pos:
            R_XC[tpos[u], pos[v]] = w()
        else:
            R_XX[tpos[u], tpos[v]] = w()
    if c == 0:
        return R_XX
    Y = _solve_mod(R_CC, R_CX)
    if Y is None:
        return None
    prod = np.zeros((x, x), dtype=np.int64)
    for t in range(c):  # row-by-row keeps every product below 2^62
        prod = (prod + R_XC[:, t][:, None] * Y[t][None, :]) % _PRIME
    return (R_XX - prod) % _PRIME


def is_well_linked(G: Digraph, X: Iterable[int], bound: int = WELL_LINKED_BOUND, seed: int = 0) -> bool:
    """Exhaustive well-linkedness test over all disjoint equal-size A, B in X.

    Pairs with A and B intersecting reduce to the disjoint case: shared
    vertices are forced to be one-vertex paths.  Each pair is first screened
    by a random minor over GF(p) (nonzero certifies the linkage); every zero
    is re-decided by max-flow, so the answer is exact.
    """
    X = sorted(set(X))
    if len(X) > bound:
        raise TooLargeForExhaustive(f"|X|={len(X)} exceeds exhaustive bound {bound}")
    from .combinatorics import make_rng
    S = None
    for attempt in range(3):
        S = _terminal_schur(G, X, make_rng(seed, 0x5711, attempt))
        if S is not None:
            break
    Xs = frozenset(X)
    idx = range(len(X))
    for size in range(1, len(X) // 2 + 1):
        pairs = [(A, B) for A in combinations(idx, size)
                 for B in combinations([t for t in idx if t not in A], size)]
        if S is not None:
            rows = np.array([A for A, _ in pairs], dtype=np.intp)
            cols = np.array([B for _, B in pairs], dtype=np.intp)
            certified = _batch_nonsingular(S[rows[:, :, None], cols[:, None, :]])
        else:
            certified = np.zeros(len(pairs), dtype=bool)
        for (A, B), good in zip(pairs, certified):
            if good:
                continue
            A_v, B_v = [X[t] for t in A], [X[t] for t in B]
            removed = Xs.difference(A_v, B_v)
            if disjoint_path_count(G, A_v, B_v, removed) < size:
                return False
    return True


@dataclass(frozen=True)
class PathSystem:
    paths: tuple[tuple[int, ...], ...]
    A: tuple[frozenset[int], ...]
    B: tuple[frozenset[int], ...]
    well_linked_verified: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(tuple(p) for p in self.paths))
        object.__setattr__(self, "A", tuple(frozenset(s) for s in self.A))
        object.__setattr__(self, "B", tuple(frozenset(s) for s in self.B))

    @property
    def a(self) -> int:
        return len(self.paths)

    @property
    def b(self) -> int:
        return len(self.A[0]) if self.A else 0

    @property
    def terminals(self) -> frozenset[int]:
        out = set()
        for s in self.A + self.B:
            out |= s
        return frozenset(out)

    def position(self, i: int) -> dict[int, int]:
        return {v: k for k, v in enumerate(self.paths[i])}

    def to_json(self) -> dict:
        return {
            "paths": [list(p) for p in self.paths],
            "A": [sorted(s, key=self.position(i).get) for i, s in enumerate(self.A)],
            "B": [sorted(s, key=self.position(i).get) for i, s in enumerate(self.B)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PathSystem":
        return cls(
            tuple(tuple(p) for p in data["paths"]),
            tuple(frozenset(s) for s in data["A"]),
            tuple(frozenset(s) for s in data["B"]),
        )


@dataclass(frozen=True)
class Violation:
    kind: str
    index: object = None
    detail: str = ""

    def __str__(self):
        where = "" if self.index is None else f"({self.index})"
        return f"{self.kind}{where}: {self.detail}" if self.detail else f"{self.kind}{where}"


@dataclass
class ValidationReport:
    violations: list[Violation]
    well_linked: bool | None  # None: not checked, asserted by construction

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def validate_path_system(G: Digraph, ps: PathSystem, exhaustive: bool = False,
                         bound: int = WELL_LINKED_BOUND) -> ValidationReport:
    out: list[Violation] = []
    if len(ps.A) != ps.a or len(ps.B) != ps.a:
        out.append(Violation("ShapeViolation", None, "need one A and one B set per path"))
        return ValidationReport(out, None)
    owner: dict[int, int] = {}
    for i, p in enumerate(ps.paths):
        if not is_path(G, p):
            out.append(Violation("PathViolation", i, "not a path of G"))
        for v in p:
            if v in owner and owner[v] != i:
                out.append(Violation("DisjointnessViolation", (owner[v], i), f"share vertex {v}"))
            owner.setdefault(v, i)
    b = ps.b
    for i in range(ps.a):
        Ai, Bi = ps.A[i], ps.B[i]
        if len(Ai) != b or len(Bi) != b:
            out.append(Violation("SizeViolation", i, f"|A|={len(Ai)}, |B|={len(Bi)}, expected {b}"))
        pos = ps.position(i)
        if not (Ai <= pos.keys() and Bi <= pos.keys()):
            out.append(Violation("MembershipViolation", i, "terminal not on its path"))
            continue
        if Ai & Bi:
            out.append(Violation("IntersectionViolation", i, "A and B share a vertex"))
        if Ai and Bi and max(pos[v] for v in Ai) >= min(pos[v] for v in Bi):
            out.append(Violation("OrderViolation", i, "a B vertex precedes an A vertex"))
    well_linked = None
    if exhaustive and len(ps.terminals) <= bound and not out:
        well_linked = is_well_linked(G, ps.terminals, bound)
        if not well_linked:
            out.append(Violation("WellLinkednessViolation", None, "terminal set is not well-linked"))
    return ValidationReport(out, well_linked)


def load_path_system(path, G: Digraph | None = None):
    """Read PathSystem JSON; with a graph, also return the non-exhaustive report."""
    with open(path, encoding="utf-8") as fh:
        ps = PathSystem.from_json(json.load(fh))
    if G is None:
        return ps
    return ps, validate_path_system(G, ps, exhaustive=False)


def dump_path_system(ps: PathSystem, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(ps.to_json(), fh)
        fh.write("\n")
