"""Brambles in digraphs: certificates, verification, congestion and order."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .digraph import Digraph, Walk, arcs_of, congestion, is_strongly_connected, is_walk
from .linkage import Violation


@dataclass(frozen=True)
class Bramble:
    """Vertex sets plus optional certificates.

    ``walks[i]`` is a closed walk covering element ``i`` (its arcs certify
    strong connectivity); ``touches[(i, j)]`` is ``("vertex", v)`` or
    ``("arcs", (u, w), (u2, w2))`` with the first arc leaving element i into
    element j and the second going back.
    """

    elements: tuple[frozenset[int], ...]
    walks: tuple = ()
    touches: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(frozenset(e) for e in self.elements))

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def congestion(self) -> int:
        return congestion(self.elements)

    def to_json(self, witnesses: bool = True) -> dict:
        out = {"elements": [sorted(e) for e in self.elements],
               "congestion": self.congestion, "size": self.size}
        if witnesses:
            touch = []
            for (i, j), t in sorted(self.touches.items()):
                if t[0] == "vertex":
                    touch.append([i, j, "vertex", t[1]])
                else:
                    touch.append([i, j, "arcs", *t[1], *t[2]])
            out["witnesses"] = {
                "walks": [list(w.seq) if w is not None else None for w in self.walks],
                "touch": touch,
            }
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Bramble":
        wit = data.get("witnesses") or {}
        walks = tuple(Walk(tuple(w), closed=True) if w else None for w in wit.get("walks", []))
        touches = {}
        for row in wit.get("touch", []):
            i, j, kind = row[0], row[1], row[2]
            if kind == "vertex":
                touches[(i, j)] = ("vertex", row[3])
            else:
                touches[(i, j)] = ("arcs", (row[3], row[4]), (row[5], row[6]))
        return cls(tuple(frozenset(e) for e in data["elements"]), walks, touches)


def touch_witness(G: Digraph, X: frozenset, Y: frozenset):
    common = X & Y
    if common:
        return ("vertex", min(common))
    fwd = next(((u, w) for u in sorted(X) for w in G.out_neighbors(u) if w in Y), None)
    back = next(((u, w) for u in sorted(Y) for w in G.out_neighbors(u) if w in X), None)
    if fwd and back:
        return ("arcs", fwd, back)
    return None


def make_bramble(G: Digraph, elements: Sequence, walks: Sequence[Walk] | None = None) -> Bramble:
    elements = tuple(frozenset(e) for e in elements)
    touches = {}
    for i, j in combinations(range(len(elements)), 2):
        t = touch_witness(G, elements[i], elements[j])
        if t is not None:
            touches[(i, j)] = t
    return Bramble(elements, tuple(walks) if walks is not None else (), touches)


@dataclass
class BrambleReport:
    violations: list[Violation]
    size: int
    congestion: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def verify_bramble(G: Digraph, B: Bramble, claimed: dict | None = None) -> BrambleReport:
    """Check every element and pair from scratch; certificates are audited too.

    ``claimed`` may carry ``size``/``congestion`` values (e.g. from JSON) to be
    compared with the recomputation.
    """
    out: list[Violation] = []
    els = B.elements
    for i, S in enumerate(els):
        if not S:
            out.append(Violation("EmptyElementViolation", i))
            continue
        if any(not (0 <= v < G.n) for v in S):
            out.append(Violation("RangeViolation", i, "vertex outside the graph"))
            continue
        if not is_strongly_connected(G, S):
            out.append(Violation("StrongConnectivityViolation", i))
    for i, w in enumerate(B.walks):
        if w is None or i >= len(els):
            continue
        if not (w.closed and is_walk(G, w.seq) and w.vertices == els[i]):
            out.append(Violation("WitnessViolation", i, "walk certificate does not span the element"))
    for i, j in combinations(range(len(els)), 2):
        X, Y = els[i], els[j]
        if X & Y:
            continue
        fwd = any(w in Y for u in X if 0 <= u < G.n for w in G.out_neighbors(u))
        back = any(w in X for u in Y if 0 <= u < G.n for w in G.out_neighbors(u))
        if not (fwd and back):
            out.append(Violation("TouchingViolation", (i, j)))
    for (i, j), t in B.touches.items():
        if not (0 <= i < len(els) and 0 <= j < len(els)):
            out.append(Violation("WitnessViolation", (i, j), "touch certificate out of range"))
            continue
        X, Y = els[i], els[j]
        if t[0] == "vertex":
            good = t[1] in X and t[1] in Y
        else:
            (u, w), (u2, w2) = t[1], t[2]
            good = (G.has_arc(u, w) and u in X and w in Y and G.has_arc(u2, w2) and u2 in Y and w2 in X)
        if not good:
            out.append(Violation("WitnessViolation", (i, j), "touch certificate is wrong"))
    size, cong = B.size, B.congestion
    if claimed:
        if "size" in claimed and claimed["size"] != size:
            out.append(Violation("MetricViolation", None, f"size {claimed['size']} != {size}"))
        if "congestion" in claimed and claimed["congestion"] != cong:
            out.append(Violation("MetricViolation", None, f"congestion {claimed['congestion']} != {cong}"))
    return BrambleReport(out, size, cong)


# order ----------------------------------------------------------------------

def _disjoint_packing(sets: Sequence[frozenset]) -> int:
    used = set()
    count = 0
    for S in sorted(sets, key=len):
        if not (S & used):
            used |= S
            count += 1
    return count


def _greedy_hitting(sets: Sequence[frozenset]) -> set[int]:
    remaining = list(sets)
    hit = set()
    while remaining:
        freq = {}
        for S in remaining:
            for v in S:
                freq[v] = freq.get(v, 0) + 1
        v = max(freq, key=lambda u: (freq[u], -u))
        hit.add(v)
        remaining = [S for S in remaining if v not in S]
    return hit


def order_bounds(B: Bramble) -> tuple[int, int]:
    """(lower, upper): a disjoint-element packing and a greedy hitting set."""
    sets = [S for S in B.elements if S]
    return _disjoint_packing(sets), len(_greedy_hitting(sets))


def bramble_order(G: Digraph | None, B: Bramble, cap: int = 64) -> int | None:
    """Exact minimum hitting set size by branch and bound; None above ``cap`` elements."""
    sets = list({S for S in B.elements if S})
    if len(B.elements) > cap:
        return None
    if not sets:
        return 0
    best = len(_greedy_hitting(sets))

    def search(remaining, chosen):
        nonlocal best
        if not remaining:
            best = min(best, chosen)
            return
        if chosen + _disjoint_packing(remaining) >= best:
            return
        pivot = min(remaining, key=len)
        freq = {v: sum(1 for S in remaining if v in S) for v in pivot}
        for v in sorted(pivot, key=lambda u: (-freq[u], u)):
            search([S for S in remaining if v not in S], chosen + 1)

    search(sets, 0)
    return best


def load_bramble(path) -> tuple[Bramble, dict]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return Bramble.from_json(data), {k: data[k] for k in ("size", "congestion") if k in data}


def dump_bramble(B: Bramble, path, witnesses: bool = True) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(B.to_json(witnesses), fh)
        fh.write("\n")


def element_arcs(walk: Walk) -> set[tuple[int, int]]:
    return set(arcs_of(walk.seq))
