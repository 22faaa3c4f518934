"""From an (a, b)-path system to a bramble of congestion at most 8.

The stages are: a threaded linkage per ordered pair, refinement into closed
walks (the set Z) or untangled linkages, two greedy matchings over pairs
whose linkages intersect densely, bowtie walks along matching edges, and
finally one of the dense or sparse scenarios.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, replace
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, getcontext
from itertools import combinations
from typing import Sequence

from .bowtie import BOWTIE_FACTOR, bowtie
from .bramble import Bramble, verify_bramble
from .combinatorics import (UGraph, bipartite_intersection, degeneracy, independent_transversal,
                            intersection_graph, matched_vertices, maximal_matching)
from .digraph import Digraph, congestion
from .errors import (BrambleError, BudgetExhausted, ClassificationCorrupt, ConstructionGap,
                     InvariantBreach, KTooSmall, NoTransversal, ParamsMismatch, PreconditionUnmet)
from .linkage import PathSystem
from .scenarios import dense_scenario, sparse_scenario, sparse_wrapped
from .threaded import AnchoredWalkFamily, ThreadedLinkage, build_threaded_linkage, refine_threaded_linkage, sub_threaded

getcontext().prec = 60
_E = Decimal(1).exp()
_LN2 = Decimal(2).ln()


def _log2(x) -> Decimal:
    return Decimal(x).ln() / _LN2


def _ceil(x: Decimal) -> int:
    return int(x.to_integral_value(rounding=ROUND_CEILING))


def _floor(x: Decimal) -> int:
    return int(x.to_integral_value(rounding=ROUND_FLOOR))


@dataclass(frozen=True)
class PipelineParams:
    k: int
    a: int
    b: int
    d1: int
    d2: int
    d3: int
    x: int
    refine_d: int
    bowtie_d1: int
    bowtie_d2: int
    bowtie_factor: float = BOWTIE_FACTOR
    sigma: float = 1.0
    seed: int = 0
    c_a: float = 3
    c_kt: float = 1
    c_kk: float = 1  # documentation only
    c_t: float = 0.0  # documentation only
    transversal_budget: int = 100_000
    minor_restarts: int = 32
    notes: tuple = ()

    def to_json(self) -> dict:
        out = asdict(self)
        out["notes"] = list(self.notes)
        return out


def _derived(a: int, b: int, d1: int, d2: int, factor: float, notes: list):
    four_e_a2 = 4 * _E * a * a
    x = _floor(four_e_a2 * d1) + 1
    refine_d = max(1, _ceil(Decimal(d1) / Decimal(repr(factor))))
    if b < x * refine_d + refine_d - 1:
        clamped = max(1, (b - (refine_d - 1)) // refine_d)
        notes.append(f"x lowered from {x} to {clamped} so that b >= x*d + d - 1")
        x = clamped
    bd1 = max(1, _floor(Decimal(d1) / Decimal(repr(factor))))
    bd2 = max(1, _floor(Decimal(d2) / Decimal(repr(factor))))
    return x, refine_d, bd1, bd2


def compute_params(k: int, sigma: float = 1.0, seed: int = 0, c_a: float = 3, c_kt: float = 1,
                   c_kk: float = 1, **overrides) -> PipelineParams:
    """Parameter schedule; sigma scales a, b, d1, d2, d3 (floor, at least 1).

    Keyword overrides (``a``, ``b``, ``d1``, ``d2``, ``d3``, ``bowtie_factor``,
    ...) replace individual values after scaling; x and the bowtie/refine
    sizes are then re-derived.
    """
    if k < 2:
        raise KTooSmall(f"k = {k} < 2")
    if not (0 < sigma <= 1):
        raise ValueError("sigma must lie in (0, 1]")
    lk = _log2(k)
    a = _ceil(Decimal(repr(c_a)) * k * k * (1 + lk).sqrt())
    d3 = _ceil(Decimal(repr(c_kt)) * k * lk.sqrt())
    unit = 2**11 * 5 * _E
    d2 = _ceil(unit * a * a * d3)
    d1 = _ceil(unit * a * a * d2)
    b = _ceil(4 * _E * a * a * d1 * d1)
    vals = {"a": a, "b": b, "d1": d1, "d2": d2, "d3": d3}
    notes = []
    if sigma != 1:
        s = Decimal(repr(sigma))
        vals = {key: max(1, _floor(s * v)) for key, v in vals.items()}
    for key in ("a", "b", "d1", "d2", "d3"):
        new = overrides.pop(key, None)
        if new is not None and int(new) != vals[key]:
            notes.append(f"{key} overridden from {vals[key]} to {int(new)}")
            vals[key] = int(new)
    factor = overrides.pop("bowtie_factor", None) or BOWTIE_FACTOR
    if factor != BOWTIE_FACTOR:
        notes.append(f"bowtie factor set to {factor}")
    if vals["d1"] < vals["d2"]:
        raise ParamsMismatch("d1 must be at least d2")
    x, refine_d, bd1, bd2 = _derived(vals["a"], vals["b"], vals["d1"], vals["d2"], factor, notes)
    c_t = float(2**108 * 5**8 * _E**10 * Decimal(repr(c_kk)) * Decimal(repr(c_kt))**4 * Decimal(repr(c_a))**22)
    extra = {}
    for key in ("transversal_budget", "minor_restarts"):
        value = overrides.pop(key, None)
        if value is not None:
            extra[key] = int(value)
    if overrides:
        raise TypeError(f"unknown parameter overrides: {sorted(overrides)}")
    return PipelineParams(k=k, x=x, refine_d=refine_d, bowtie_d1=bd1, bowtie_d2=bd2,
                          bowtie_factor=factor, sigma=sigma, seed=seed, c_a=c_a, c_kt=c_kt,
                          c_kk=c_kk, c_t=c_t, notes=tuple(notes), **vals, **extra)


def schedule_checks(p: PipelineParams) -> dict[str, bool]:
    """The inequalities the main argument relies on, evaluated exactly."""
    e, a = _E, p.a
    f = Decimal(repr(p.bowtie_factor))
    x_real = 4 * e * a * a * p.d1 + 1
    d = p.refine_d
    return {
        "d1 >= d2": p.d1 >= p.d2,
        "d2 >= d3": p.d2 >= p.d3,
        "d2/(2^9*5) >= 4e a^2 d3": Decimal(p.d2) / f >= 4 * e * a * a * p.d3,
        "d1/(2^9*5) >= 4e a^2 d2": Decimal(p.d1) / f >= 4 * e * a * a * p.d2,
        "d2/(2^9*5) >= 4e (a(a-1)-1) d3": Decimal(p.d2) / f >= 4 * e * (a * (a - 1) - 1) * p.d3,
        "x > 4e a^2 d1": p.x > 4 * e * a * a * p.d1,
        "b >= x d + (d - 1)": p.b >= p.x * d + (d - 1),
        "b >= real x d + (d - 1)": Decimal(p.b) >= x_real * d + (d - 1),
        "b > 4e a^2 d1": Decimal(p.b) > 4 * e * a * a * p.d1,
    }


def t_bound(p: PipelineParams) -> Decimal:
    """c_KK a^2 b^2, the treewidth needed for the path system (reported only)."""
    return Decimal(repr(p.c_kk)) * p.a * p.a * p.b * p.b


# classification ------------------------------------------------------------

Pair = tuple[int, int]


@dataclass
class PairClassification:
    V: list[Pair]
    Z: set[Pair]
    threaded: dict[Pair, ThreadedLinkage]
    walks: dict[Pair, AnchoredWalkFamily]  # Z pairs
    views: dict[Pair, ThreadedLinkage]  # (W', L') for every pair
    E1: set[frozenset]
    E2: set[frozenset]
    M1: set[frozenset]
    M2: set[frozenset]
    edge_walks: dict[frozenset, AnchoredWalkFamily] = field(default_factory=dict)
    edge_order: dict[frozenset, tuple[Pair, Pair]] = field(default_factory=dict)
    final_linkages: dict[Pair, tuple] = field(default_factory=dict)
    gaps: list[str] = field(default_factory=list)

    @property
    def matched1(self) -> set[Pair]:
        return set().union(*self.M1) if self.M1 else set()

    @property
    def matched2(self) -> set[Pair]:
        return set().union(*self.M2) if self.M2 else set()

    def linkage(self, pair: Pair) -> tuple:
        """L' for the pair."""
        return self.views[pair].paths

    def family(self, g) -> AnchoredWalkFamily:
        return self.walks[g] if isinstance(g, tuple) else self.edge_walks[g]

    def anchor(self, g, pair: Pair, idx: int):
        fam = self.family(g)
        if isinstance(g, tuple):
            return fam.anchors[0][idx]
        row = self.edge_order[g].index(pair)
        return fam.anchors[row][idx]

    def summary(self) -> dict:
        return {"V": len(self.V), "Z": len(self.Z), "M1": len(self.M1), "M2": len(self.M2),
                "E1": len(self.E1), "E2": len(self.E2)}


def _bipartite_degeneracy(L1, L2) -> int:
    M = bipartite_intersection(L1, L2)
    if not M.any():
        return 0
    return degeneracy(UGraph.from_biadjacency(M))[0]


def classify_pairs(G: Digraph, ps: PathSystem, params: PipelineParams) -> PairClassification:
    if ps.a != params.a or ps.b != params.b:
        raise ParamsMismatch(f"path system has a={ps.a}, b={ps.b}; parameters say a={params.a}, b={params.b}")
    a = ps.a
    V = [(i, j) for i in range(a) for j in range(a) if i != j]
    Z, threaded, walks, views = set(), {}, {}, {}
    for pair in V:
        try:
            tl = build_threaded_linkage(G, ps, *pair)
            out = refine_threaded_linkage(tl, params.x, params.refine_d)
        except BrambleError as exc:
            raise type(exc)(f"pair {pair}: {exc}") from exc
        threaded[pair] = tl
        if isinstance(out, AnchoredWalkFamily):
            Z.add(pair)
            walks[pair] = out
            views[pair] = sub_threaded(tl, out.anchors[0])
            if len(out) < params.refine_d:
                raise InvariantBreach(f"pair {pair}: {len(out)} walks < {params.refine_d}")
        else:
            if not out.untangled or out.size < params.x:
                raise InvariantBreach(f"pair {pair}: refined linkage too small or tangled")
            views[pair] = out

    E1, E2 = set(), set()
    for u, v in combinations(V, 2):
        deg = _bipartite_degeneracy(views[u].paths, views[v].paths)
        if deg > params.d1:
            E1.add(frozenset((u, v)))
        if deg > params.d2:
            E2.add(frozenset((u, v)))
    if not E1 <= E2:
        raise InvariantBreach("E1 is not contained in E2")

    idx = {p: t for t, p in enumerate(V)}

    def ug(E):
        return UGraph(len(V), [tuple(sorted(idx[p] for p in e)) for e in E])

    zi = {idx[p] for p in Z}
    m1 = maximal_matching(ug(E1), allowed=lambda s, t: s not in zi and t not in zi)
    covered = zi | matched_vertices(m1)
    m2 = maximal_matching(ug(E2), allowed=lambda s, t: not (s in covered and t in covered))
    M1 = {frozenset((V[s], V[t])) for s, t in m1}
    M2 = {frozenset((V[s], V[t])) for s, t in m2}
    pc = PairClassification(V, Z, threaded, walks, views, E1, E2, M1, M2)

    for level, M, d in ((1, M1, params.bowtie_d1), (2, M2, params.bowtie_d2)):
        for e in sorted(M, key=lambda e: sorted(e)):
            u, v = sorted(e)
            try:
                fam = bowtie(views[u], views[v], d, factor=params.bowtie_factor, G=G, labels=(u, v))
            except BrambleError as exc:
                raise type(exc)(f"bowtie on M{level} edge {u}-{v}: {exc}") from exc
            bound = 2 if level == 1 else 4
            if congestion(fam.walks) > bound:
                raise InvariantBreach(f"M{level} edge {u}-{v}: congestion above {bound}")
            pc.edge_walks[e] = fam
            pc.edge_order[e] = (u, v)

    m1v = pc.matched1
    for pair in V:
        if pair in Z:
            pc.final_linkages[pair] = walks[pair].anchors[0]
            continue
        home = next((e for e in M1 if pair in e), None)
        if home is None and pair in pc.matched2:
            home = next(e for e in M2 if pair in e)
        if home is not None:
            row = pc.edge_order[home].index(pair)
            pc.final_linkages[pair] = pc.edge_walks[home].anchors[row]
        else:
            pc.final_linkages[pair] = views[pair].paths
    for pair in V:
        want = None
        if pair in Z or pair in m1v:
            want = params.bowtie_d1 if pair in m1v else params.refine_d
        elif pair in pc.matched2:
            want = params.bowtie_d2
        if want is not None and len(pc.final_linkages[pair]) < want:
            raise InvariantBreach(f"pair {pair}: final linkage has {len(pc.final_linkages[pair])} < {want} paths")
    return pc


def case_counts(V: Sequence[Pair], Z, M1, M2) -> tuple[int, int, int]:
    V = set(V)
    m1 = set().union(*M1) if M1 else set()
    m2 = set().union(*M2) if M2 else set()
    c1 = len(V - (m1 | set(Z)))
    c2 = len(m1 | m2 | set(Z))
    c3 = len(V - m2)
    return c1, c2, c3


def _check_matching(M, name):
    seen = set()
    for e in M:
        if len(e) != 2:
            raise ClassificationCorrupt(f"{name} has an edge that is not a pair")
        if seen & set(e):
            raise ClassificationCorrupt(f"{name} is not a matching")
        seen |= set(e)


def case_analysis(V: Sequence[Pair], Z, M1, M2) -> int:
    """First case whose 0.6|V| threshold holds (1, 2 or 3)."""
    Vs = set(V)
    _check_matching(M1, "M1")
    _check_matching(M2, "M2")
    m1 = set().union(*M1) if M1 else set()
    m2 = set().union(*M2) if M2 else set()
    if not (set(Z) | m1 | m2) <= Vs:
        raise ClassificationCorrupt("classification mentions pairs outside V")
    if set(Z) & m1:
        raise ClassificationCorrupt("Z meets V(M1)")
    if set(M1) & set(M2):
        raise ClassificationCorrupt("M1 and M2 share an edge")
    covered = set(Z) | m1
    for e in M2:
        if len(set(e) & covered) > 1:
            raise ClassificationCorrupt("an M2 edge has both ends in V(M1) or Z")
    c1, c2, c3 = case_counts(V, Z, M1, M2)
    n = len(Vs)
    if 2 * c1 + 2 * c2 + c3 < 3 * n:
        raise ClassificationCorrupt(f"counting inequality fails: 2*{c1} + 2*{c2} + {c3} < 3*{n}")
    for case, c in ((1, c1), (2, c2), (3, c3)):
        if 5 * c >= 3 * n:
            return case
    raise ClassificationCorrupt("no case fires")


def firing_cases(V, Z, M1, M2) -> list[int]:
    c = case_counts(V, Z, M1, M2)
    n = len(set(V))
    return [t + 1 for t in range(3) if 5 * c[t] >= 3 * n]


# dispatch ------------------------------------------------------------------

@dataclass
class RunResult:
    bramble: Bramble
    report: dict


def _groups(pc: PairClassification) -> list:
    return sorted(pc.Z) + sorted(pc.M1, key=lambda e: sorted(e)) + sorted(pc.M2, key=lambda e: sorted(e))


def _label(g):
    return list(g) if isinstance(g, tuple) else [list(p) for p in sorted(g)]


def _dense_guard(G, pc: PairClassification, params: PipelineParams, log: list):
    groups = _groups(pc)
    candidates = [[g] for g in groups] + [[g, h] for g, h in combinations(groups, 2)]
    for F in candidates:
        walks = [w for g in F for w in pc.family(g).walks]
        deg = degeneracy(intersection_graph(walks))[0]
        if deg <= params.d3:
            continue
        entry = {"F": [_label(g) for g in F], "degeneracy": deg}
        cong = congestion(walks)
        if cong > 8:
            raise InvariantBreach(f"walk family for {entry['F']} has congestion {cong} > 8")
        B = dense_scenario(G, walks, params.k, params.d3, seed=params.seed)
        entry["minor_found"] = B is not None
        log.append(entry)
        if B is not None:
            return B, entry
    return None, None


def _case2(G, ps, pc: PairClassification, params: PipelineParams, info: dict) -> Bramble:
    groups = _groups(pc)
    nodes, classes, holders = [], [], {}
    for g in groups:
        cls = []
        for t, w in enumerate(pc.family(g).walks):
            idx = len(nodes)
            nodes.append((g, t))
            cls.append(idx)
            for v in w.vertices:
                holders.setdefault(v, []).append(idx)
        classes.append(cls)
    owner = {idx: c for c, cls in enumerate(classes) for idx in cls}
    edges = set()
    for hs in holders.values():
        for s, t in combinations(hs, 2):
            if owner[s] != owner[t]:
                edges.add((min(s, t), max(s, t)))
    pick = independent_transversal(UGraph(len(nodes), edges), classes, seed=params.seed,
                                   budget=params.transversal_budget)
    if pick is None:
        raise NoTransversal("no disjoint choice of one walk per family")
    chosen = {nodes[idx][0]: nodes[idx][1] for idx in pick}
    pool = sorted(set(pc.Z) | pc.matched1 | pc.matched2)
    need = -(-3 * len(pc.V) // 5)
    I = pool[:need]
    Q = {}
    for pair in I:
        if pair in pc.Z:
            g = pair
        else:
            g = next((e for e in pc.M1 if pair in e), None) or next(e for e in pc.M2 if pair in e)
        Q[pair] = pc.anchor(g, pair, chosen[g])
    if congestion(Q.values()) > 2:
        raise InvariantBreach("chosen anchor paths have congestion above 2")
    info["I"] = len(I)
    return sparse_scenario(G, ps, I, Q, alpha=2, seed=params.seed, info=info)


def _run_case(case, G, ps, pc: PairClassification, params: PipelineParams, info: dict) -> Bramble:
    m1v = pc.matched1
    if case == 1:
        I = [p for p in pc.V if p not in m1v and p not in pc.Z]
        idx = set(I)
        for e in pc.E1:
            if e <= idx:
                raise InvariantBreach("case 1 pairs are not independent in H1")
        L = {p: pc.views[p].paths for p in I}
        info["I"] = len(I)
        return sparse_wrapped(G, ps, I, L, params.d1, seed=params.seed,
                              budget=params.transversal_budget, info=info)
    if case == 2:
        return _case2(G, ps, pc, params, info)
    I = [p for p in pc.V if p not in pc.matched2]
    L = {p: pc.final_linkages[p] for p in I}
    info["I"] = len(I)
    return sparse_wrapped(G, ps, I, L, params.d2, seed=params.seed,
                          budget=params.transversal_budget, info=info)


CASE_BOUND = {1: 4, 2: 6, 3: 4, "dense": 8}


def run_pipeline(G: Digraph, ps: PathSystem, params: PipelineParams) -> RunResult:
    start = time.perf_counter()
    pc = classify_pairs(G, ps, params)
    log: list = []
    report = {"seed": params.seed, "params": params.to_json(), **{f"size_{k}": v for k, v in pc.summary().items()},
              "dense_checks": log, "attempts": [], "gaps": list(pc.gaps)}
    B, entry = _dense_guard(G, pc, params, log)
    taken = None
    if B is not None:
        taken = "dense"
    else:
        first = case_analysis(pc.V, pc.Z, pc.M1, pc.M2)
        report["first_case"] = first
        order = [first] + [c for c in firing_cases(pc.V, pc.Z, pc.M1, pc.M2) if c != first]
        for case in order:
            info: dict = {"case": case}
            try:
                B = _run_case(case, G, ps, pc, params, info)
            except (BudgetExhausted, NoTransversal, PreconditionUnmet, ConstructionGap) as exc:
                info["error"] = f"{type(exc).__name__}: {exc}"
                report["attempts"].append(info)
                if isinstance(exc, ConstructionGap):
                    report["gaps"].append(info["error"])
                continue
            except BrambleError as exc:
                info["error"] = f"{type(exc).__name__}: {exc}"
                report["attempts"].append(info)
                continue
            report["attempts"].append(info)
            taken = case
            break
    if B is None:
        raise ConstructionGap(f"no scenario produced a bramble; attempts: {report['attempts']}")
    vr = verify_bramble(G, B)
    if not vr.ok:
        raise InvariantBreach(f"final bramble failed verification: {vr.violations[0]}")
    if B.congestion > CASE_BOUND[taken]:
        raise InvariantBreach(f"final congestion {B.congestion} exceeds {CASE_BOUND[taken]}")
    report.update({
        "case": taken, "bramble_size": B.size, "congestion": B.congestion,
        "shortfall": B.size < params.k, "seconds": round(time.perf_counter() - start, 4),
    })
    return RunResult(B, report)


def params_for_system(ps: PathSystem, k: int, sigma: float = 1.0, seed: int = 0, **overrides) -> PipelineParams:
    """compute_params with a and b taken from the path system unless overridden."""
    overrides.setdefault("a", ps.a)
    overrides.setdefault("b", ps.b)
    return compute_params(k, sigma=sigma, seed=seed, **overrides)


def with_seed(params: PipelineParams, seed: int) -> PipelineParams:
    return replace(params, seed=seed)
