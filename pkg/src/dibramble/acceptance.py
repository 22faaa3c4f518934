"""The acceptance suite: nine numbered checks, each returning a Result.

Shared by ``tests/test_acceptance.py`` and ``dibramble selftest``.  Every
check runs at its stated tolerance; nothing is relaxed to make it pass.
"""
from __future__ import annotations

import json
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import oracles
from .bowtie import bowtie, congestion_bound
from .bramble import Bramble, bramble_order, load_bramble, verify_bramble
from .combinatorics import (UGraph, check_partition, degeneracy, make_rng, matched_vertices,
                            maximal_matching, partition_bipartite)
from .digraph import Digraph, congestion, overlap
from .generators import (bidirected_grid, bridge_gadget, complete_digraph, gen_grid_path_system,
                         grid_line_walks, hub_walks, random_threaded_linkage, snake_columns,
                         snake_rows, tangled_columns, tangled_rows)
from .linkage import is_well_linked
from .pipeline import case_analysis, case_counts, compute_params, schedule_checks
from .scenarios import dense_scenario, sparse_scenario, sparse_wrapped
from .threaded import (AnchoredWalkFamily, ThreadedLinkage, build_threaded_linkage,
                       check_anchored_family, check_threaded_linkage, contains_subwalk,
                       refine_threaded_linkage)


@dataclass
class Result:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(number, name, fn):
    start = time.perf_counter()
    try:
        passed, detail, data = fn()
    except Exception as exc:  # a crash is a failure of the criterion, reported as such
        passed, detail, data = False, f"raised {type(exc).__name__}: {exc}", {}
    return Result(number, name, passed, detail, time.perf_counter() - start, data)


# 1 ---------------------------------------------------------------------------

def grid_systems(count: int = 54, seed: int = 1):
    """Deterministic mix of grid sizes, a, b and row placements (rows at least 2 apart).

    Returns ``(systems, rejected)``: configurations whose terminals fail the
    exhaustive well-linkedness check are not path systems and are set aside.
    """
    rng = make_rng(seed, 1)
    configs = []
    for g in range(4, 11):
        for a in (2, 3):
            for b in (1, 2, 3):
                if 2 * b <= g and 2 * a - 1 <= g:
                    configs.append((g, a, b, None))
    systems, rejected = [], []
    pending = iter(configs)
    while len(systems) < count:
        cfg = next(pending, None)
        if cfg is None:
            g = int(rng.integers(5, 11))
            a = int(rng.integers(2, 4))
            b = int(rng.integers(1, min(3, g // 2) + 1))
            slots = g - 2 * (a - 1)
            base = sorted(rng.choice(slots, size=a, replace=True).tolist())
            cfg = (g, a, b, tuple(base[t] + 2 * t for t in range(a)))
        try:
            G, ps = gen_grid_path_system(*cfg[:3], rows=cfg[3])
        except ValueError:
            rejected.append(cfg)
            continue
        systems.append((cfg, G, ps))
    return systems, rejected


def criterion_1(count: int = 54, seed: int = 1) -> Result:
    def run():
        start = time.perf_counter()
        pairs = worst = 0
        bad = []
        systems, rejected = grid_systems(count, seed)
        for (g, a, b, rows), G, ps in systems:
            for i in range(a):
                for j in range(a):
                    if i == j:
                        continue
                    tl = build_threaded_linkage(G, ps, i, j)
                    pairs += 1
                    worst = max(worst, tl.overlap)
                    problems = check_threaded_linkage(G, tl)
                    if tl.overlap > 3 or problems or tl.size != b:
                        bad.append((g, a, b, rows, i, j, tl.overlap, problems[:1]))
        secs = time.perf_counter() - start
        ok = len(systems) >= 50 and not bad and secs < 10
        detail = (f"{len(systems)} systems ({len(rejected)} non-well-linked configs skipped), {pairs} pairs, "
                  f"max overlap {worst}, {len(bad)} failures, {secs:.2f}s < 10s")
        return ok, detail, {"systems": len(systems), "pairs": pairs, "max_overlap": worst, "failures": bad}
    return _timed(1, "threaded-linkage law", run)


# 2 ---------------------------------------------------------------------------

def check_refinement(tl: ThreadedLinkage, x: int, d: int, out, G: Digraph | None = None) -> list[str]:
    """Both clauses of the refinement dichotomy, audited from scratch."""
    problems = []
    if isinstance(out, AnchoredWalkFamily):
        if len(out) < d:
            problems.append(f"{len(out)} walks < d = {d}")
        problems += check_anchored_family(G, out)
        if overlap(out.walks) > tl.overlap:
            problems.append(f"walk overlap {overlap(out.walks)} > input overlap {tl.overlap}")
        paths = set(tl.paths)
        for k, p in enumerate(out.anchors[0]):
            if p not in paths:
                problems.append(f"anchor {k} is not a linkage path")
        for w in out.walks:
            if not contains_subwalk(tl.walk, w.seq):
                problems.append("a walk is not a subwalk of the input")
    elif isinstance(out, ThreadedLinkage):
        if not out.untangled:
            problems.append("second outcome is not flagged untangled")
        if out.size < x:
            problems.append(f"size {out.size} < x = {x}")
        problems += check_threaded_linkage(G, out)
        if not contains_subwalk(tl.walk, out.walk):
            problems.append("refined linkage is not a subwalk of the input")
        if not set(out.paths) <= set(tl.paths):
            problems.append("refined linkage has foreign paths")
    else:
        problems.append(f"unexpected output type {type(out).__name__}")
    return problems


@lru_cache(maxsize=None)
def _grid_system(g: int, a: int, b: int):
    return gen_grid_path_system(g, a, b)


def refine_trials(trials: int = 240, seed: int = 2):
    """Random threaded linkages on complete digraphs plus grid-built ones."""
    rng = make_rng(seed, 2)
    out = []
    for t in range(trials):
        if t % 6 == 5:
            g = int(rng.integers(6, 11))
            b = int(rng.integers(2, min(3, (g - 1) // 2) + 1))
            G, ps = _grid_system(g, 2, b)
            i = int(rng.integers(0, 2))
            tl = build_threaded_linkage(G, ps, i, 1 - i)
        else:
            n = int(rng.integers(12, 40))
            size = int(rng.integers(2, 9))
            max_path = max(1, min(4, n // size))
            tl = random_threaded_linkage(rng, n, size, max_path=max_path, max_thread=int(rng.integers(0, 7)))
            G = complete_digraph(n)
        d = int(rng.integers(1, 4))
        while d > 1 and tl.size < 2 * d - 1:
            d -= 1
        x = int(rng.integers(1, (tl.size - (d - 1)) // d + 1))
        out.append((G, tl, x, d))
    return out


def criterion_2(trials: int = 240, seed: int = 2) -> Result:
    def run():
        counts = {"walks": 0, "untangled": 0}
        failures = []
        for G, tl, x, d in refine_trials(trials, seed):
            try:
                res = refine_threaded_linkage(tl, x, d)
            except Exception as exc:
                failures.append(f"{type(exc).__name__}: {exc}")
                continue
            problems = check_refinement(tl, x, d, res, G)
            counts["walks" if isinstance(res, AnchoredWalkFamily) else "untangled"] += 1
            if problems:
                failures.append(problems[0])
        ok = trials >= 200 and not failures
        detail = (f"{trials} trials, {counts['walks']} closed-walk outcomes, "
                  f"{counts['untangled']} untangled outcomes, {len(failures)} exceptions/violations")
        return ok, detail, {"counts": counts, "failures": failures[:5]}
    return _timed(2, "refinement dichotomy", run)


# 3 ---------------------------------------------------------------------------

def bowtie_cases(n: int = 12):
    return [
        ("both untangled", snake_rows(n), snake_columns(n)),
        ("first untangled, second overlap 3", snake_rows(n), tangled_columns(n)),
        ("second untangled, first overlap 3", tangled_rows(n), snake_columns(n)),
        ("both tangled", tangled_rows(n), tangled_columns(n)),
    ]


def criterion_3(n: int = 12) -> Result:
    def run():
        G = bidirected_grid(n)
        rows, ok = [], True
        for name, tl1, tl2 in bowtie_cases(n):
            for d in (1, 2):
                fam = bowtie(tl1, tl2, d, factor=1, G=G)
                measured = congestion(fam.walks)
                bound = congestion_bound(tl1, tl2)
                if tl1.untangled and tl2.untangled:
                    expected = 2
                elif tl1.untangled:
                    expected = tl2.overlap + 1
                elif tl2.untangled:
                    expected = tl1.overlap + 1
                else:
                    expected = tl1.overlap + tl2.overlap
                anchors_ok = (not check_anchored_family(G, fam) and len(fam) == d
                              and all(p in set(tl1.paths) for p in fam.anchors[0])
                              and all(p in set(tl2.paths) for p in fam.anchors[1]))
                good = measured <= expected == bound and anchors_ok
                ok &= good
                rows.append({"case": name, "d": d, "alpha": tl1.overlap, "beta": tl2.overlap,
                             "congestion": measured, "bound": expected, "anchors": anchors_ok})
        table = "; ".join(f"{r['case']} d={r['d']}: {r['congestion']}<={r['bound']}" for r in rows)
        return ok, table, {"rows": rows}
    return _timed(3, "bowtie congestion table", run)


# 4 ---------------------------------------------------------------------------

def criterion_4(cases=((2, 1), (2, 2), (5, 1))) -> Result:
    def run():
        start = time.perf_counter()
        ok, notes = True, []
        for r, k in cases:
            m = 2**9 * r * k
            M = np.ones((m, m), dtype=bool)
            parts = partition_bipartite(M, k, r)
            problems = check_partition(M, parts, k, r)
            ok &= not problems and len(parts) == k
            notes.append(f"(r={r},k={k},m={m}): {len(parts)} pairs, {len(problems)} problems")
        secs = time.perf_counter() - start
        ok &= secs < 30
        return ok, "; ".join(notes) + f"; {secs:.2f}s < 30s", {}
    return _timed(4, "segment partition clauses", run)


# 5 ---------------------------------------------------------------------------

def bridge_choice(a: int, b: int, forward: dict, symmetric: bool) -> dict:
    """One forward bridge per ordered pair.

    Unsymmetric choices use index (j - i) mod a, so paths are pairwise
    disjoint.  Symmetric ones give (i, j) and (j, i) the same index, so with
    shared hubs each hub is used twice.
    """
    index = {frozenset(e): t for t, e in enumerate(combinations(range(a), 2))}
    P = {}
    for (i, j), bridges in forward.items():
        t = index[frozenset((i, j))] if symmetric else (j - i) % a
        if t >= b:
            raise ValueError("gadget too narrow for the bridge choice")
        P[(i, j)] = bridges[t]
    return P


def criterion_5() -> Result:
    def run():
        lines, ok = [], True
        for a, alpha in ((3, 1), (4, 1), (5, 1), (3, 2), (4, 2), (5, 2)):
            b = max(a, a * (a - 1) // 2)
            G, ps, fw = bridge_gadget(a, b, shift=1, shared_hubs=(alpha == 2))
            P = bridge_choice(a, b, fw, symmetric=(alpha == 2))
            measured_alpha = congestion(P.values())
            B = sparse_scenario(G, ps, list(P), P, alpha=alpha)
            good = verify_bramble(G, B).ok and B.congestion <= 2 + 2 * alpha and measured_alpha <= alpha
            ok &= good
            lines.append(f"sparse a={a} alpha={measured_alpha}: size {B.size}, congestion {B.congestion}<={2 + 2 * alpha}")
        for a, b in ((3, 6), (4, 8)):
            G, ps, fw = bridge_gadget(a, b, shift=1)
            L = {pair: bridges for pair, bridges in fw.items()}
            B = sparse_wrapped(G, ps, list(L), L, d=1)
            good = verify_bramble(G, B).ok and B.congestion <= 4
            ok &= good
            lines.append(f"wrapped a={a}: size {B.size}, congestion {B.congestion}<=4")
        for name, (G, F), d in (("hub", hub_walks(4), 4), ("grid lines", grid_line_walks(5), 5)):
            B = dense_scenario(G, F, d, d - 1)
            bound = congestion(w.vertices for w in F)
            good = B is not None and verify_bramble(G, B).ok and B.congestion <= bound and B.size == d
            ok &= good
            lines.append(f"dense {name}: size {B.size if B else 0}, congestion {B.congestion if B else '-'}<={bound}")
        return ok, "; ".join(lines), {}
    return _timed(5, "scenario congestion", run)


# 6 ---------------------------------------------------------------------------

def random_classification(rng: np.random.Generator):
    """V, Z, M1, M2 built the way the pipeline builds them, over random E1 <= E2."""
    a = int(rng.integers(2, 8))
    V = [(i, j) for i in range(a) for j in range(a) if i != j]
    n = len(V)
    pz, p1, p2 = rng.random(3)
    Z = {t for t in range(n) if rng.random() < pz}
    E2 = [(s, t) for s, t in combinations(range(n), 2) if rng.random() < p2]
    E1 = [e for e in E2 if rng.random() < p1]
    m1 = maximal_matching(UGraph(n, E1), allowed=lambda s, t: s not in Z and t not in Z)
    covered = Z | matched_vertices(m1)
    m2 = maximal_matching(UGraph(n, E2), allowed=lambda s, t: not (s in covered and t in covered))
    Zp = {V[t] for t in Z}
    M1 = {frozenset((V[s], V[t])) for s, t in m1}
    M2 = {frozenset((V[s], V[t])) for s, t in m2}
    return V, Zp, M1, M2


def criterion_6(trials: int = 10_000, seed: int = 6) -> Result:
    def run():
        rng = make_rng(seed, 6)
        hist = {1: 0, 2: 0, 3: 0}
        failures = 0
        for _ in range(trials):
            V, Z, M1, M2 = random_classification(rng)
            c1, c2, c3 = case_counts(V, Z, M1, M2)
            if 2 * c1 + 2 * c2 + c3 < 3 * len(V):
                failures += 1
                continue
            try:
                case = case_analysis(V, Z, M1, M2)
            except Exception:
                failures += 1
                continue
            if 5 * (c1, c2, c3)[case - 1] < 3 * len(V):
                failures += 1
                continue
            hist[case] += 1
        ok = failures == 0
        return ok, f"{trials} classifications, cases {hist}, {failures} failures", {"cases": hist}
    return _timed(6, "case counting", run)


# 7 ---------------------------------------------------------------------------

def criterion_7(ks=(2, 3, 5, 10)) -> Result:
    def run():
        ok, notes = True, []
        for k in ks:
            p = compute_params(k, sigma=1)
            checks = schedule_checks(p)
            failed = [name for name, good in checks.items() if not good]
            ok &= not failed and not p.notes
            notes.append(f"k={k}: a={p.a}, d=ceil(d1/2560)={p.refine_d}, "
                         f"{len(checks) - len(failed)}/{len(checks)} inequalities hold")
        return ok, "; ".join(notes), {}
    return _timed(7, "parameter arithmetic", run)


# 8 ---------------------------------------------------------------------------

SMOKE_ARGS = ["--k", "2", "--sigma", "0.25", "--seed", "0", "--d1", "4", "--d2", "4", "--d3", "1",
              "--bowtie-factor", "2"]


def criterion_8(workdir: str | None = None) -> Result:
    def run():
        with tempfile.TemporaryDirectory() as tmp:
            base = workdir or tmp
            graph, ps = os.path.join(base, "grid.txt"), os.path.join(base, "ps.json")
            out, report = os.path.join(base, "bramble.json"), os.path.join(base, "report.json")
            cmd = [sys.executable, "-m", "dibramble"]
            env = dict(os.environ)
            src = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
            env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
            gen = subprocess.run(cmd + ["gen-ps", "--g", "8", "--a", "4", "--b", "4", "--out", ps,
                                        "--graph-out", graph], capture_output=True, text=True, env=env)
            if gen.returncode != 0:
                return False, f"gen-ps exited {gen.returncode}: {gen.stderr.strip()}", {}
            start = time.perf_counter()
            run_ = subprocess.run(cmd + ["extract", "--graph", graph, "--ps", ps, "--out", out,
                                         "--report", report] + SMOKE_ARGS,
                                  capture_output=True, text=True, env=env)
            secs = time.perf_counter() - start
            if run_.returncode != 0:
                return False, f"extract exited {run_.returncode}: {run_.stderr.strip()}", {}
            from .digraph import read_graph
            G = read_graph(graph)
            B, claimed = load_bramble(out)
            vr = verify_bramble(G, B, claimed)
            with open(report, encoding="utf-8") as fh:
                rep = json.load(fh)
            ok = vr.ok and B.congestion <= 8 and secs < 60 and rep["params"]["a"] == 4
            detail = (f"exit 0 in {secs:.2f}s < 60s, a={rep['params']['a']}, case {rep['case']}, "
                      f"size {B.size}, congestion {B.congestion}<=8, shortfall={rep['shortfall']}, "
                      f"verify {'clean' if vr.ok else vr.violations[0]}")
            return ok, detail, {"report": rep}
    return _timed(8, "end-to-end smoke", run)


# 9 ---------------------------------------------------------------------------

def random_bramble_elements(rng: np.random.Generator, universe: int = 20):
    m = int(rng.integers(1, 13))
    els = []
    for _ in range(m):
        size = int(rng.integers(1, 6))
        els.append(frozenset(rng.choice(universe, size=size, replace=False).tolist()))
    return els


def criterion_9(seed: int = 9) -> Result:
    def run():
        rng = make_rng(seed, 9)
        order_bad = wl_bad = deg_bad = 0
        for _ in range(50):
            els = random_bramble_elements(rng)
            if bramble_order(None, Bramble(tuple(els))) != oracles.min_hitting_set(els):
                order_bad += 1
        wl_true = 0
        for _ in range(100):
            n = int(rng.integers(2, 7))
            G = oracles.random_digraph(rng, n, float(rng.uniform(0.3, 0.9)))
            size = int(rng.integers(1, n + 1))
            X = rng.choice(n, size=size, replace=False).tolist()
            fast = is_well_linked(G, X)
            wl_true += fast
            if fast != oracles.well_linked(G, X):
                wl_bad += 1
        for _ in range(100):
            n = int(rng.integers(1, 9))
            H = oracles.random_ugraph(rng, n, float(rng.uniform(0.1, 0.9)))
            if degeneracy(H)[0] != oracles.degeneracy(H):
                deg_bad += 1
        ok = order_bad == wl_bad == deg_bad == 0
        detail = (f"order 50 cases/{order_bad} mismatches; well-linked 100 cases ({wl_true} linked)/"
                  f"{wl_bad} mismatches; degeneracy 100 cases/{deg_bad} mismatches")
        return ok, detail, {}
    return _timed(9, "oracle agreement", run)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}


def run_all(numbers=None) -> list[Result]:
    return [CRITERIA[t]() for t in (numbers or sorted(CRITERIA))]
