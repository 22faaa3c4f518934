import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dibramble.acceptance import random_classification
from dibramble.bramble import verify_bramble
from dibramble.combinatorics import make_rng
from dibramble.errors import ClassificationCorrupt, ConstructionGap, KTooSmall, ParamsMismatch
from dibramble.generators import bridge_gadget, gen_grid_path_system
from dibramble.pipeline import (case_analysis, case_counts, classify_pairs, compute_params, firing_cases,
                                params_for_system, run_pipeline, schedule_checks, t_bound, with_seed)
from dibramble.scenarios import sparse_wrapped

UNIT = dict(d1=1, d2=1, d3=1)
CASE2 = dict(d1=4, d2=4, d3=1, bowtie_factor=1)


class TestParams:
    def test_k2(self):
        p = compute_params(2)
        assert p.a == 17 == math.ceil(3 * 4 * math.sqrt(2))
        assert p.d3 == 2
        assert p.d2 == math.ceil(2**11 * 5 * math.e * 17**2 * 2)
        assert p.notes == ()

    @pytest.mark.parametrize("k", [2, 3, 5, 10])
    def test_schedule_holds(self, k):
        p = compute_params(k)
        assert all(schedule_checks(p).values())
        assert p.notes == ()

    def test_sigma_one_is_identity(self):
        assert compute_params(3, sigma=1.0) == compute_params(3)

    def test_sigma_scales_with_floor(self):
        full, half = compute_params(2), compute_params(2, sigma=0.5)
        assert half.a == full.a // 2 and half.d3 == 1

    def test_errors(self):
        with pytest.raises(KTooSmall):
            compute_params(1)
        for sigma in (0, 1.5, -1):
            with pytest.raises(ValueError):
                compute_params(2, sigma=sigma)
        with pytest.raises(ParamsMismatch):
            compute_params(2, d1=1, d2=2)
        with pytest.raises(TypeError):
            compute_params(2, nonsense=3)

    def test_overrides_are_noted(self):
        p = compute_params(2, sigma=0.25, a=5, b=4, **UNIT)
        assert (p.a, p.b, p.d1, p.d2, p.d3) == (5, 4, 1, 1, 1)
        assert any("a overridden" in n for n in p.notes)
        assert p.b >= p.x * p.refine_d + p.refine_d - 1

    def test_t_bound(self):
        p = compute_params(2)
        assert math.isclose(t_bound(p) / (p.a ** 2 * p.b ** 2), 1, rel_tol=1e-50)

    def test_json(self):
        p = compute_params(2, sigma=0.25, **UNIT)
        assert p.to_json()["notes"] == list(p.notes)
        assert with_seed(p, 9).seed == 9

    def test_budget_overrides(self):
        assert compute_params(2, transversal_budget=5).transversal_budget == 5
        assert compute_params(2, transversal_budget=None).transversal_budget == 100_000


def _pair(*xs):
    return frozenset(xs)


class TestCaseAnalysis:
    V = [(i, j) for i in range(3) for j in range(3) if i != j]

    def test_nothing_selected(self):
        assert case_analysis(self.V, set(), set(), set()) == 1
        assert firing_cases(self.V, set(), set(), set()) == [1, 3]

    def test_covered_by_m1(self):
        V = self.V
        M1 = {_pair(V[0], V[1]), _pair(V[2], V[3]), _pair(V[4], V[5])}
        assert case_analysis(V, set(), M1, set()) == 2

    def test_counts(self):
        V = self.V
        assert case_counts(V, {V[0]}, {_pair(V[1], V[2])}, {_pair(V[0], V[3])}) == (3, 4, 4)

    def test_corrupt_inputs(self):
        V = self.V
        with pytest.raises(ClassificationCorrupt):
            case_analysis(V, {V[0]}, {_pair(V[0], V[1])}, set())
        with pytest.raises(ClassificationCorrupt):
            case_analysis(V, set(), {_pair(V[0], V[1]), _pair(V[1], V[2])}, set())
        with pytest.raises(ClassificationCorrupt):
            case_analysis(V, set(), {_pair(V[0], V[1])}, {_pair(V[0], V[1])})
        with pytest.raises(ClassificationCorrupt):
            case_analysis(V, {V[2]}, {_pair(V[0], V[1])}, {_pair(V[0], V[2])})
        with pytest.raises(ClassificationCorrupt):
            case_analysis(V, {(7, 8)}, set(), set())

    @given(st.integers(0, 10**6))
    def test_counting_inequality(self, seed):
        V, Z, M1, M2 = random_classification(make_rng(seed))
        c1, c2, c3 = case_counts(V, Z, M1, M2)
        assert 2 * c1 + 2 * c2 + c3 >= 3 * len(V)
        case = case_analysis(V, Z, M1, M2)
        assert 5 * (c1, c2, c3)[case - 1] >= 3 * len(V)


class TestClassification:
    def test_untangled_gadget_has_empty_z(self):
        G, ps, _ = bridge_gadget(3, 3, shift=1)
        pc = classify_pairs(G, ps, params_for_system(ps, 2, **UNIT))
        assert pc.Z == set() and len(pc.V) == 6
        assert all(v.untangled for v in pc.views.values())

    def test_invariants_on_grid_system(self):
        G, ps = gen_grid_path_system(8, 4, 4)
        p = params_for_system(ps, 2, sigma=0.25, d1=4, d2=4, d3=1, bowtie_factor=2)
        pc = classify_pairs(G, ps, p)
        assert not (pc.Z & pc.matched1)
        assert pc.E1 <= pc.E2
        covered = pc.Z | pc.matched1
        assert all(len(e & covered) <= 1 for e in pc.M2)
        for pair in pc.Z:
            assert len(pc.walks[pair]) >= p.refine_d

    def test_params_must_match_system(self):
        G, ps, _ = bridge_gadget(3, 3, shift=1)
        with pytest.raises(ParamsMismatch):
            classify_pairs(G, ps, compute_params(2, sigma=0.25, a=4, b=3, **UNIT))


class TestRun:
    def test_case1_equals_sparse_wrapped(self):
        G, ps, _ = bridge_gadget(3, 3, shift=1)
        p = params_for_system(ps, 2, **UNIT)
        res = run_pipeline(G, ps, p)
        assert res.report["case"] == 1 and verify_bramble(G, res.bramble).ok
        pc = classify_pairs(G, ps, p)
        I = [q for q in pc.V if q not in pc.matched1 and q not in pc.Z]
        L = {q: pc.views[q].paths for q in I}
        assert res.bramble == sparse_wrapped(G, ps, I, L, p.d1, seed=p.seed)

    @pytest.mark.parametrize("a, b", [(4, 8), (5, 10)])
    def test_case2_on_fixed_point_gadget(self, a, b):
        G, ps, _ = bridge_gadget(a, b, shift=0)
        res = run_pipeline(G, ps, params_for_system(ps, 2, **CASE2))
        rep = res.report
        assert rep["case"] == 2 and rep["size_Z"] == a * (a - 1)
        assert verify_bramble(G, res.bramble).ok and rep["congestion"] <= 6

    def test_dense_on_smoke_instance(self):
        G, ps = gen_grid_path_system(8, 4, 4)
        p = params_for_system(ps, 2, sigma=0.25, d1=4, d2=4, d3=1, bowtie_factor=2)
        res = run_pipeline(G, ps, p)
        rep = res.report
        assert rep["case"] == "dense" and rep["congestion"] <= 8
        assert verify_bramble(G, res.bramble).ok
        assert rep["shortfall"] == (rep["bramble_size"] < 2)
        for key in ("seed", "params", "size_V", "size_Z", "size_M1", "size_M2", "bramble_size",
                    "congestion", "shortfall", "seconds", "case"):
            assert key in rep

    def test_deterministic(self):
        G, ps = gen_grid_path_system(8, 4, 4)
        p = params_for_system(ps, 2, sigma=0.25, d1=4, d2=4, d3=1, bowtie_factor=2)
        assert run_pipeline(G, ps, p).bramble == run_pipeline(G, ps, p).bramble

    def test_gap_when_transversal_does_not_exist(self):
        # Case 2 needs one disjoint walk per family; with four walks per
        # family and 30 families there is none, and no other case succeeds
        G, ps, _ = bridge_gadget(6, 10, shift=0)
        with pytest.raises(ConstructionGap, match="NoTransversal"):
            run_pipeline(G, ps, params_for_system(ps, 2, **CASE2))
