import pytest
from hypothesis import given
from hypothesis import strategies as st

from dibramble.acceptance import check_refinement
from dibramble.combinatorics import make_rng
from dibramble.digraph import overlap
from dibramble.errors import NoLinkage, SizeTooSmall
from dibramble.generators import (bridge_gadget, complete_digraph, gen_grid_path_system,
                                  random_threaded_linkage, snake_rows)
from dibramble.linkage import PathSystem, check_linkage
from dibramble.digraph import Digraph
from dibramble.threaded import (AnchoredWalkFamily, ThreadedLinkage, build_threaded_linkage,
                                check_threaded_linkage, contains_subwalk, greedy_useful_walks,
                                has_useful_intersection, linkage_of, refine_threaded_linkage,
                                sub_threaded, threaded_segments)


def test_contains_subwalk():
    assert contains_subwalk((1, 2, 3, 4), (2, 3))
    assert not contains_subwalk((1, 2, 3, 4), (3, 2))
    assert contains_subwalk((1, 2), (1, 2))


class TestCheck:
    def test_valid(self):
        tl = ThreadedLinkage((0, 1, 2, 3, 4), ((0, 1), (3, 4)))
        assert check_threaded_linkage(complete_digraph(5), tl) == []
        assert tl.threads == ((2,),) and tl.paths == ((0, 1), (3, 4))

    def test_must_start_and_end_on_paths(self):
        tl = ThreadedLinkage((0, 1, 2, 3), ((1, 2),))
        assert any("start and end" in p for p in check_threaded_linkage(None, tl))

    def test_overlapping_spans(self):
        tl = ThreadedLinkage((0, 1, 2), ((0, 1), (1, 2)))
        assert any("overlaps" in p for p in check_threaded_linkage(None, tl))

    def test_paths_must_be_disjoint(self):
        tl = ThreadedLinkage((0, 1, 2, 0, 3), ((0, 1), (3, 4)))
        assert any("share vertex" in p for p in check_threaded_linkage(None, tl))

    def test_thread_must_be_a_path(self):
        tl = ThreadedLinkage((0, 1, 5, 6, 5, 2, 3), ((0, 1), (5, 6)))
        assert any("not a path" in p for p in check_threaded_linkage(None, tl))

    def test_false_untangled_claim(self):
        # the thread between paths 1 and 2 revisits path 0
        tl = ThreadedLinkage((0, 1, 2, 3, 4, 0, 5, 6), ((0, 1), (3, 4), (6, 7)), untangled=True)
        assert any("outside its neighbours" in p for p in check_threaded_linkage(None, tl))

    def test_non_arc(self):
        G = Digraph(3, [(0, 1)])
        tl = ThreadedLinkage((0, 1, 2), ((0, 0), (2, 2)))
        assert "walk uses a non-arc" in check_threaded_linkage(G, tl)

    def test_json_round_trip(self):
        tl = snake_rows(3)
        assert ThreadedLinkage.from_json(tl.to_json()) == tl
        assert '"untangled": true' in tl.dumps()


class TestBuild:
    def test_single_cycle_permutation(self):
        G, ps, _ = bridge_gadget(2, 2, shift=1)
        _, _, pieces = threaded_segments(G, ps, 0, 1)
        assert [k for k, _ in pieces] == ["forward", "backward", "forward"]
        tl = build_threaded_linkage(G, ps, 0, 1)
        assert tl.size == 2 and tl.overlap <= 2
        assert check_threaded_linkage(G, tl) == []

    def test_two_fixed_points(self):
        G, ps, _ = bridge_gadget(2, 2, shift=0)
        _, _, pieces = threaded_segments(G, ps, 0, 1)
        assert [k for k, _ in pieces] == ["forward", "backward", "spine", "forward"]
        tl = build_threaded_linkage(G, ps, 0, 1)
        assert tl.size == 2 and check_threaded_linkage(G, tl) == []
        # the thread runs back along the backward bridge and then along P_0
        assert set(tl.threads[0]) & set(ps.paths[0])

    def test_linkages_are_valid(self):
        G, ps = gen_grid_path_system(8, 3, 2)
        fwd, bwd, _ = threaded_segments(G, ps, 2, 0)
        assert check_linkage(G, fwd) == [] and check_linkage(G, bwd) == []
        tl = build_threaded_linkage(G, ps, 2, 0)
        assert set(tl.paths) == set(fwd.paths)
        assert check_linkage(G, linkage_of(tl)) == []

    def test_missing_linkage(self):
        G = Digraph(4, [(0, 1), (2, 3)])
        ps = PathSystem([(0, 1), (2, 3)], [{0}, {2}], [{1}, {3}])
        with pytest.raises(NoLinkage):
            build_threaded_linkage(G, ps, 0, 1)

    def test_same_index(self):
        G, ps, _ = bridge_gadget(2, 2)
        with pytest.raises(ValueError):
            build_threaded_linkage(G, ps, 1, 1)

    @given(st.integers(2, 4), st.integers(1, 4), st.integers(0, 3), st.booleans())
    def test_gadget_overlap_law(self, a, b, shift, hubs):
        G, ps, _ = bridge_gadget(a, b, shift=shift % b, shared_hubs=hubs)
        for i in range(a):
            for j in range(a):
                if i != j:
                    tl = build_threaded_linkage(G, ps, i, j)
                    assert tl.overlap <= 3 and tl.size == b
                    assert check_threaded_linkage(G, tl) == []


def _detours():
    # every linkage path sits on its own closed detour
    walk = (0, 1, 0, 2, 3, 2, 4, 5)
    return ThreadedLinkage(walk, ((0, 1), (3, 4), (6, 7)))


class TestUsefulWalks:
    def test_detours_found_one_by_one(self):
        assert greedy_useful_walks(_detours()) == [(0, 2), (3, 5)]

    def test_limit(self):
        assert greedy_useful_walks(_detours(), limit=1) == [(0, 2)]

    def test_untangled_snake_has_none(self):
        assert greedy_useful_walks(snake_rows(4)) == []
        assert not has_useful_intersection(snake_rows(4))

    @given(st.integers(0, 10**6))
    def test_greedy_agrees_with_brute_force(self, seed):
        rng = make_rng(seed)
        size = int(rng.integers(1, 6))
        tl = random_threaded_linkage(rng, 3 * size + int(rng.integers(0, 10)), size, max_path=3)
        found = greedy_useful_walks(tl)
        assert bool(found) == has_useful_intersection(tl)
        last = -1
        for p, q in found:
            assert last < p < q and tl.walk[p] == tl.walk[q]
            assert any(p <= s and e <= q for s, e in tl.spans)
            last = q


class TestRefine:
    def test_untangled_input_kept_whole(self):
        out = refine_threaded_linkage(snake_rows(4), 4, 1)
        assert isinstance(out, ThreadedLinkage) and out.untangled and out.size == 4

    def test_detours_give_closed_walks(self):
        out = refine_threaded_linkage(_detours(), 1, 2)
        assert isinstance(out, AnchoredWalkFamily) and len(out) == 2
        assert out.anchors[0] == ((0, 1), (2, 3))
        assert check_refinement(_detours(), 1, 2, out, complete_digraph(6)) == []

    def test_size_too_small(self):
        with pytest.raises(SizeTooSmall):
            refine_threaded_linkage(snake_rows(3), 2, 2)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            refine_threaded_linkage(snake_rows(3), 0, 1)

    @given(st.integers(0, 10**6), st.data())
    def test_dichotomy(self, seed, data):
        rng = make_rng(seed)
        size = int(rng.integers(1, 8))
        n = 3 * size + int(rng.integers(0, 10))
        tl = random_threaded_linkage(rng, n, size, max_path=3)
        d = data.draw(st.integers(1, max(1, (tl.size + 1) // 2)))
        x = data.draw(st.integers(1, max(1, (tl.size - (d - 1)) // d)))
        out = refine_threaded_linkage(tl, x, d)
        assert check_refinement(tl, x, d, out, complete_digraph(n)) == []
        if isinstance(out, AnchoredWalkFamily):
            assert overlap(out.walks) <= tl.overlap

    @given(st.integers(0, 10**6))
    def test_boundary_size(self, seed):
        rng = make_rng(seed)
        d = int(rng.integers(1, 4))
        x = int(rng.integers(1, 4))
        tl = random_threaded_linkage(rng, 60, x * d + d - 1, max_path=2)
        out = refine_threaded_linkage(tl, x, d)
        if isinstance(out, ThreadedLinkage):
            assert out.size >= x


class TestSubThreaded:
    def test_keeps_requested_paths(self):
        tl = snake_rows(4)
        sub = sub_threaded(tl, [tl.paths[0], tl.paths[2]])
        assert sub.paths == (tl.paths[0], tl.paths[2])
        assert check_threaded_linkage(complete_digraph(16), sub) == []

    def test_rejects_foreign_path(self):
        with pytest.raises(ValueError):
            sub_threaded(snake_rows(3), [(99,)])
