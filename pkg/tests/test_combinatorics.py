import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dibramble import oracles
from dibramble.combinatorics import (BranchDecomposition, UGraph, bipartite_core, bipartite_intersection,
                                     check_branch_decomposition, check_partition, check_transversal, degeneracy,
                                     elimination_width, exact_clique_minor, extract_min_degree_core,
                                     find_clique_minor, independent_transversal, intersection_graph,
                                     largest_clique_minor, make_rng, maximal_matching, partition_bipartite)
from dibramble.errors import BudgetExhausted, HypothesisUnmet
from strategies import ugraphs


def complete(n):
    return UGraph(n, combinations(range(n), 2))


def cycle(n):
    return UGraph(n, [(i, (i + 1) % n) for i in range(n)])


def grid(r, c):
    es = [(i * c + j, i * c + j + 1) for i in range(r) for j in range(c - 1)]
    es += [(i * c + j, (i + 1) * c + j) for i in range(r - 1) for j in range(c)]
    return UGraph(r * c, es)


class TestIntersectionGraph:
    def test_examples(self):
        H = intersection_graph([{1, 2}, {2, 3}, {4}])
        assert H.edges == {(0, 1)} and H.degree(2) == 0
        assert not intersection_graph([{1}, {2}, {3}]).edges

    def test_hub(self):
        H = intersection_graph([{0, i} for i in range(1, 5)])
        assert H.edges == complete(4).edges

    def test_bipartite_version(self):
        M = bipartite_intersection([{1, 2}, {5}], [{2}, {3}, {5, 1}])
        assert M.tolist() == [[True, False, True], [False, False, True]]


class TestDegeneracy:
    def test_examples(self):
        assert degeneracy(complete(5))[0] == 4
        assert degeneracy(UGraph(5, [(0, 1), (1, 2), (1, 3), (3, 4)]))[0] == 1
        assert degeneracy(grid(3, 3))[0] == oracles.degeneracy(grid(3, 3)) == 2
        assert degeneracy(UGraph(0))[0] == 0

    @given(ugraphs(max_n=9))
    def test_matches_brute_force(self, H):
        d, order = degeneracy(H)
        assert d == oracles.degeneracy(H)
        assert sorted(order) == list(range(H.n))
        assert elimination_width(H, order) == d
        assert d <= max((H.degree(v) for v in range(H.n)), default=0)


class TestCores:
    def test_examples(self):
        assert extract_min_degree_core(complete(4), 3) == frozenset(range(4))
        star = UGraph(10, [(0, i) for i in range(1, 10)])
        assert extract_min_degree_core(star, 2) == frozenset()

    def test_dense_graph_has_a_three_core(self):
        rng = make_rng(3)
        H = oracles.random_ugraph(rng, 40, 0.3)
        assert 2 * len(H.edges) / H.n >= 5
        core = extract_min_degree_core(H, 3)
        assert core and all(len(H.adj[v] & core) >= 3 for v in core)

    @given(ugraphs(max_n=9), st.integers(0, 4))
    def test_core_is_maximal(self, H, t):
        core = extract_min_degree_core(H, t)
        assert all(len(H.adj[v] & core) >= t for v in core)
        # any set with minimum degree >= t lies inside the core
        for mask in range(1, 1 << H.n):
            S = {v for v in range(H.n) if mask >> v & 1}
            if all(len(H.adj[v] & S) >= t for v in S):
                assert S <= core

    def test_bipartite_core(self):
        M = np.zeros((3, 3), dtype=bool)
        M[:2, :2] = True
        M[2, 2] = True
        rows, cols = bipartite_core(M, 2)
        assert rows.tolist() == [0, 1] and cols.tolist() == [0, 1]


class TestCliqueMinor:
    def test_complete_graph(self):
        bd = find_clique_minor(complete(5), 5)
        assert sorted(map(sorted, bd.sets)) == [[0], [1], [2], [3], [4]]

    def test_five_cycle(self):
        bd = find_clique_minor(cycle(5), 3)
        assert len(bd) == 3 and check_branch_decomposition(cycle(5), bd) == []
        assert find_clique_minor(cycle(5), 4) is None

    def test_edgeless(self):
        assert find_clique_minor(UGraph(4), 2) is None
        assert len(find_clique_minor(UGraph(4), 1)) == 1

    def test_checker(self):
        H = UGraph(4, [(0, 1), (2, 3)])
        bd = BranchDecomposition((frozenset({0, 2}), frozenset({1}), frozenset({3})))
        problems = check_branch_decomposition(H, bd)
        assert any("not connected" in p for p in problems)
        assert any("not adjacent" in p for p in problems)

    def test_target_must_be_positive(self):
        with pytest.raises(ValueError):
            find_clique_minor(complete(3), 0)

    def test_large_graph_uses_contraction(self):
        H = grid(5, 5)
        bd = find_clique_minor(H, 4)
        assert bd is not None and check_branch_decomposition(H, bd) == []
        assert check_branch_decomposition(H, largest_clique_minor(H)) == []

    @given(ugraphs(max_n=7))
    def test_exact_search_is_optimal(self, H):
        bd = exact_clique_minor(H)
        assert check_branch_decomposition(H, bd) == []
        assert len(bd) == oracles.clique_minor_number(H)


def large_class_instance(rng, r, d):
    """r classes of size ceil(4e(r-1)d); each class pair spans a random d-degenerate graph."""
    s = math.ceil(4 * math.e * (r - 1) * d)
    classes = [list(range(i * s, (i + 1) * s)) for i in range(r)]
    edges = set()
    for a, b in combinations(range(r), 2):
        verts = classes[a] + classes[b]
        order = rng.permutation(len(verts))
        seen_a, seen_b = [], []
        for idx in order:
            v = verts[idx]
            mine, other = (seen_a, seen_b) if v < (a + 1) * s and v >= a * s else (seen_b, seen_a)
            k = min(d, len(other))
            for u in rng.choice(other, size=k, replace=False) if k else ():
                edges.add((min(u, v), max(u, v)))
            mine.append(v)
    return UGraph(r * s, edges), classes


class TestTransversal:
    def test_nonadjacent_classes(self):
        assert independent_transversal(UGraph(4), [[2, 3], [0, 1]]) == [2, 0]

    def test_perfect_matching_conflicts(self):
        s = math.ceil(4 * math.e)
        H = UGraph(2 * s, [(i, s + i) for i in range(s)])
        classes = [range(s), range(s, 2 * s)]
        pick = independent_transversal(H, classes)
        assert pick is not None and check_transversal(H, classes, pick) == []
        assert oracles.has_transversal(H, [list(c) for c in classes])

    def test_absent_by_exhaustion(self):
        assert independent_transversal(UGraph(2, [(0, 1)]), [[0], [1]], budget=10) is None

    def test_budget_exhausted(self):
        # four colours cannot properly colour K_5, so no transversal exists,
        # but a one-node search cap gives up before proving it
        classes = [[4 * i + c for c in range(4)] for i in range(5)]
        edges = [(4 * i + c, 4 * j + c) for i, j in combinations(range(5), 2) for c in range(4)]
        H = UGraph(20, edges)
        with pytest.raises(BudgetExhausted):
            independent_transversal(H, classes, budget=5, exhaustive_cap=1)
        assert independent_transversal(H, classes, budget=5) is None

    def test_overlapping_classes_rejected(self):
        with pytest.raises(ValueError):
            independent_transversal(UGraph(2), [[0, 1], [1]])

    @given(ugraphs(min_n=2, max_n=9), st.data())
    def test_matches_brute_force(self, H, data):
        labels = data.draw(st.lists(st.integers(0, 2), min_size=H.n, max_size=H.n))
        classes = [[v for v in range(H.n) if labels[v] == c] for c in range(3)]
        classes = [c for c in classes if c]
        pick = independent_transversal(H, classes, budget=50)
        assert (pick is not None) == oracles.has_transversal(H, classes)
        if pick is not None:
            assert check_transversal(H, classes, pick) == []

    def test_resampling_succeeds_on_large_classes(self):
        rng = make_rng(11)
        wins = 0
        trials = 1000
        for t in range(trials):
            r = int(rng.integers(2, 4))
            d = int(rng.integers(1, 3))
            H, classes = large_class_instance(rng, r, d)
            try:
                # no exhaustive fallback: only the resampling budget counts
                pick = independent_transversal(H, classes, seed=t, budget=1000, exhaustive_cap=0)
            except BudgetExhausted:
                continue
            assert pick is not None and check_transversal(H, classes, pick) == []
            wins += 1
        assert wins >= 0.99 * trials


class TestMatching:
    def test_examples(self):
        assert maximal_matching(UGraph(3, [(0, 1), (1, 2)])) == {(0, 1)}
        assert maximal_matching(UGraph(3)) == frozenset()
        assert len(maximal_matching(complete(4))) == 2

    def test_forbidden_edges(self):
        M = maximal_matching(UGraph(3, [(0, 1), (1, 2)]), allowed=lambda u, v: u != 0)
        assert M == {(1, 2)}

    @given(ugraphs(max_n=9))
    def test_maximal(self, H):
        M = maximal_matching(H)
        used = [v for e in M for v in e]
        assert len(used) == len(set(used))
        assert all(u in used or v in used for u, v in H.edges)


class TestPartition:
    @pytest.mark.parametrize("r, k", [(2, 1), (2, 2), (5, 1)])
    def test_complete_bipartite(self, r, k):
        m = 2**9 * r * k
        M = np.ones((m, m), dtype=bool)
        parts = partition_bipartite(M, k, r)
        assert len(parts) == k and check_partition(M, parts, k, r) == []

    def test_isolated_vertex(self):
        M = np.zeros((3, 3), dtype=bool)
        with pytest.raises(HypothesisUnmet):
            partition_bipartite(M, 1, 1)

    def test_small_graph_exhaustive(self):
        M = np.eye(4, dtype=bool) | np.eye(4, k=1, dtype=bool)
        parts = partition_bipartite(M, 1, 1.5, factor=0)
        assert check_partition(M, parts, 1, 1.5) == []

    def test_checker_flags_each_clause(self):
        M = np.ones((4, 4), dtype=bool)
        problems = check_partition(M, [([0, 2], [0]), ([0], [1])], 2, 1)
        assert any("segment" in p for p in problems)
        assert any("intersect" in p for p in problems)
        assert any("average degree" in p for p in check_partition(np.zeros((2, 2), bool), [([0], [0])], 1, 1))

    @given(st.integers(0, 10**6))
    def test_random_dense_outputs_are_checked(self, seed):
        rng = make_rng(seed)
        M = rng.random((40, 40)) < 0.7
        parts = partition_bipartite(M, 2, 3, factor=0)
        assert check_partition(M, parts, 2, 3) == []
