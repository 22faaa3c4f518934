import pytest

from dibramble.acceptance import bowtie_cases
from dibramble.bowtie import bowtie, congestion_bound
from dibramble.digraph import congestion, is_walk
from dibramble.errors import TooSparse
from dibramble.generators import bidirected_grid, snake_columns, snake_rows, tangled_columns, tangled_rows
from dibramble.threaded import check_anchored_family, check_threaded_linkage, contains_subwalk

N = 12


def test_crafted_linkages_are_valid():
    G = bidirected_grid(N)
    for tl in (snake_rows(N), snake_columns(N), tangled_rows(N), tangled_columns(N)):
        assert check_threaded_linkage(G, tl) == []
    assert tangled_columns(N).overlap == 3 and snake_rows(N).overlap == 1


class TestBound:
    def test_table(self):
        assert congestion_bound(snake_rows(N), snake_columns(N)) == 2
        assert congestion_bound(snake_rows(N), tangled_columns(N)) == 4
        assert congestion_bound(tangled_rows(N), snake_columns(N)) == 4
        assert congestion_bound(tangled_rows(N), tangled_columns(N)) == 6


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("name, tl1, tl2", bowtie_cases(N))
def test_bowtie_walks(name, tl1, tl2, d):
    G = bidirected_grid(N)
    fam = bowtie(tl1, tl2, d, factor=1, G=G)
    assert len(fam) == d and check_anchored_family(G, fam) == []
    assert congestion(fam.walks) <= congestion_bound(tl1, tl2) <= tl1.overlap + tl2.overlap
    for W, P1, P2 in zip(fam.walks, fam.anchors[0], fam.anchors[1]):
        assert W.closed and is_walk(G, W.seq)
        assert P1 in tl1.paths and P2 in tl2.paths
        assert contains_subwalk(W.seq, P1) and contains_subwalk(W.seq, P2)


def test_deterministic():
    a = bowtie(snake_rows(N), snake_columns(N), 2, factor=1)
    b = bowtie(snake_rows(N), snake_columns(N), 2, factor=1)
    assert a == b


class TestErrors:
    def test_parallel_rows_are_too_sparse(self):
        # each row meets only itself, so the intersection graph is a matching
        with pytest.raises(TooSparse):
            bowtie(snake_rows(N), snake_rows(N), 1, factor=1)

    def test_full_factor_needs_huge_linkages(self):
        with pytest.raises(TooSparse):
            bowtie(snake_rows(N), snake_columns(N), 1)

    def test_d_positive(self):
        with pytest.raises(ValueError):
            bowtie(snake_rows(N), snake_columns(N), 0, factor=1)
