import pytest

from dibramble import oracles
from dibramble.digraph import is_strongly_connected
from dibramble.generators import (bidirected_grid, bridge_gadget, gen_cylindrical_grid, gen_grid_path_system,
                                  hub_walks, spread_rows)
from dibramble.linkage import validate_path_system


class TestCylindricalGrid:
    def test_smallest(self):
        G = gen_cylindrical_grid(2)
        assert G.n == 8 and oracles.strongly_connected(G, range(8))

    @pytest.mark.parametrize("g", [2, 3, 5, 8])
    def test_shape(self, g):
        G = gen_cylindrical_grid(g)
        assert G.n == 2 * g * g
        assert all(len(G.out_neighbors(v)) in (1, 2) for v in range(G.n))
        assert is_strongly_connected(G, range(G.n))

    def test_too_small(self):
        with pytest.raises(ValueError):
            gen_cylindrical_grid(1)


class TestGridPathSystem:
    def test_exhaustively_checked(self):
        G, ps = gen_grid_path_system(6, 2, 2)
        assert ps.well_linked_verified and len(ps.terminals) == 8
        assert validate_path_system(G, ps).ok

    def test_a_before_b(self):
        G, ps = gen_grid_path_system(8, 3, 3)
        for P, A, B in zip(ps.paths, ps.A, ps.B):
            pos = {v: t for t, v in enumerate(P)}
            assert max(pos[v] for v in A) < min(pos[v] for v in B)
        assert not ps.well_linked_verified

    def test_deterministic(self):
        assert gen_grid_path_system(8, 3, 2) == gen_grid_path_system(8, 3, 2)

    def test_errors(self):
        with pytest.raises(ValueError):
            gen_grid_path_system(4, 5, 1)
        with pytest.raises(ValueError):
            gen_grid_path_system(4, 2, 3)
        with pytest.raises(ValueError):
            gen_grid_path_system(6, 2, 1, rows=[1, 1])

    def test_rejects_badly_linked_rows(self):
        # rows 0 and 3 of a 4 x 4 grid: the corner terminals cannot all be linked
        with pytest.raises(ValueError, match="not well-linked"):
            gen_grid_path_system(4, 2, 2, rows=[0, 3])

    def test_spread(self):
        assert spread_rows(10, 3) == [0, 4, 8] and spread_rows(5, 1) == [0]


def test_bridge_gadget_system_is_valid():
    G, ps, fw = bridge_gadget(3, 4, shift=1)
    assert validate_path_system(G, ps).ok
    assert len(fw) == 6 and all(len(v) == 4 for v in fw.values())
    assert all(G.has_arc(u, v) for bridges in fw.values() for p in bridges for u, v in zip(p, p[1:]))


def test_hub_walks():
    G, F = hub_walks(3)
    assert len(F) == 4 and all(0 in w.vertices for w in F)


def test_bidirected_grid_is_symmetric():
    G = bidirected_grid(3, 4)
    assert G.n == 12 and all(G.has_arc(v, u) for u, v in G.arcs)
