import math
import os
import sys

import networkx as nx
import numpy as np
import pytest

# Add the parent directory to the path so we can import our module
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.qclab.errors import TooLargeForExact, Unsupported
from src.qclab.graph_lab.builders import cycle_graph, from_edge_list, grid_graph, path_graph, random_connected_graph
from src.qclab.graph_lab.perimeter import (
    coarea_residual,
    graph_boundary,
    isoperimetric_profile,
    perimeter,
    total_variation,
)


class TestPerimeter:
    def test_cycle_arc(self):
        g = cycle_graph(8)
        arc = {0, 1, 2}
        assert perimeter(g, arc) == 2.0
        assert graph_boundary(g, arc) == frozenset({3, 7})

    def test_weighted_edges(self):
        rng = np.random.default_rng(3)
        g = random_connected_graph(rng, 8)
        S = {0, 2, 5}
        expected = sum(e.weight / e.length for e in g.edges if (e.u in S) != (e.v in S))
        assert perimeter(g, S) == pytest.approx(expected)

    def test_total_variation_of_indicator_is_perimeter(self):
        g = grid_graph(5)
        S = {6, 7, 12}
        u = [1.0 if v in S else 0.0 for v in range(g.n_vertices)]
        assert total_variation(g, u) == perimeter(g, S) == 8.0

    def test_coarea_identity(self):
        for seed in range(1000):
            rng = np.random.default_rng(seed)
            g = random_connected_graph(rng, int(rng.integers(2, 51)))
            u = rng.normal(size=g.n_vertices)
            assert coarea_residual(g, u) <= 1e-12, seed
            assert coarea_residual(g, np.round(u)) <= 1e-12, seed


class TestProfile:
    def test_cycle(self):
        g = cycle_graph(8)
        # the complement of a single vertex has one boundary vertex
        assert isoperimetric_profile(g, 3) == 1.0
        assert isoperimetric_profile(g, 1) == 1.0

    def test_path_leaf(self):
        assert isoperimetric_profile(path_graph(4), 1) == 1.0

    def test_star(self):
        g = from_edge_list(6, [(0, k) for k in range(1, 6)])
        assert isoperimetric_profile(g, 1) == 1.0
        assert isoperimetric_profile(g, 2) == 1.0

    def test_full_volume_is_infinite(self):
        g = path_graph(4)
        assert isoperimetric_profile(g, 5) == math.inf
        assert isoperimetric_profile(g, 5, mode="heuristic") == math.inf

    def test_agrees_with_brute_force(self):
        G = nx.petersen_graph()
        g = from_edge_list(10, G.edges())
        for v in range(1, 10):
            best = math.inf
            for mask in range(1, (1 << 10) - 1):
                S = {k for k in range(10) if mask >> k & 1}
                if len(S) >= v:
                    best = min(best, len(graph_boundary(g, S)))
            assert isoperimetric_profile(g, v) == best

    @pytest.mark.parametrize("seed", range(6))
    def test_heuristic_is_an_upper_bound(self, seed):
        rng = np.random.default_rng(seed)
        g = random_connected_graph(rng, 12, extra_edge_probability=0.25)
        for v in (1, 3, 6, 11):
            assert isoperimetric_profile(g, v, mode="heuristic") >= isoperimetric_profile(g, v)

    def test_exact_limit(self):
        with pytest.raises(TooLargeForExact):
            isoperimetric_profile(grid_graph(5), 3)
        assert isoperimetric_profile(grid_graph(4), 3, limit=16) == 1.0

    def test_limit_is_clamped_to_the_mask_width(self):
        with pytest.raises(TooLargeForExact) as excinfo:
            isoperimetric_profile(path_graph(39), 1, limit=64)
        assert excinfo.value.details["limit"] == 32

    def test_unknown_mode(self):
        with pytest.raises(Unsupported):
            isoperimetric_profile(path_graph(3), 1, mode="sampled")


if __name__ == "__main__":
    pytest.main(["-xvs", __file__])
