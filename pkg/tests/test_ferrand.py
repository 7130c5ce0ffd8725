import itertools
import math
import os
import sys
from pathlib import Path

import networkx as nx
import numpy as np
import pytest

# Add the parent directory to the path so we can import our module
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.qclab.errors import NoInfinityBoundary, TooLargeForExact, Unsupported
from src.qclab.graph_lab.builders import cycle_graph, grid_graph, path_graph, random_connected_graph
from src.qclab.graph_lab.capacity import p_capacity
from src.qclab.graph_lab.ferrand import (
    connected_subsets,
    ferrand_hyperbolic,
    ferrand_parabolic,
    minimal_continua,
)
from src.qclab.graph_lab.graph import AT_INFINITY, Capacitor, load_graph

STAR = Path(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))) / "fixtures" / "graphs" / "star4.yaml"


@pytest.fixture
def star():
    return load_graph(STAR.read_text())


@pytest.fixture
def random_graph():
    rng = np.random.default_rng(5)
    return random_connected_graph(rng, 9, extra_edge_probability=0.3, boundary_size=3)


class TestConnectedSubsets:
    def test_path(self):
        subsets = connected_subsets(path_graph(3))
        # intervals of a path with four vertices
        assert len(subsets) == 10
        assert frozenset({0, 2}) not in subsets

    def test_avoid(self):
        subsets = connected_subsets(path_graph(3), avoid={1})
        assert set(subsets) == {frozenset({0}), frozenset({2}), frozenset({3}), frozenset({2, 3})}

    def test_minimal_continua(self):
        g = path_graph(4, ends_at_infinity=True)
        assert minimal_continua(g, 1) == [frozenset({0, 1}), frozenset({1, 2, 3, 4})]
        assert minimal_continua(g, 0) == [frozenset({0})]


class TestHyperbolic:
    def test_star_centre(self, star):
        assert ferrand_hyperbolic(star, 0, 0, 2) == pytest.approx(4.0)
        assert ferrand_hyperbolic(star, 0, 0, 3) == pytest.approx(4.0)

    def test_boundary_points_are_infinitely_far(self, star):
        assert ferrand_hyperbolic(star, 0, 1, 2) == math.inf

    def test_matches_enumeration(self, random_graph):
        g = random_graph
        interior = sorted(set(range(g.n_vertices)) - g.infinity_boundary)
        continua = connected_subsets(g, avoid=g.infinity_boundary)
        for x, y in itertools.combinations_with_replacement(interior, 2):
            expected = min(
                (p_capacity(g, Capacitor(K, AT_INFINITY), 2).value for K in continua if x in K and y in K),
                default=math.inf,
            )
            assert ferrand_hyperbolic(g, x, y, 2) == expected

    def test_triangle_inequality(self, random_graph):
        g = random_graph
        interior = sorted(set(range(g.n_vertices)) - g.infinity_boundary)
        h = {(x, y): ferrand_hyperbolic(g, x, y, 2) for x in interior for y in interior}
        for x, y, z in itertools.product(interior, repeat=3):
            assert h[x, z] <= h[x, y] + h[y, z] + 1e-9
            assert h[x, y] == h[y, x]

    def test_path_upper_bound(self, random_graph):
        g = random_graph
        interior = sorted(set(range(g.n_vertices)) - g.infinity_boundary)
        for x, y in itertools.combinations(interior, 2):
            assert ferrand_hyperbolic(g, x, y, 2, mode="path_upper") >= ferrand_hyperbolic(g, x, y, 2) - 1e-12

    def test_path_upper_on_a_large_grid(self):
        g = grid_graph(16)
        x, y = 17, 238
        value = ferrand_hyperbolic(g, x, y, 2, mode="path_upper")
        assert 0 < value < math.inf
        interior = g.nx_graph.subgraph(set(range(g.n_vertices)) - g.infinity_boundary)
        geodesic = frozenset(next(nx.all_shortest_paths(interior, x, y, weight="length")))
        assert value <= p_capacity(g, Capacitor(geodesic, AT_INFINITY), 2).value

    def test_exact_limit(self):
        with pytest.raises(TooLargeForExact):
            ferrand_hyperbolic(grid_graph(4), 5, 6, 2)
        assert ferrand_hyperbolic(grid_graph(4), 5, 6, 2, limit=16) > 0


class TestRandomSmallGraphs:
    @pytest.mark.parametrize("seed", range(50))
    def test_exact_distance_is_a_pseudo_distance(self, seed):
        rng = np.random.default_rng(300 + seed)
        n = int(rng.integers(4, 9))
        g = random_connected_graph(rng, n, extra_edge_probability=0.3, boundary_size=1 + seed % 2)
        interior = sorted(set(range(n)) - g.infinity_boundary)
        continua = connected_subsets(g, avoid=g.infinity_boundary)
        capacities = {K: p_capacity(g, Capacitor(K, AT_INFINITY), 2).value for K in continua}

        h = {}
        for x, y in itertools.product(interior, repeat=2):
            h[x, y] = ferrand_hyperbolic(g, x, y, 2)
            expected = min((c for K, c in capacities.items() if x in K and y in K), default=math.inf)
            assert h[x, y] == expected
        for x, y, z in itertools.product(interior, repeat=3):
            assert h[x, z] <= h[x, y] + h[y, z] + 1e-9
            assert h[x, y] == h[y, x]

class TestParabolic:
    def test_path_closed_form(self):
        g = path_graph(8, ends_at_infinity=True)
        Q = 2
        values = [ferrand_parabolic(g, 1, y, Q) for y in range(2, 8)]
        for y, value in zip(range(2, 8), values):
            assert value == pytest.approx((y - 1) ** ((Q - 1) / Q))
        assert values == sorted(values)

    @pytest.mark.parametrize("n", [10, 20, 30, 40, 50])
    def test_grows_strictly_along_paths(self, n):
        g = path_graph(n, ends_at_infinity=True)
        values = [ferrand_parabolic(g, 1, y, 2, limit=n + 1) for y in range(2, n)]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx((n - 2) ** 0.5)

    def test_same_point(self):
        assert ferrand_parabolic(path_graph(4, ends_at_infinity=True), 2, 2, 3) == 0.0

    def test_heuristic_on_a_path(self):
        g = path_graph(8, ends_at_infinity=True)
        assert ferrand_parabolic(g, 2, 5, 2, mode="heuristic") == pytest.approx(3 ** 0.5)


class TestErrors:
    def test_needs_boundary(self):
        with pytest.raises(NoInfinityBoundary):
            ferrand_hyperbolic(cycle_graph(5), 0, 1, 2)
        with pytest.raises(NoInfinityBoundary):
            ferrand_parabolic(cycle_graph(5), 0, 1, 2)

    def test_needs_exponent_above_one(self, star):
        with pytest.raises(Unsupported):
            ferrand_hyperbolic(star, 0, 0, 1)

    def test_unknown_mode(self, star):
        with pytest.raises(Unsupported):
            ferrand_parabolic(star, 0, 1, 2, mode="path_upper")


if __name__ == "__main__":
    pytest.main(["-xvs", __file__])
