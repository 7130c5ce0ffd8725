import os
import sys
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

# Add the parent directory to the path so we can import our module
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.qclab.errors import Unsupported
from src.qclab.graph_lab.builders import grid_graph, path_graph, random_connected_graph
from src.qclab.graph_lab.capacity import p_energy
from src.qclab.graph_lab.graph import graph_from_document, load_graph_document
from src.qclab.graph_lab.monotone import compare_orders, flatten, is_monotone, straighten

BUMP = Path(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))) / "fixtures" / "graphs" / "bump6.yaml"


@pytest.fixture
def bump():
    doc = load_graph_document(BUMP.read_text())
    return graph_from_document(doc), doc.function, doc.domain


class TestBump:
    def test_bump_is_not_monotone(self, bump):
        g, u, domain = bump
        assert not is_monotone(g, u, domain)

    def test_flatten_at_the_bump_level(self, bump):
        g, u, domain = bump
        assert flatten(g, u, 2, domain).tolist() == [0, 1, 2, 2, 3, 4, 5]
        # at level 1 every component reaches an end of the path
        assert flatten(g, u, 1, domain).tolist() == u

    def test_straighten(self, bump):
        g, u, domain = bump
        result = straighten(g, u, domain)
        assert result == (0.0, 1.0, 2.0, 2.0, 3.0, 4.0, 5.0)
        assert is_monotone(g, result, domain)
        assert p_energy(g, u, 2) == 9.0
        assert p_energy(g, result, 2) == 5.0


class TestMonotone:
    def test_linear_function_on_a_path(self):
        g = path_graph(5)
        assert is_monotone(g, [0, 1, 2, 3, 4, 5], range(1, 5))

    def test_interior_maximum(self):
        g = path_graph(4)
        assert not is_monotone(g, [0, 1, 5, 1, 0], {1, 2, 3})
        # a maximum outside the domain is allowed
        assert is_monotone(g, [0, 1, 5, 1, 0], {1, 3})

    def test_empty_domain(self):
        g = path_graph(3)
        assert is_monotone(g, [3, 0, 3, 0], [])
        assert straighten(g, [3, 0, 3, 0], []) == (3.0, 0.0, 3.0, 0.0)


class TestStraightening:
    def test_random_functions(self):
        for seed in range(500):
            rng = np.random.default_rng(seed)
            g = random_connected_graph(rng, 14, extra_edge_probability=0.15)
            u = rng.integers(0, 6, size=g.n_vertices).astype(float)
            domain = {int(v) for v in rng.choice(g.n_vertices, size=9, replace=False)}
            outside = [v for v in range(g.n_vertices) if v not in domain]

            for order in ("increasing", "decreasing"):
                result = np.array(straighten(g, u, domain, order=order))
                assert is_monotone(g, result, domain), (seed, order)
                assert np.array_equal(result[outside], u[outside])
                for p in (1, 2, 4):
                    assert p_energy(g, result, p) <= p_energy(g, u, p) + 1e-9, (seed, order, p)

    def test_unknown_order(self):
        with pytest.raises(Unsupported):
            straighten(path_graph(3), [0, 1, 0, 1], {1, 2}, order="random")

    def test_gradient_never_grows_edgewise(self):
        rng = np.random.default_rng(11)
        g = grid_graph(6)
        u = rng.normal(size=g.n_vertices)
        domain = set(range(g.n_vertices)) - g.infinity_boundary
        result = np.array(straighten(g, u, domain))
        before = np.abs(u[g.edge_u] - u[g.edge_v])
        after = np.abs(result[g.edge_u] - result[g.edge_v])
        assert np.all(after <= before + 1e-15)


class TestOrderComparison:
    def test_orders_can_reach_different_fixpoints(self):
        g = path_graph(4)
        u = [0, 2, 1, 2, 3]
        with patch("src.qclab.graph_lab.monotone.logger") as mock_logger:
            comparison = compare_orders(g, u, {1, 2, 3})
        assert comparison.increasing == (0.0, 1.0, 1.0, 2.0, 3.0)
        assert comparison.decreasing == (0.0, 2.0, 2.0, 2.0, 3.0)
        assert comparison.discrepancy
        assert comparison.max_difference == 1.0
        mock_logger.warning.assert_called_once()
        # both fixpoints are monotone and cheaper than u
        for result in (comparison.increasing, comparison.decreasing):
            assert is_monotone(g, result, {1, 2, 3})
            assert p_energy(g, result, 2) < p_energy(g, u, 2)

    def test_orders_agree_on_an_interior_peak(self):
        comparison = compare_orders(path_graph(4), [0, 1, 5, 1, 0], {1, 2, 3})
        assert comparison.increasing == comparison.decreasing == (0.0,) * 5
        assert not comparison.discrepancy
        assert comparison.max_difference == 0.0

    def test_bump_depends_on_the_order(self, bump):
        g, u, domain = bump
        comparison = compare_orders(g, u, domain)
        assert comparison.increasing == (0.0, 1.0, 2.0, 2.0, 3.0, 4.0, 5.0)
        assert comparison.decreasing == (0.0, 1.0, 3.0, 3.0, 3.0, 4.0, 5.0)
        assert comparison.discrepancy
        assert p_energy(g, comparison.decreasing, 2) == 7.0

    def test_discrepancy_flag_matches_the_fixpoints(self):
        for seed in range(200):
            rng = np.random.default_rng(1000 + seed)
            g = random_connected_graph(rng, 12, extra_edge_probability=0.15)
            u = rng.integers(0, 5, size=g.n_vertices).astype(float)
            domain = {int(v) for v in rng.choice(g.n_vertices, size=8, replace=False)}
            comparison = compare_orders(g, u, domain)
            assert comparison.discrepancy == (comparison.increasing != comparison.decreasing)
            assert is_monotone(g, comparison.increasing, domain)
            assert is_monotone(g, comparison.decreasing, domain)

if __name__ == "__main__":
    pytest.main(["-xvs", __file__])
