import math
import os
import sys

import numpy as np
import pytest

# Add the parent directory to the path so we can import our module
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.qclab.errors import BadExponent
from src.qclab.graph_lab.builders import grid_graph, path_graph
from src.qclab.graph_lab.sobolev import sobolev_constant_probe, sobolev_terms


class TestSobolevTerms:
    def test_indicator_of_a_vertex(self):
        g = path_graph(4)
        u = [0.0, 0.0, 1.0, 0.0, 0.0]
        lhs, energy, sup = sobolev_terms(g, u, N=2, q=1)
        assert lhs == pytest.approx(1.0)
        assert energy == pytest.approx(2.0)
        assert sup == 1.0


class TestProbe:
    def test_constant_function(self):
        g = grid_graph(6)
        probe = sobolev_constant_probe(g, 2, 1, functions=[np.ones(g.n_vertices)])
        assert probe.exponent == 2.0
        assert probe.C_q == 0.0
        assert probe.C_inf == pytest.approx(g.total_measure ** 0.5)
        assert probe.violations == 0
        # without the constant term no finite C_q fits
        assert probe.candidates[0] == (math.inf, 0.0)

    def test_grid_samples(self):
        g = grid_graph(30)
        probe = sobolev_constant_probe(g, 2, 1, samples=60, seed=3)
        assert probe.samples == 60
        assert math.isfinite(probe.C_q)
        assert probe.violations == 0

    def test_seeded(self):
        g = grid_graph(8)
        assert sobolev_constant_probe(g, 3, 1.5, seed=9) == sobolev_constant_probe(g, 3, 1.5, seed=9)

    @pytest.mark.parametrize("N, q", [(1, 0.5), (2, 2), (2, 3), (3, 0.5)])
    def test_bad_exponents(self, N, q):
        with pytest.raises(BadExponent):
            sobolev_constant_probe(path_graph(3), N, q)


if __name__ == "__main__":
    pytest.main(["-xvs", __file__])
