import math
import os
import sys

import numpy as np
import pytest

# Add the parent directory to the path so we can import our module
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.qclab.errors import EmptySample, WindowTooShort
from src.qclab.graph_lab.sequences import (
    defect_from_distances,
    distance_matrix,
    estimate_qi_constants,
    quasi_straight_defect,
    quasi_straight_lower_bound,
    snowflake_samples,
)


def line(a, b):
    return abs(a - b)


def snowflake(a, b):
    return math.sqrt(abs(a - b))


class TestDefects:
    def test_integers_on_the_line(self):
        report = quasi_straight_defect(list(range(-10, 11)), line)
        assert report.K_step == 0.0
        assert report.K_align == 0.0
        assert report.K == 0.0
        assert report.unbounded_both_sides
        assert report.window == 21

    def test_snowflake_line(self):
        report = quasi_straight_defect(list(range(-100, 101)), snowflake)
        assert report.K_step == 0.0
        assert 0.0 < report.K_align < 1.0
        assert report.unbounded_both_sides

    def test_long_steps(self):
        report = quasi_straight_defect([0, 3, 6, 9], line)
        assert report.K_step == 2.0
        assert report.K_align == 0.0

    def test_backtracking_costs_alignment(self):
        report = quasi_straight_defect([0, 1, 2, 1, 2, 3], line)
        assert report.K_align > 0.0

    def test_alternating_sequence_does_not_escape(self):
        escape = []
        for n in (8, 16, 32, 64):
            report = quasi_straight_defect([k % 2 for k in range(n)], line)
            assert not report.unbounded_both_sides
            escape.append(report.escape_defect)
        assert all(a < b for a, b in zip(escape, escape[1:]))

    def test_matrix_entry_point(self):
        seq = [0.0, 1.5, 2.0, 4.0]
        assert defect_from_distances(distance_matrix(seq, line)) == quasi_straight_defect(seq, line)

    def test_short_window(self):
        with pytest.raises(WindowTooShort):
            quasi_straight_defect([0, 1], line)


class TestLowerBound:
    def test_bound_holds_on_the_snowflake(self):
        seq = list(range(0, 60))
        report = quasi_straight_defect(seq, snowflake)
        D = distance_matrix(seq, snowflake)
        rng = np.random.default_rng(0)
        for _ in range(500):
            i, m, n, j = sorted(rng.integers(0, len(seq), size=4))
            assert D[i, j] >= quasi_straight_lower_bound(report, D[m, n]) - 1e-12

    def test_exact_for_geodesics(self):
        report = quasi_straight_defect(list(range(10)), line)
        assert quasi_straight_lower_bound(report, 7.0) == 7.0


class TestQIFit:
    def test_identity(self):
        fit = estimate_qi_constants([(d, d) for d in np.geomspace(0.1, 1000, 50)])
        assert fit.L == pytest.approx(1.0)
        assert fit.C == 0.0
        assert not fit.no_uniform_lower_bound
        assert not fit.not_large_scale_lipschitz

    def test_doubling(self):
        fit = estimate_qi_constants([(d, 2 * d) for d in np.geomspace(0.1, 1000, 50)])
        assert fit.L == pytest.approx(2.0)
        assert fit.C == 0.0
        assert fit.lower_L == pytest.approx(0.5)

    def test_snowflake_has_no_lower_bound(self):
        fit = estimate_qi_constants(snowflake_samples(1e4))
        assert fit.no_uniform_lower_bound
        assert not fit.not_large_scale_lipschitz
        assert all(a > b for a, b in zip(fit.scale_upper, fit.scale_upper[1:]))

    def test_squaring_is_not_lipschitz(self):
        fit = estimate_qi_constants([(d, d * d) for d in np.geomspace(1.0, 1000, 40)])
        assert fit.not_large_scale_lipschitz

    def test_empty(self):
        with pytest.raises(EmptySample):
            estimate_qi_constants([])


if __name__ == "__main__":
    pytest.main(["-xvs", __file__])
