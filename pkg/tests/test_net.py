import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the parent directory to the path so we can import our module
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.qclab.errors import DisconnectedNet, EmptyCloud, InvalidMetric
from src.qclab.graph_lab.builders import grid_points
from src.qclab.graph_lab.net import (
    PointCloud,
    build_net,
    growth_exponent,
    load_cloud,
    net_centers,
    net_order_bound,
)

LINE = Path(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))) / "fixtures" / "clouds" / "line_points.yaml"


@pytest.fixture
def jittered_cloud():
    rng = np.random.default_rng(42)
    points = grid_points(30, spacing=1 / 3) + rng.uniform(-0.1, 0.1, size=(900, 2))
    return PointCloud(points=points, measure=rng.uniform(0.5, 2.0, size=900))


class TestNetCenters:
    def test_separated_and_covering(self, jittered_cloud):
        eps = 1.0
        centers = net_centers(jittered_cloud, eps)
        P = jittered_cloud.points
        C = P[centers]
        gaps = np.linalg.norm(C[:, None, :] - C[None, :, :], axis=2)
        np.fill_diagonal(gaps, np.inf)
        assert gaps.min() >= eps
        nearest = np.linalg.norm(P[:, None, :] - C[None, :, :], axis=2).min(axis=1)
        assert nearest.max() < eps

    def test_line_fixture(self):
        cloud = load_cloud(LINE.read_text())
        assert len(cloud) == 20
        assert net_centers(cloud, 1.0) == list(range(0, 20, 2))


class TestRandomClouds:
    @pytest.mark.parametrize("seed", range(20))
    def test_net_properties(self, seed):
        rng = np.random.default_rng(500 + seed)
        n = int(rng.integers(500, 2001))
        dim = 1 + seed % 2
        points = rng.uniform(0.0, 8.0, size=(n, dim))
        cloud = PointCloud(points=points, measure=rng.uniform(0.5, 2.0, size=n))
        eps = float(rng.uniform(1.5, 2.5))

        centers = net_centers(cloud, eps)
        C = points[centers]
        gaps = np.linalg.norm(C[:, None, :] - C[None, :, :], axis=2)
        np.fill_diagonal(gaps, np.inf)
        assert gaps.min(initial=np.inf) >= eps
        # maximal: no point is left eps-far from every centre
        nearest = np.linalg.norm(points[:, None, :] - C[None, :, :], axis=2).min(axis=1)
        assert nearest.max() < eps

        g = build_net(cloud, eps)
        assert g.n_vertices == len(centers)
        assert g.total_measure == pytest.approx(float(cloud.measure.sum()))
        degrees = [d for _, d in g.nx_graph.degree]
        assert max(degrees, default=0) + 1 <= net_order_bound(cloud, eps)

class TestBuildNet:
    def test_measure_is_preserved(self, jittered_cloud):
        g = build_net(jittered_cloud, 1.0)
        assert g.total_measure == pytest.approx(float(jittered_cloud.measure.sum()))

    def test_degree_within_order_bound(self, jittered_cloud):
        g = build_net(jittered_cloud, 1.0)
        bound = net_order_bound(jittered_cloud, 1.0)
        assert max(d for _, d in g.nx_graph.degree) + 1 <= bound

    def test_line_net(self):
        g = build_net(load_cloud(LINE.read_text()), 1.0)
        assert g.n_vertices == 10
        assert g.vertex_measure == (2.0,) * 10
        # centres one unit apart are joined up to three units
        assert len(g.edges) == 9 + 8 + 7

    def test_single_point(self):
        g = build_net(PointCloud(points=np.array([[0.0, 0.0]])), 1.0)
        assert g.n_vertices == 1
        assert g.edges == ()

    def test_disconnected(self):
        with pytest.raises(DisconnectedNet):
            build_net(PointCloud(points=np.array([[0.0], [10.0]])), 1.0)

    def test_distance_matrix_cloud(self):
        D = np.abs(np.subtract.outer(np.arange(6.0), np.arange(6.0)))
        g = build_net(PointCloud(distances=D), 2.0)
        assert g.n_vertices == 3
        assert g.total_measure == 6.0

    @pytest.mark.parametrize("eps", [2.0, 3.0])
    def test_plane_growth(self, eps):
        cloud = PointCloud(points=grid_points(100))
        centers = net_centers(cloud, eps)
        g = build_net(cloud, eps)
        distances = np.linalg.norm(cloud.points[centers] - np.array([49.5, 49.5]), axis=1)
        centre = int(np.argmin(distances))
        exponent = growth_exponent(g, centre, np.geomspace(4 * eps, 40, 8))
        assert exponent == pytest.approx(2.0, abs=0.2)


class TestInvalidClouds:
    def test_empty(self):
        with pytest.raises(EmptyCloud):
            PointCloud(points=np.zeros((0, 2)))

    def test_triangle_inequality(self):
        D = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
        with pytest.raises(InvalidMetric):
            PointCloud(distances=D)

    def test_bad_measure(self):
        with pytest.raises(InvalidMetric):
            PointCloud(points=np.zeros((2, 1)), measure=np.array([1.0, 0.0]))

    def test_bad_document(self):
        with pytest.raises(InvalidMetric):
            load_cloud("measure: [1.0]\n")

    def test_bad_scale(self, jittered_cloud):
        with pytest.raises(InvalidMetric):
            net_centers(jittered_cloud, 0.0)


if __name__ == "__main__":
    pytest.main(["-xvs", __file__])
