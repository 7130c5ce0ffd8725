"""
Point clouds and Kanai nets.

A net of scale eps is a maximal eps-separated subset of the cloud, chosen
greedily in index order. Net points closer than 3 eps are joined by an edge,
and every cloud point gives its mass to the nearest net point (ties go to the
lowest index).
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence

import networkx as nx
import numpy as np
import yaml
from pydantic import BaseModel, ValidationError, model_validator
from scipy.spatial import cKDTree

from src.qclab.errors import DisconnectedNet, EmptyCloud, InvalidMetric
from src.qclab.graph_lab.graph import Edge, MetricMeasureGraph

logger = logging.getLogger("qclab.graph_lab.net")

METRIC_TOLERANCE = 1e-9
METRIC_SPOT_CHECKS = 1000


@dataclass(frozen=True, eq=False)
class PointCloud:
    """
    Points in Euclidean space, or an abstract finite metric given by a dense
    distance matrix. ``measure`` defaults to unit mass per point.
    """

    points: Optional[np.ndarray] = None
    distances: Optional[np.ndarray] = None
    measure: Optional[np.ndarray] = None
    seed: int = 0

    def __post_init__(self):
        if (self.points is None) == (self.distances is None):
            raise InvalidMetric("A cloud has either points or a distance matrix")
        if self.points is not None:
            points = np.asarray(self.points, dtype=float)
            if points.ndim == 1:
                points = points.reshape(-1, 1)
            object.__setattr__(self, "points", points)
            n = len(points)
        else:
            D = np.asarray(self.distances, dtype=float)
            if D.ndim != 2 or D.shape[0] != D.shape[1]:
                raise InvalidMetric(f"Distance matrix must be square, got shape {D.shape}")
            object.__setattr__(self, "distances", D)
            n = len(D)
        if n == 0:
            raise EmptyCloud("The point cloud is empty")
        measure = np.ones(n) if self.measure is None else np.asarray(self.measure, dtype=float)
        if measure.shape != (n,) or not np.all(measure > 0):
            raise InvalidMetric("Cloud measure must be positive, one value per point")
        object.__setattr__(self, "measure", measure)
        if self.distances is not None:
            self._spot_check()

    def __len__(self) -> int:
        return len(self.points) if self.points is not None else len(self.distances)

    def _spot_check(self):
        D = self.distances
        if not np.allclose(D, D.T, atol=METRIC_TOLERANCE) or np.any(np.abs(np.diag(D)) > METRIC_TOLERANCE):
            raise InvalidMetric("Distance matrix must be symmetric with a zero diagonal")
        if np.any(D < -METRIC_TOLERANCE):
            raise InvalidMetric("Distances must be nonnegative")
        rng = np.random.default_rng(self.seed)
        i, j, k = rng.integers(0, len(D), size=(3, METRIC_SPOT_CHECKS))
        violations = D[i, k] - D[i, j] - D[j, k] > METRIC_TOLERANCE
        if violations.any():
            a = int(np.flatnonzero(violations)[0])
            raise InvalidMetric(
                "Triangle inequality fails on a sampled triple",
                {"triple": [int(i[a]), int(j[a]), int(k[a])]},
            )

    @cached_property
    def tree(self) -> Optional[cKDTree]:
        return cKDTree(self.points) if self.points is not None else None

    def distances_from(self, i: int, targets: Optional[Sequence[int]] = None) -> np.ndarray:
        if self.distances is not None:
            row = self.distances[i]
            return row if targets is None else row[np.asarray(targets, dtype=int)]
        others = self.points if targets is None else self.points[np.asarray(targets, dtype=int)]
        return np.linalg.norm(others - self.points[i], axis=1)

    def distance(self, i: int, j: int) -> float:
        return float(self.distances_from(i, [j])[0])

    def neighbors_within(self, i: int, radius: float) -> np.ndarray:
        """Indices at distance <= radius from point i."""
        if self.tree is not None:
            return np.asarray(self.tree.query_ball_point(self.points[i], r=radius), dtype=int)
        return np.flatnonzero(self.distances[i] <= radius)

    def ball_masses(self, radius: float) -> np.ndarray:
        """mu(B(x, radius)) for every cloud point x (closed balls)."""
        masses = np.empty(len(self))
        for i in range(len(self)):
            masses[i] = self.measure[self.neighbors_within(i, radius)].sum()
        return masses


def _check_eps(eps: float):
    if not (math.isfinite(eps) and eps > 0):
        raise InvalidMetric(f"Net scale must be positive, got {eps}")


def net_centers(cloud: PointCloud, eps: float) -> List[int]:
    """Greedy maximal eps-separated subset, scanning points in index order."""
    _check_eps(eps)
    covered = np.zeros(len(cloud), dtype=bool)
    centers = []
    for i in range(len(cloud)):
        if covered[i]:
            continue
        centers.append(i)
        near = cloud.neighbors_within(i, eps)
        covered[near[cloud.distances_from(i, near) < eps]] = True
    return centers


def _assign_to_centers(cloud: PointCloud, centers: List[int]) -> np.ndarray:
    """Index into ``centers`` of the nearest centre of every point."""
    if cloud.points is not None:
        k = min(len(centers), 4)
        dist, idx = cKDTree(cloud.points[centers]).query(cloud.points, k=k)
        dist, idx = dist.reshape(len(cloud), k), idx.reshape(len(cloud), k)
        nearest = dist.min(axis=1, keepdims=True)
        tied = np.where(dist <= nearest + 1e-12, idx, len(centers))
        return tied.min(axis=1)
    return np.argmin(cloud.distances[:, centers], axis=1)


def build_net(cloud: PointCloud, eps: float) -> MetricMeasureGraph:
    centers = net_centers(cloud, eps)
    m = len(centers)

    if cloud.points is not None:
        pairs = sorted(cKDTree(cloud.points[centers]).query_pairs(3 * eps))
    else:
        sub = cloud.distances[np.ix_(centers, centers)]
        pairs = [(a, b) for a in range(m) for b in range(a + 1, m) if sub[a, b] <= 3 * eps]
    edges = tuple(Edge(a, b, cloud.distance(centers[a], centers[b])) for a, b in pairs)

    G = nx.Graph()
    G.add_nodes_from(range(m))
    G.add_edges_from(pairs)
    if not nx.is_connected(G):
        raise DisconnectedNet(
            f"Net of scale {eps} has {nx.number_connected_components(G)} components",
            {"eps": eps, "vertices": m},
        )

    owner = _assign_to_centers(cloud, centers)
    measure = np.bincount(owner, weights=cloud.measure, minlength=m)
    logger.info(f"Net of scale {eps}: {m} vertices, {len(edges)} edges from {len(cloud)} points")
    return MetricMeasureGraph(m, edges, tuple(float(x) for x in measure))


def net_order_bound(cloud: PointCloud, eps: float) -> float:
    """mu+(4 eps) / mu-(eps / 2): bounds the number of net neighbours of a vertex."""
    _check_eps(eps)
    upper = cloud.ball_masses(4 * eps).max()
    # eps/2-balls around eps-separated centres must stay disjoint
    lower = cloud.ball_masses(eps / 2 * (1 - 1e-12)).min()
    return float(upper / lower)


def growth_exponent(g: MetricMeasureGraph, centre: int, radii: Sequence[float]) -> float:
    """Least-squares slope of log mu(B(centre, r)) against log r."""
    d = g.distances_from([centre])
    radii = np.asarray(radii, dtype=float)
    masses = np.array([g.measure[d <= r].sum() for r in radii])
    slope, _ = np.polyfit(np.log(radii), np.log(masses), 1)
    return float(slope)


class CloudDocument(BaseModel):
    points: Optional[List[List[float]]] = None
    distance_matrix: Optional[List[List[float]]] = None
    measure: Optional[List[float]] = None

    @model_validator(mode="after")
    def one_source(self):
        if (self.points is None) == (self.distance_matrix is None):
            raise ValueError("give exactly one of points or distance_matrix")
        return self


def load_cloud(text: str, seed: int = 0) -> PointCloud:
    try:
        doc = CloudDocument(**(yaml.safe_load(text) or {}))
    except (yaml.YAMLError, ValidationError, TypeError) as e:
        raise InvalidMetric(f"Invalid cloud document: {e}") from e
    return PointCloud(
        points=None if doc.points is None else np.array(doc.points, dtype=float),
        distances=None if doc.distance_matrix is None else np.array(doc.distance_matrix, dtype=float),
        measure=None if doc.measure is None else np.array(doc.measure, dtype=float),
        seed=seed,
    )
