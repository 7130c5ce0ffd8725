"""Standard graphs and point clouds for experiments and tests."""

import itertools
from typing import Iterable, List, Optional, Tuple

import numpy as np

from src.qclab.graph_lab.graph import Edge, MetricMeasureGraph


def _unit(n: int) -> Tuple[float, ...]:
    return (1.0,) * n


def path_graph(n_edges: int, ends_at_infinity: bool = False) -> MetricMeasureGraph:
    """Vertices 0..n_edges joined by unit edges."""
    edges = tuple(Edge(i, i + 1) for i in range(n_edges))
    boundary = frozenset({0, n_edges}) if ends_at_infinity else frozenset()
    return MetricMeasureGraph(n_edges + 1, edges, _unit(n_edges + 1), boundary)


def cycle_graph(n: int) -> MetricMeasureGraph:
    edges = tuple(Edge(i, (i + 1) % n) for i in range(n))
    return MetricMeasureGraph(n, edges, _unit(n))


def star_graph(leaves: int, leaves_at_infinity: bool = True) -> MetricMeasureGraph:
    """Centre 0 with leaves 1..leaves."""
    edges = tuple(Edge(0, i) for i in range(1, leaves + 1))
    boundary = frozenset(range(1, leaves + 1)) if leaves_at_infinity else frozenset()
    return MetricMeasureGraph(leaves + 1, edges, _unit(leaves + 1), boundary)


def grid_vertex(side: int, i: int, j: int) -> int:
    return i * side + j


def grid_graph(side: int, rim_at_infinity: bool = True) -> MetricMeasureGraph:
    """side x side grid with unit edges; the outer rim is the infinity boundary."""
    edges = []
    for i, j in itertools.product(range(side), repeat=2):
        if i + 1 < side:
            edges.append(Edge(grid_vertex(side, i, j), grid_vertex(side, i + 1, j)))
        if j + 1 < side:
            edges.append(Edge(grid_vertex(side, i, j), grid_vertex(side, i, j + 1)))
    rim = frozenset(
        grid_vertex(side, i, j)
        for i, j in itertools.product(range(side), repeat=2)
        if side > 1 and (i in (0, side - 1) or j in (0, side - 1))
    )
    return MetricMeasureGraph(side * side, tuple(edges), _unit(side * side), rim if rim_at_infinity else frozenset())


def grid_ball(side: int, radius: float) -> frozenset:
    """Grid vertices within Euclidean distance ``radius`` of the centre."""
    c = (side - 1) / 2
    return frozenset(
        grid_vertex(side, i, j)
        for i, j in itertools.product(range(side), repeat=2)
        if (i - c) ** 2 + (j - c) ** 2 <= radius ** 2
    )


def parallel_paths(n_edges: int, copies: int = 2) -> MetricMeasureGraph:
    """
    ``copies`` internally disjoint paths of ``n_edges`` unit edges between
    vertex 0 and vertex 1.
    """
    edges: List[Edge] = []
    next_vertex = 2
    for _ in range(copies):
        previous = 0
        for step in range(n_edges - 1):
            edges.append(Edge(previous, next_vertex))
            previous = next_vertex
            next_vertex += 1
        edges.append(Edge(previous, 1))
    return MetricMeasureGraph(next_vertex, tuple(edges), _unit(next_vertex))


def random_connected_graph(
    rng: np.random.Generator,
    n: int,
    extra_edge_probability: float = 0.2,
    random_lengths: bool = True,
    boundary_size: int = 0,
) -> MetricMeasureGraph:
    """Random spanning tree plus random extra edges."""
    order = rng.permutation(n)
    pairs = set()
    for k in range(1, n):
        parent = order[int(rng.integers(0, k))]
        child = order[k]
        pairs.add((min(parent, child), max(parent, child)))
    for u, v in itertools.combinations(range(n), 2):
        if (u, v) not in pairs and rng.random() < extra_edge_probability:
            pairs.add((u, v))
    edges = tuple(
        Edge(int(u), int(v), float(rng.uniform(0.5, 2.0)) if random_lengths else 1.0)
        for u, v in sorted(pairs)
    )
    measure = tuple(float(x) for x in rng.uniform(0.5, 2.0, size=n)) if random_lengths else _unit(n)
    boundary = frozenset(int(b) for b in rng.choice(n, size=boundary_size, replace=False)) if boundary_size else frozenset()
    return MetricMeasureGraph(n, edges, measure, boundary)


def from_edge_list(n: int, pairs: Iterable[Tuple[int, int]], boundary: Optional[Iterable[int]] = None) -> MetricMeasureGraph:
    """Unit-length, unit-weight graph on vertices 0..n-1 from (u, v) pairs."""
    edges = tuple(Edge(int(u), int(v)) for u, v in pairs)
    return MetricMeasureGraph(n, edges, _unit(n), frozenset(boundary or ()))


def grid_points(side: int, spacing: float = 1.0) -> np.ndarray:
    """side x side grid of points in the plane, row-major."""
    coords = np.arange(side, dtype=float) * spacing
    xx, yy = np.meshgrid(coords, coords, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])
