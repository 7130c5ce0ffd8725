"""
Finite metric-measure graphs.

A ``MetricMeasureGraph`` is an immutable connected weighted graph: edges carry
a length (the metric) and an energy weight, vertices carry a measure, and an
optional set of vertices plays the role of the point at infinity.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

from src.qclab.errors import InvalidCapacitor, InvalidGraph, NoInfinityBoundary, OverlappingSets

logger = logging.getLogger("qclab.graph_lab.graph")


class Infinity(Enum):
    AT_INFINITY = "inf"


AT_INFINITY = Infinity.AT_INFINITY


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    length: float = 1.0
    weight: Optional[float] = None


@dataclass(frozen=True, eq=False)
class MetricMeasureGraph:
    """
    Connected weighted graph on vertices 0..n_vertices-1.

    Missing edge weights default to length * (mu(u) + mu(v)) / 2.
    """

    n_vertices: int
    edges: Tuple[Edge, ...]
    vertex_measure: Tuple[float, ...]
    infinity_boundary: FrozenSet[int] = frozenset()

    def __post_init__(self):
        n = self.n_vertices
        if n < 1:
            raise InvalidGraph("A graph needs at least one vertex")
        measure = tuple(float(m) for m in self.vertex_measure)
        if len(measure) != n:
            raise InvalidGraph(f"{len(measure)} vertex measures for {n} vertices")
        if not all(math.isfinite(m) and m > 0 for m in measure):
            raise InvalidGraph("Vertex measures must be finite and positive")

        resolved, seen = [], set()
        for e in self.edges:
            e = e if isinstance(e, Edge) else Edge(*e)
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise InvalidGraph(f"Edge ({e.u}, {e.v}) has an endpoint outside 0..{n - 1}")
            if e.u == e.v:
                raise InvalidGraph(f"Self-loop at vertex {e.u}")
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in seen:
                raise InvalidGraph(f"Duplicate edge {key}")
            seen.add(key)
            length = float(e.length)
            if not (math.isfinite(length) and length > 0):
                raise InvalidGraph(f"Edge {key} needs a positive finite length, got {e.length}")
            weight = length * (measure[e.u] + measure[e.v]) / 2 if e.weight is None else float(e.weight)
            if not (math.isfinite(weight) and weight > 0):
                raise InvalidGraph(f"Edge {key} needs a positive finite weight, got {e.weight}")
            resolved.append(Edge(e.u, e.v, length, weight))

        boundary = frozenset(int(b) for b in self.infinity_boundary)
        if any(not 0 <= b < n for b in boundary):
            raise InvalidGraph(f"Infinity boundary {sorted(boundary)} has vertices outside 0..{n - 1}")

        object.__setattr__(self, "vertex_measure", measure)
        object.__setattr__(self, "edges", tuple(resolved))
        object.__setattr__(self, "infinity_boundary", boundary)

        if not nx.is_connected(self.nx_graph):
            raise InvalidGraph("Graph is not connected")

    @cached_property
    def nx_graph(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(self.n_vertices))
        for e in self.edges:
            G.add_edge(e.u, e.v, length=e.length, weight=e.weight)
        return G

    @cached_property
    def edge_u(self) -> np.ndarray:
        return np.array([e.u for e in self.edges], dtype=np.int64)

    @cached_property
    def edge_v(self) -> np.ndarray:
        return np.array([e.v for e in self.edges], dtype=np.int64)

    @cached_property
    def lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.edges], dtype=float)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.edges], dtype=float)

    @cached_property
    def measure(self) -> np.ndarray:
        return np.array(self.vertex_measure, dtype=float)

    @property
    def total_measure(self) -> float:
        return math.fsum(self.vertex_measure)

    @cached_property
    def neighbor_masks(self) -> Tuple[int, ...]:
        masks = [0] * self.n_vertices
        for e in self.edges:
            masks[e.u] |= 1 << e.v
            masks[e.v] |= 1 << e.u
        return tuple(masks)

    def neighbors(self, v: int) -> List[int]:
        return sorted(self.nx_graph.neighbors(v))

    def distances_from(self, sources: Iterable[int]) -> np.ndarray:
        """Shortest-path distance (edge lengths) to the nearest source."""
        lengths = nx.multi_source_dijkstra_path_length(self.nx_graph, set(sources), weight="length")
        d = np.full(self.n_vertices, np.inf)
        for v, dist in lengths.items():
            d[v] = dist
        return d

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        n = self.n_vertices
        m = coo_matrix(
            (np.concatenate([self.lengths, self.lengths]),
             (np.concatenate([self.edge_u, self.edge_v]), np.concatenate([self.edge_v, self.edge_u]))),
            shape=(n, n),
        ).tocsr()
        return shortest_path(m, method="D", directed=False)

    def is_connected_subset(self, vertices: Iterable[int]) -> bool:
        vertices = set(vertices)
        if not vertices:
            return False
        return nx.is_connected(self.nx_graph.subgraph(vertices))


VertexSet = FrozenSet[int]
Target = Union[VertexSet, Infinity]


@dataclass(frozen=True)
class Capacitor:
    E: VertexSet
    F: Target

    def resolve(self, g: MetricMeasureGraph) -> Tuple[VertexSet, VertexSet]:
        """Concrete (E, F) on g, with AT_INFINITY replaced by the infinity boundary."""
        E = frozenset(self.E)
        if not E:
            raise InvalidCapacitor("The set E of a capacitor must be nonempty")
        if self.F is AT_INFINITY:
            if not g.infinity_boundary:
                raise NoInfinityBoundary("Capacity at infinity needs a nonempty infinity boundary")
            F = g.infinity_boundary
        else:
            F = frozenset(self.F)
        for v in E | F:
            if not 0 <= v < g.n_vertices:
                raise InvalidCapacitor(f"Vertex {v} is not in the graph")
        return E, F


def disjoint_or_raise(E: Iterable[int], F: Iterable[int]):
    overlap = set(E) & set(F)
    if overlap:
        raise OverlappingSets(f"E and F share vertices {sorted(overlap)}", {"overlap": sorted(overlap)})


class GraphDocument(BaseModel):
    vertices: int = Field(gt=0)
    edges: List[List[float]] = Field(default_factory=list)
    measure: Optional[List[float]] = None
    infinity_boundary: List[int] = Field(default_factory=list)
    function: Optional[List[float]] = None
    domain: Optional[List[int]] = None


def graph_from_document(doc: GraphDocument) -> MetricMeasureGraph:
    edges = []
    for entry in doc.edges:
        if len(entry) not in (2, 3, 4):
            raise InvalidGraph(f"Edges are [u, v, length, weight], got {entry!r}")
        u, v = int(entry[0]), int(entry[1])
        if (u, v) != (entry[0], entry[1]):
            raise InvalidGraph(f"Edge endpoints must be integers, got {entry!r}")
        length = entry[2] if len(entry) > 2 else 1.0
        weight = entry[3] if len(entry) > 3 else None
        edges.append(Edge(u, v, length, weight))
    measure = doc.measure if doc.measure is not None else [1.0] * doc.vertices
    return MetricMeasureGraph(doc.vertices, tuple(edges), tuple(measure), frozenset(doc.infinity_boundary))


def load_graph_document(text: str) -> GraphDocument:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise InvalidGraph(f"Could not parse graph document: {e}") from e
    if not isinstance(raw, dict):
        raise InvalidGraph("Graph document must be a mapping")
    try:
        return GraphDocument(**raw)
    except ValidationError as e:
        raise InvalidGraph(f"Invalid graph document: {e}") from e


def load_graph(text: str) -> MetricMeasureGraph:
    g = graph_from_document(load_graph_document(text))
    logger.debug(f"Loaded graph with {g.n_vertices} vertices and {len(g.edges)} edges")
    return g


def graph_to_document(g: MetricMeasureGraph) -> Dict[str, Any]:
    return {
        "vertices": g.n_vertices,
        "edges": [[e.u, e.v, e.length, e.weight] for e in g.edges],
        "measure": list(g.vertex_measure),
        "infinity_boundary": sorted(g.infinity_boundary),
    }


def as_vertex_function(g: MetricMeasureGraph, u: Sequence[float]) -> np.ndarray:
    values = np.asarray(u, dtype=float)
    if values.shape != (g.n_vertices,):
        raise InvalidGraph(f"Vertex function has shape {values.shape}, expected ({g.n_vertices},)")
    return values
