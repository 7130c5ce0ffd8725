"""
Perimeter, total variation, coarea and isoperimetric profiles on graphs.

With TV(u) = sum_e (w_e / len(e)) |u(x) - u(y)| and Per(S) the total
variation of the indicator of S, the coarea formula is an exact identity
(layer-cake decomposition over the finitely many values of u).
"""

import logging
import math
from typing import FrozenSet, Iterable, Optional, Sequence

import numpy as np

from src.qclab.config import get_settings
from src.qclab.errors import TooLargeForExact, Unsupported
from src.qclab.graph_lab.graph import MetricMeasureGraph, as_vertex_function

logger = logging.getLogger("qclab.graph_lab.perimeter")

EXACT = "exact"
HEURISTIC = "heuristic"

# subsets are enumerated as uint32 bitmasks
MASK_BITS = 32


def graph_boundary(g: MetricMeasureGraph, S: Iterable[int]) -> FrozenSet[int]:
    """External vertex boundary: vertices outside S adjacent to S."""
    S = frozenset(S)
    return frozenset(y for x in S for y in g.nx_graph.neighbors(x) if y not in S)


def _indicator(g: MetricMeasureGraph, S: Iterable[int]) -> np.ndarray:
    u = np.zeros(g.n_vertices)
    u[list(frozenset(S))] = 1.0
    return u


def total_variation(g: MetricMeasureGraph, u: Sequence[float]) -> float:
    u = as_vertex_function(g, u)
    return math.fsum(g.weights / g.lengths * np.abs(u[g.edge_u] - u[g.edge_v]))


def perimeter(g: MetricMeasureGraph, S: Iterable[int]) -> float:
    """Sum of w_e / len(e) over edges leaving S."""
    return total_variation(g, _indicator(g, S))


def coarea_residual(g: MetricMeasureGraph, u: Sequence[float]) -> float:
    """|sum_t Per({u > t}) dt - TV(u)| over the distinct values of u."""
    u = as_vertex_function(g, u)
    levels = np.unique(u)
    conductance = g.weights / g.lengths
    terms = []
    for low, high in zip(levels[:-1], levels[1:]):
        above = u > low
        crossing = above[g.edge_u] != above[g.edge_v]
        terms.append(math.fsum(conductance[crossing]) * (high - low))
    return abs(math.fsum(terms) - total_variation(g, u))


def _profile_exact(g: MetricMeasureGraph, volume: float) -> float:
    n = g.n_vertices
    full = (1 << n) - 1
    # closed neighborhoods of every vertex subset, built one bit at a time
    reach = np.zeros(1 << n, dtype=np.uint32)
    for b, mask in enumerate(g.neighbor_masks):
        reach[1 << b : 1 << (b + 1)] = reach[: 1 << b] | np.uint32(mask)
    subsets = np.arange(1 << n, dtype=np.uint32)
    boundary_sizes = np.bitwise_count(reach & ~subsets)
    sizes = np.bitwise_count(subsets)
    admissible = (sizes >= volume) & (subsets != full)
    if not admissible.any():
        return math.inf
    return float(boundary_sizes[admissible].min())


def _profile_greedy(g: MetricMeasureGraph, volume: float) -> float:
    n = g.n_vertices
    target = max(1, math.ceil(volume))
    if target >= n:
        return math.inf
    best = math.inf
    for start in range(n):
        S = {start}
        while len(S) < target:
            frontier = graph_boundary(g, S)
            S.add(min(frontier, key=lambda v: (len(graph_boundary(g, S | {v})), v)))
        best = min(best, len(graph_boundary(g, S)))
    return float(best)


def isoperimetric_profile(
    g: MetricMeasureGraph, volume: float, mode: str = EXACT, limit: Optional[int] = None
) -> float:
    """
    min #boundary(S) over proper vertex subsets S with #S >= volume.

    ``heuristic`` grows greedy minimum-boundary sets from every vertex and
    returns an upper bound.
    """
    if mode == EXACT:
        limit = limit or get_settings().exact_profile_limit
        if limit > MASK_BITS:
            logger.warning(f"Exact profile limit {limit} clamped to {MASK_BITS} vertices")
            limit = MASK_BITS
        if g.n_vertices > limit:
            raise TooLargeForExact(
                f"Exact profile enumerates 2^n subsets; {g.n_vertices} vertices exceeds {limit}",
                {"vertices": g.n_vertices, "limit": limit},
            )
        return _profile_exact(g, volume)
    if mode == HEURISTIC:
        logger.warning(f"Heuristic isoperimetric profile at volume {volume} is an upper bound")
        return _profile_greedy(g, volume)
    raise Unsupported(f"Unknown profile mode {mode!r}", {"modes": [EXACT, HEURISTIC]})
