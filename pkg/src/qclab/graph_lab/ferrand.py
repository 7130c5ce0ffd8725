"""
Ferrand distances on graphs with an infinity boundary.

hyperbolic(x, y) = min Cap_Q(K; infinity) over connected vertex sets K
containing x and y.

parabolic(x, y) = P(x, y)^(-1/Q), where P(x, y) is the minimal Cap_Q(E; F)
over disjoint infinity-continua E containing x and F containing y. An
infinity-continuum is a connected vertex set meeting the infinity boundary.
"""

import itertools
import logging
import math
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Set

import networkx as nx

from src.qclab.config import get_settings
from src.qclab.errors import InvalidGraph, NoInfinityBoundary, TooLargeForExact, Unsupported
from src.qclab.graph_lab.capacity import check_exponent, p_capacity
from src.qclab.graph_lab.graph import AT_INFINITY, Capacitor, MetricMeasureGraph

logger = logging.getLogger("qclab.graph_lab.ferrand")

EXACT = "exact"
PATH_UPPER = "path_upper"
HEURISTIC = "heuristic"


def _check(g: MetricMeasureGraph, x: int, y: int, Q: float, mode: str, exact: bool, limit: Optional[int]):
    if not g.infinity_boundary:
        raise NoInfinityBoundary("Ferrand distances need a nonempty infinity boundary")
    for v in (x, y):
        if not 0 <= v < g.n_vertices:
            raise InvalidGraph(f"Vertex {v} is not in the graph")
    if not Q > 1:
        raise Unsupported(f"Ferrand distances need Q > 1, got {Q}")
    check_exponent(Q)
    if exact:
        limit = limit or get_settings().exact_ferrand_limit
        if g.n_vertices > limit:
            raise TooLargeForExact(
                f"Exact {mode} enumeration is exponential; {g.n_vertices} vertices exceeds {limit}",
                {"vertices": g.n_vertices, "limit": limit},
            )


def connected_subsets(g: MetricMeasureGraph, avoid: Iterable[int] = ()) -> List[FrozenSet[int]]:
    """All nonempty connected vertex subsets disjoint from ``avoid``, by bitmask order."""
    forbidden = 0
    for v in avoid:
        forbidden |= 1 << v
    masks = g.neighbor_masks
    result = []
    for subset in range(1, 1 << g.n_vertices):
        if subset & forbidden:
            continue
        start = subset & -subset
        seen, frontier = start, start
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            grow = masks[low.bit_length() - 1] & subset & ~seen
            seen |= grow
            frontier |= grow
        if seen == subset:
            result.append(frozenset(v for v in range(g.n_vertices) if subset >> v & 1))
    return result


@lru_cache(maxsize=64)
def _capacity_at_infinity_table(g: MetricMeasureGraph, Q: float) -> Dict[FrozenSet[int], float]:
    table = {}
    for K in connected_subsets(g, avoid=g.infinity_boundary):
        table[K] = p_capacity(g, Capacitor(K, AT_INFINITY), Q).value
    logger.debug(f"Capacity table with {len(table)} continua at Q={Q}")
    return table


def _set_capacity(g: MetricMeasureGraph, K: Iterable[int], Q: float) -> float:
    return p_capacity(g, Capacitor(frozenset(K), AT_INFINITY), Q).value


def ferrand_hyperbolic(
    g: MetricMeasureGraph, x: int, y: int, Q: float, mode: str = EXACT, limit: Optional[int] = None
) -> float:
    if mode not in (EXACT, PATH_UPPER):
        raise Unsupported(f"Unknown mode {mode!r}", {"modes": [EXACT, PATH_UPPER]})
    _check(g, x, y, Q, "hyperbolic", mode == EXACT, limit)
    if x in g.infinity_boundary or y in g.infinity_boundary:
        return math.inf

    if mode == EXACT:
        table = _capacity_at_infinity_table(g, float(Q))
        return min((c for K, c in table.items() if x in K and y in K), default=math.inf)

    logger.warning("Path-based hyperbolic Ferrand distance is an upper bound")
    interior = g.nx_graph.subgraph(set(range(g.n_vertices)) - g.infinity_boundary)
    if not nx.has_path(interior, x, y):
        return math.inf
    beam = get_settings().path_beam_width
    # unit grids have combinatorially many geodesics
    candidates: Set[FrozenSet[int]] = {
        frozenset(path)
        for path in itertools.islice(nx.all_shortest_paths(interior, x, y, weight="length"), beam)
    }
    candidates.update(
        frozenset(path)
        for path in itertools.islice(nx.shortest_simple_paths(interior, x, y, weight="length"), beam)
    )
    return min(_set_capacity(g, K, Q) for K in candidates)


def minimal_continua(g: MetricMeasureGraph, x: int) -> List[FrozenSet[int]]:
    """Simple paths from x to the infinity boundary meeting it only at their end."""
    boundary = g.infinity_boundary
    if x in boundary:
        return [frozenset({x})]
    interior = set(range(g.n_vertices)) - boundary
    continua = set()
    for b in sorted(boundary):
        sub = g.nx_graph.subgraph(interior | {b})
        for path in nx.all_simple_paths(sub, x, b):
            continua.add(frozenset(path))
    return sorted(continua, key=lambda K: (len(K), sorted(K)))


def _parabolic_from_capacity(P: float, Q: float) -> float:
    if P == 0:
        return math.inf
    if math.isinf(P):
        return 0.0
    return P ** (-1.0 / Q)


def _pair_capacity(g: MetricMeasureGraph, E: FrozenSet[int], F: FrozenSet[int], Q: float) -> float:
    return p_capacity(g, Capacitor(E, F), Q).value


def ferrand_parabolic(
    g: MetricMeasureGraph, x: int, y: int, Q: float, mode: str = EXACT, limit: Optional[int] = None
) -> float:
    if mode not in (EXACT, HEURISTIC):
        raise Unsupported(f"Unknown mode {mode!r}", {"modes": [EXACT, HEURISTIC]})
    _check(g, x, y, Q, "parabolic", mode == EXACT, limit)
    if x == y:
        return 0.0

    if mode == EXACT:
        best = math.inf
        for E in minimal_continua(g, x):
            for F in minimal_continua(g, y):
                if E & F:
                    continue
                best = min(best, _pair_capacity(g, E, F, Q))
        return _parabolic_from_capacity(best, Q)

    logger.warning("Ray-based parabolic Ferrand distance is a heuristic estimate")
    G = g.nx_graph
    boundary = g.infinity_boundary
    _, E_path = nx.multi_source_dijkstra(G, boundary, target=x, weight="length")
    E = frozenset(E_path)
    rest = G.subgraph(set(range(g.n_vertices)) - E)
    if y in E or not (boundary - E) or not any(nx.has_path(rest, y, b) for b in boundary - E):
        return 0.0
    _, F_path = nx.multi_source_dijkstra(rest, boundary - E, target=y, weight="length")
    return _parabolic_from_capacity(_pair_capacity(g, E, frozenset(F_path), Q), Q)
