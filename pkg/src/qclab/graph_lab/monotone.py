"""
Discrete monotone functions and straightening.

A vertex function is monotone on a domain when no connected component of a
strict super- or sublevel set {u > t}, {u < t} (components taken in the whole
graph) lies entirely inside the domain. Straightening repeatedly flattens such
components to the level value; this never increases the p-energy for any
p >= 1.
The fixpoint can depend on the order in which levels are swept;
`compare_orders` runs both orders and reports any difference.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np

from src.qclab.errors import Unsupported
from src.qclab.graph_lab.graph import MetricMeasureGraph, as_vertex_function

logger = logging.getLogger("qclab.graph_lab.monotone")

INCREASING = "increasing"
DECREASING = "decreasing"
ORDERS = (INCREASING, DECREASING)


def _trapped_components(g: MetricMeasureGraph, u: np.ndarray, t: float, domain: frozenset) -> List[set]:
    trapped = []
    for level_set in (np.flatnonzero(u > t), np.flatnonzero(u < t)):
        if not len(level_set):
            continue
        sub = g.nx_graph.subgraph(level_set.tolist())
        for component in nx.connected_components(sub):
            if component <= domain:
                trapped.append(component)
    return trapped


def is_monotone(g: MetricMeasureGraph, u: Sequence[float], domain: Iterable[int]) -> bool:
    domain = frozenset(domain)
    if not domain:
        return True
    u = as_vertex_function(g, u)
    return not any(_trapped_components(g, u, t, domain) for t in np.unique(u))


def flatten(g: MetricMeasureGraph, u: Sequence[float], a: float, domain: Iterable[int]) -> np.ndarray:
    """The modification u.a: trapped components of {u > a} and {u < a} set to a."""
    result = as_vertex_function(g, u).copy()
    for component in _trapped_components(g, result, a, frozenset(domain)):
        result[list(component)] = a
    return result


def straighten(
    g: MetricMeasureGraph,
    u: Sequence[float],
    domain: Iterable[int],
    order: str = INCREASING,
) -> Tuple[float, ...]:
    """
    Sweep u -> u.a over the distinct values a of u until nothing changes.

    ``order`` is ``increasing`` or ``decreasing``.
    """
    if order not in ORDERS:
        raise Unsupported(f"Unknown straightening order {order!r}", {"orders": list(ORDERS)})
    domain = frozenset(domain)
    current = as_vertex_function(g, u).copy()
    if not domain:
        return tuple(float(x) for x in current)
    sweeps = 0
    while True:
        sweeps += 1
        changed = False
        values = np.unique(current)
        if order == DECREASING:
            values = values[::-1]
        for a in values:
            flattened = flatten(g, current, a, domain)
            if not np.array_equal(flattened, current):
                current = flattened
                changed = True
        if not changed:
            break
    logger.debug(f"straighten reached a fixpoint after {sweeps} sweeps")
    return tuple(float(x) for x in current)


@dataclass(frozen=True)
class OrderComparison:
    increasing: Tuple[float, ...]
    decreasing: Tuple[float, ...]
    discrepancy: bool
    max_difference: float


def compare_orders(g: MetricMeasureGraph, u: Sequence[float], domain: Iterable[int]) -> OrderComparison:
    """Straighten in both level orders and report whether the fixpoints differ."""
    domain = frozenset(domain)
    up = straighten(g, u, domain, order=INCREASING)
    down = straighten(g, u, domain, order=DECREASING)
    difference = float(np.max(np.abs(np.subtract(up, down)))) if up else 0.0
    if difference > 0:
        logger.warning(f"Straightening fixpoints differ between level orders (max difference {difference})")
    return OrderComparison(up, down, difference > 0, difference)
