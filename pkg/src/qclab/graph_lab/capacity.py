"""
Discrete p-energy and p-capacity.

For an edge e = (x, y) the upper gradient is |u(x) - u(y)| / len(e) and the
p-energy of a vertex function is sum_e w_e * g_e^p. The p-capacity of a
capacitor (E; F) minimizes that energy over potentials with u = 1 on E and
u = 0 on F.

- p > 1: damped Newton iterations on the free vertices (the iteratively
  reweighted least squares step for p < 2), started from the
  distance-quotient potential.
- p = 1: minimum cut with edge capacities w_e / len(e).
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import coo_matrix, identity
from scipy.sparse.linalg import spsolve

from src.qclab.config import get_settings
from src.qclab.errors import BadExponent, BadRadii, InvalidCapacitor, SolverDiverged
from src.qclab.graph_lab.builders import grid_ball, grid_graph
from src.qclab.graph_lab.graph import (
    AT_INFINITY,
    Capacitor,
    MetricMeasureGraph,
    as_vertex_function,
    disjoint_or_raise,
)

logger = logging.getLogger("qclab.graph_lab.capacity")

GRADIENT_FLOOR = 1e-9
ARMIJO = 1e-4
MIN_STEP = 1e-12


@dataclass(frozen=True)
class CapacityResult:
    value: float
    potential: Tuple[float, ...]
    p: float
    iterations: int
    residual: float
    method: str
    # accepted at the stagnation tolerance instead of the solver tolerance
    degraded: bool = False


def check_exponent(p: float, minimum: float = 1.0):
    if not (isinstance(p, (int, float)) and math.isfinite(p) and p >= minimum):
        raise BadExponent(f"Exponent must be a finite number >= {minimum}, got {p}", {"p": p})


def p_energy(g: MetricMeasureGraph, u: Sequence[float], p: float) -> float:
    check_exponent(p)
    u = as_vertex_function(g, u)
    gradient = np.abs(u[g.edge_u] - u[g.edge_v]) / g.lengths
    return math.fsum(g.weights * gradient ** p)


def teichmuller_potential(g: MetricMeasureGraph, E: Iterable[int], F: Iterable[int]) -> np.ndarray:
    """d_E / (d_E + d_F): 0 on E, 1 on F."""
    E, F = frozenset(E), frozenset(F)
    if not E or not F:
        raise InvalidCapacitor("Both sets of the distance quotient must be nonempty")
    disjoint_or_raise(E, F)
    d_E = g.distances_from(E)
    d_F = g.distances_from(F)
    return d_E / (d_E + d_F)


def capacity_upper_teichmuller(g: MetricMeasureGraph, E: Iterable[int], F: Iterable[int], p: float) -> float:
    """Energy of the distance-quotient potential, an upper bound for Cap_p(E; F)."""
    return p_energy(g, teichmuller_potential(g, E, F), p)


def _min_cut(g: MetricMeasureGraph, E: frozenset, F: frozenset) -> CapacityResult:
    D = nx.DiGraph()
    D.add_nodes_from(range(g.n_vertices))
    for e in g.edges:
        c = e.weight / e.length
        D.add_edge(e.u, e.v, capacity=c)
        D.add_edge(e.v, e.u, capacity=c)
    source, sink = "source", "sink"
    # edges without a capacity attribute are uncapacitated
    D.add_edges_from((source, v) for v in E)
    D.add_edges_from((v, sink) for v in F)
    value, (reachable, _) = nx.minimum_cut(D, source, sink)
    potential = tuple(1.0 if v in reachable else 0.0 for v in range(g.n_vertices))
    return CapacityResult(float(value), potential, 1.0, 0, 0.0, "min_cut")


def _gradient(g: MetricMeasureGraph, base: np.ndarray, u: np.ndarray, p: float) -> np.ndarray:
    diff = u[g.edge_u] - u[g.edge_v]
    flux = p * base * np.abs(diff) ** (p - 1) * np.sign(diff)
    grad = np.zeros(g.n_vertices)
    np.add.at(grad, g.edge_u, flux)
    np.add.at(grad, g.edge_v, -flux)
    return grad


def _energy(g: MetricMeasureGraph, base: np.ndarray, u: np.ndarray, p: float) -> float:
    return math.fsum(base * np.abs(u[g.edge_u] - u[g.edge_v]) ** p)


def _newton_direction(
    g: MetricMeasureGraph, base: np.ndarray, u: np.ndarray, p: float, free: np.ndarray, grad_free: np.ndarray
) -> np.ndarray:
    diff = np.abs(u[g.edge_u] - u[g.edge_v])
    curvature = p - 1 if p >= 2 else 1.0
    c = p * curvature * base * np.maximum(diff, GRADIENT_FLOOR) ** (p - 2)
    n = g.n_vertices
    rows = np.concatenate([g.edge_u, g.edge_v, g.edge_u, g.edge_v])
    cols = np.concatenate([g.edge_u, g.edge_v, g.edge_v, g.edge_u])
    vals = np.concatenate([c, c, -c, -c])
    L = coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    L_ff = L[free][:, free]
    regularizer = 1e-12 * max(float(c.max()), 1.0)
    system = (L_ff + regularizer * identity(L_ff.shape[0], format="csr")).tocsc()
    return np.atleast_1d(spsolve(system, -grad_free))


def _solve_p_laplace(
    g: MetricMeasureGraph,
    E: frozenset,
    F: frozenset,
    p: float,
    tolerance: float,
    max_iterations: int,
    stagnation_tolerance: float,
) -> CapacityResult:
    u = 1.0 - teichmuller_potential(g, E, F)
    free = np.array([v not in E and v not in F for v in range(g.n_vertices)])
    base = g.weights * g.lengths ** (-p)
    if not free.any():
        value = _energy(g, base, u, p)
        return CapacityResult(value, tuple(u), p, 0, 0.0, "newton")

    residual = math.inf
    degraded = False
    for iteration in range(max_iterations + 1):
        grad = _gradient(g, base, u, p)
        residual = float(np.max(np.abs(grad[free])))
        if residual <= tolerance:
            break
        if iteration == max_iterations:
            raise SolverDiverged(
                f"p-capacity solver did not converge in {max_iterations} iterations",
                {"residual": residual, "p": p},
            )

        delta = _newton_direction(g, base, u, p, free, grad[free])
        slope = float(np.dot(grad[free], delta))
        current = _energy(g, base, u, p)
        step = 1.0
        while step >= MIN_STEP:
            candidate = u.copy()
            candidate[free] = np.clip(u[free] + step * delta, 0.0, 1.0)
            if _energy(g, base, candidate, p) <= current + ARMIJO * step * slope:
                u = candidate
                break
            step /= 2
        else:
            if residual <= stagnation_tolerance:
                logger.warning(
                    f"p-capacity line search stagnated at residual {residual:.3e} (p={p}); accepting"
                )
                degraded = True
                break
            raise SolverDiverged(
                f"p-capacity line search failed at residual {residual:.3e}",
                {"residual": residual, "p": p, "iteration": iteration},
            )
        logger.debug(f"newton iteration {iteration}: residual {residual:.3e}, step {step:.3e}")

    value = _energy(g, base, u, p)
    return CapacityResult(value, tuple(float(x) for x in u), p, iteration, residual, "newton", degraded)


def p_capacity(
    g: MetricMeasureGraph,
    cap: Capacitor,
    p: float,
    tolerance: Optional[float] = None,
    max_iterations: Optional[int] = None,
) -> CapacityResult:
    """Cap_p(E; F) on g. Overlapping E and F give an infinite capacity."""
    check_exponent(p)
    settings = get_settings()
    E, F = cap.resolve(g)
    if E & F:
        potential = tuple(1.0 if v in E else 0.0 for v in range(g.n_vertices))
        return CapacityResult(math.inf, potential, float(p), 0, 0.0, "overlap")
    if not F:
        return CapacityResult(0.0, (1.0,) * g.n_vertices, float(p), 0, 0.0, "empty")
    if p == 1:
        return _min_cut(g, E, F)
    return _solve_p_laplace(
        g,
        E,
        F,
        float(p),
        tolerance or settings.solver_tolerance,
        max_iterations or settings.max_iterations,
        settings.stagnation_tolerance,
    )


def annulus_capacity_bound(C: float, q: float, p: float, r: float, R: float) -> float:
    """
    Upper bound for Cap_q of the annulus B(o, r) / X minus B(o, R):

        p == q:  C (1 + q L) / L^q
        p != q:  C (-(q/(p-q)) R^(q-p) + (p/(p-q)) r^(q-p)) / L^p

    where L = log R - log r.
    """
    if not (0 < r < R):
        raise BadRadii(f"Need 0 < r < R, got r={r}, R={R}", {"r": r, "R": R})
    if not C > 0:
        raise BadRadii(f"The constant C must be positive, got {C}")
    check_exponent(p)
    if not q > 1:
        raise BadExponent(f"q must exceed 1, got {q}", {"q": q})
    L = math.log(R) - math.log(r)
    if p == q:
        return C * (1 + q * L) / L ** q
    return C * (-(q / (p - q)) * R ** (q - p) + (p / (p - q)) * r ** (q - p)) / L ** p


def fit_annulus_constant(samples: Sequence[Tuple[float, float, float]], q: float, p: float) -> float:
    """Smallest C such that every sampled (r, R, capacity) lies under the bound."""
    return max(cap / annulus_capacity_bound(1.0, q, p, r, R) for r, R, cap in samples)


def grid_annulus_capacity(side: int, inner_radius: float, p: float) -> CapacityResult:
    """Capacity between the centre ball and the rim of a side x side grid."""
    g = grid_graph(side)
    E = grid_ball(side, inner_radius)
    return p_capacity(g, Capacitor(E, AT_INFINITY), p)


def capacity_table(g: MetricMeasureGraph, sets: Iterable[frozenset], p: float) -> List[Tuple[frozenset, float]]:
    """Cap_p(K; infinity) for each vertex set K."""
    return [(K, p_capacity(g, Capacitor(K, AT_INFINITY), p).value) for K in sets]
