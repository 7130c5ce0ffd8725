"""
Empirical Sobolev constants from sampled vertex functions.

For s = Nq / (N - q) the probe looks for constants with

    ||u||_s <= C_q ||g_u||_q + C_inf ||u||_inf

for every sample, where g_u is the discrete edge gradient, trying
C_inf = 0 and C_inf = mu(X)^(1/s).
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.qclab.errors import BadExponent
from src.qclab.graph_lab.graph import MetricMeasureGraph, as_vertex_function

logger = logging.getLogger("qclab.graph_lab.sobolev")

FIT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SobolevProbe:
    exponent: float
    candidates: Tuple[Tuple[float, float], ...]
    C_q: float
    C_inf: float
    violations: int
    samples: int


def sobolev_terms(g: MetricMeasureGraph, u: Sequence[float], N: float, q: float) -> Tuple[float, float, float]:
    """(||u||_s, ||g_u||_q, ||u||_inf)"""
    u = as_vertex_function(g, u)
    s = N * q / (N - q)
    lhs = float(np.sum(g.measure * np.abs(u) ** s) ** (1.0 / s))
    gradient = np.abs(u[g.edge_u] - u[g.edge_v]) / g.lengths
    energy = float(np.sum(g.weights * gradient ** q) ** (1.0 / q))
    return lhs, energy, float(np.max(np.abs(u)))


def _random_functions(g: MetricMeasureGraph, rng: np.random.Generator, samples: int) -> List[np.ndarray]:
    functions = []
    for k in range(samples):
        if k % 2 == 0:
            functions.append(rng.uniform(-1.0, 1.0, size=g.n_vertices))
        else:
            # indicator-like bumps around a random centre
            d = g.distances_from([int(rng.integers(0, g.n_vertices))])
            radius = rng.uniform(0.0, float(d.max()) + 1.0)
            functions.append(np.clip(radius - d, 0.0, 1.0))
    return functions


def sobolev_constant_probe(
    g: MetricMeasureGraph,
    N: float,
    q: float,
    samples: int = 100,
    seed: int = 0,
    functions: Optional[Sequence[Sequence[float]]] = None,
) -> SobolevProbe:
    if not N > 1:
        raise BadExponent(f"N must exceed 1, got {N}", {"N": N})
    if not 1 <= q < N:
        raise BadExponent(f"q must lie in [1, N), got {q}", {"q": q, "N": N})

    if functions is None:
        functions = _random_functions(g, np.random.default_rng(seed), samples)
    terms = [sobolev_terms(g, u, N, q) for u in functions]
    s = N * q / (N - q)
    c_inf_grid = (0.0, g.total_measure ** (1.0 / s))

    candidates = []
    for c_inf in c_inf_grid:
        c_q = 0.0
        for lhs, energy, sup in terms:
            excess = lhs - c_inf * sup
            if excess <= FIT_TOLERANCE * max(lhs, 1.0):
                continue
            c_q = max(c_q, excess / energy) if energy > 0 else math.inf
            if math.isinf(c_q):
                break
        candidates.append((c_q, c_inf))

    finite = [pair for pair in candidates if math.isfinite(pair[0])]
    C_q, C_inf = finite[0] if finite else (math.inf, c_inf_grid[-1])
    violations = sum(
        1 for lhs, energy, sup in terms
        if lhs > C_q * energy + C_inf * sup + FIT_TOLERANCE * max(lhs, 1.0)
    ) if finite else len(terms)
    if not finite:
        logger.warning(f"No Sobolev constants fit {len(terms)} samples")
    return SobolevProbe(s, tuple(candidates), C_q, C_inf, violations, len(terms))
