"""
Quasi-straight sequences and quasi-isometry constant fits.

For a finite window z_0..z_{n-1} of a sequence:

- K_step is the least K with d(z_k, z_{k+1}) <= 1 + K,
- K_align is the least K with d(z_i,z_j) + d(z_j,z_k) - d(z_i,z_k) <= K d(z_i,z_k) + K
  for all i <= j <= k.

Both are exact maxima over the window.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from src.qclab.errors import EmptySample, WindowTooShort

logger = logging.getLogger("qclab.graph_lab.sequences")

Metric = Callable[[object, object], float]


@dataclass(frozen=True)
class SequenceDefectReport:
    K_step: float
    K_align: float
    K: float
    unbounded_both_sides: bool
    escape_defect: float
    window: int


def distance_matrix(seq: Sequence, metric: Metric) -> np.ndarray:
    n = len(seq)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = metric(seq[i], seq[j])
    return D


def _alignment_defect(D: np.ndarray) -> float:
    n = len(D)
    worst = 0.0
    for j in range(n):
        left = D[: j + 1, j][:, None]
        right = D[j, j:][None, :]
        outer = D[: j + 1, j:]
        ratio = (left + right - outer) / (outer + 1.0)
        worst = max(worst, float(ratio.max()))
    return worst


def _side_grows(distances: np.ndarray) -> bool:
    """True when the outer half of one side reaches further than the inner half."""
    h = len(distances)
    inner = distances[: h // 2].max() if h // 2 else 0.0
    return bool(distances.max() > inner)


def defect_from_distances(D: np.ndarray) -> SequenceDefectReport:
    D = np.asarray(D, dtype=float)
    n = len(D)
    if n < 3:
        raise WindowTooShort(f"A window needs at least 3 points, got {n}", {"window": n})
    K_step = max(float(np.diagonal(D, offset=1).max()) - 1.0, 0.0)
    K_align = _alignment_defect(D)

    centre = n // 2
    left = D[centre, :centre][::-1]
    right = D[centre, centre + 1 :]
    half = min(len(left), len(right))
    reach = min(float(left.max()), float(right.max()))
    unbounded = _side_grows(left) and _side_grows(right)
    return SequenceDefectReport(
        K_step=K_step,
        K_align=K_align,
        K=max(K_step, K_align),
        unbounded_both_sides=unbounded,
        escape_defect=half / (1.0 + reach),
        window=n,
    )


def quasi_straight_defect(seq: Sequence, metric: Metric) -> SequenceDefectReport:
    if len(seq) < 3:
        raise WindowTooShort(f"A window needs at least 3 points, got {len(seq)}", {"window": len(seq)})
    return defect_from_distances(distance_matrix(seq, metric))


def quasi_straight_lower_bound(report: SequenceDefectReport, distance_mn: float) -> float:
    """
    Lower bound for d(z_i, z_j) when i <= m <= n <= j, from the alignment
    inequality with constant K.
    """
    K = report.K
    return distance_mn / (1 + K) ** 2 - K * (K + 2) / (1 + K) ** 2


@dataclass(frozen=True)
class QIFit:
    L: float
    C: float
    lower_L: float
    scale_upper: Tuple[float, ...]
    scale_lower: Tuple[float, ...]
    no_uniform_lower_bound: bool
    not_large_scale_lipschitz: bool


def estimate_qi_constants(samples: Sequence[Tuple[float, float]], growth_factor: float = 2.0) -> QIFit:
    """
    Fit d_img <= L d_dom + C from (d_dom, d_img) samples.

    L is the largest ratio over pairs with d_dom >= 1 and C the largest excess
    over the remaining pairs. Ratios are also reported per dyadic scale of
    d_dom; a drift by ``growth_factor`` across scales raises the flags.
    """
    if not samples:
        raise EmptySample("No distance pairs to fit")
    data = np.asarray(samples, dtype=float).reshape(-1, 2)
    dom, img = data[:, 0], data[:, 1]
    large = dom >= 1.0

    L = float((img[large] / dom[large]).max()) if large.any() else 0.0
    small = ~large
    C = max(float((img[small] - L * dom[small]).max()), 0.0) if small.any() else 0.0

    ratios = img[large] / dom[large] if large.any() else np.array([])
    scales = np.floor(np.log2(dom[large])).astype(int) if large.any() else np.array([], dtype=int)
    scale_upper, scale_lower = [], []
    for s in np.unique(scales):
        in_scale = ratios[scales == s]
        scale_upper.append(float(in_scale.max()))
        scale_lower.append(float(in_scale.min()))

    positive = [r for r in scale_lower if r > 0]
    lower_L = 1.0 / min(positive) if positive else math.inf
    no_lower = bool(
        (scale_lower and not positive)
        or (len(scale_lower) > 1 and scale_lower[0] >= growth_factor * scale_lower[-1])
    )
    not_lipschitz = bool(len(scale_upper) > 1 and scale_upper[-1] >= growth_factor * scale_upper[0])
    if no_lower or not_lipschitz:
        logger.warning(
            f"QI fit flags: no_uniform_lower_bound={no_lower}, not_large_scale_lipschitz={not_lipschitz}"
        )
    return QIFit(L, C, lower_L, tuple(scale_upper), tuple(scale_lower), no_lower, not_lipschitz)


def snowflake_samples(max_distance: float, count: int = 200) -> List[Tuple[float, float]]:
    """(d, sqrt(d)) pairs on a geometric grid of distances up to ``max_distance``."""
    return [(float(d), math.sqrt(d)) for d in np.geomspace(0.25, max_distance, count)]

