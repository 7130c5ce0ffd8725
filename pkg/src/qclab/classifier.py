"""
Dimension invariants, conformal type and the QC => QI verdict.

Groups are either computed (``GroupSpec``: nilpotent algebra + polarization +
central lattice rank) or declared (``DeclaredGroup``: invariants supplied by
the fixture, for groups whose invariants are not computed here).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Any, List, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from src.qclab.config import get_settings
from src.qclab.errors import (
    InvalidFixture,
    MalformedSpec,
    NotBracketGenerating,
    NotNilpotent,
    Unsupported,
    ZeroVector,
)
from src.qclab.format import fill
from src.qclab.linalg import Vector, is_zero, scale
from src.qclab.lie_core import (
    GroupSpec,
    group_spec_from_document,
    guivarch_quasinorm,
    guivarch_splitting,
    is_unimodular,
    load_document,
    lower_central_series,
    polarization_flag,
    quasi_distance,
)

logger = logging.getLogger("qclab.classifier")


class ConformalType(str, Enum):
    STRICTLY_PARABOLIC = "StrictlyParabolic"
    LIMINAL_PARABOLIC = "LiminalParabolic"
    HYPERBOLIC = "Hyperbolic"


class VerdictCase(str, Enum):
    QI_FORCED_STRICT_PARABOLIC = "QI_Forced_StrictParabolic"
    QI_FORCED_HYPERBOLIC = "QI_Forced_Hyperbolic"
    QI_FORCED_INFINITE_PI1 = "QI_Forced_InfinitePi1"
    LIMINAL_CARNOT_RIGIDITY = "Liminal_CarnotRigidity"
    LIMINAL_UNDECIDED = "Liminal_Undecided"
    OBSTRUCTED = "Obstructed"


def conformal_type_from_dimensions(Q: int, N: int) -> ConformalType:
    if N < Q:
        return ConformalType.STRICTLY_PARABOLIC
    if N == Q:
        return ConformalType.LIMINAL_PARABOLIC
    return ConformalType.HYPERBOLIC


class DeclaredGroup(BaseModel):
    """A group whose invariants are supplied rather than computed."""

    model_config = ConfigDict(frozen=True)

    name: str = ""
    hausdorff_dim: int
    growth_dim: int
    conformal_type: ConformalType
    nilpotent: bool
    unimodular: bool = True
    fundamental_group_infinite: bool = False

    @model_validator(mode="after")
    def check_type_rule(self):
        expected = conformal_type_from_dimensions(self.hausdorff_dim, self.growth_dim)
        if expected != self.conformal_type:
            raise InvalidFixture(
                f"Declared type {self.conformal_type.value} contradicts Q={self.hausdorff_dim}, "
                f"N={self.growth_dim} (expected {expected.value})",
                {"name": self.name},
            )
        return self


Group = Union[GroupSpec, DeclaredGroup]


class ClassificationReport(BaseModel):
    hausdorff_dim_Q: int
    growth_dim_N: int
    parabolic_dim: int
    isoperimetric_dim: int
    bracket_generating: bool
    unimodular: bool
    nilpotent: bool
    carnot: bool
    conformal_type: ConformalType
    fundamental_group_infinite: bool


class InvariantMatch(BaseModel):
    name: str
    left: Any
    right: Any
    equal: bool


class Verdict(BaseModel):
    case: VerdictCase
    explanation: str
    matched_invariants: List[InvariantMatch]


def load_group(text: str, name: str = "") -> Group:
    """Load a computed group spec or a declared fixture from an algebra document."""
    doc = load_document(text)
    if doc.declared is not None:
        try:
            return DeclaredGroup(name=name, **doc.declared)
        except ValidationError as e:
            raise MalformedSpec(f"Invalid declared fixture {name!r}: {e}") from e
    return group_spec_from_document(doc, name)


def _require_nilpotent(spec: GroupSpec):
    series = lower_central_series(spec.algebra)
    if series[-1].rank != 0:
        raise NotNilpotent(
            f"Algebra of {spec.name or 'group'} is not nilpotent",
            {"ranks": [s.rank for s in series]},
        )
    return series


def hausdorff_dimension(spec: GroupSpec) -> int:
    flag = polarization_flag(spec.algebra, spec.polarization)
    if not flag[-1].is_full:
        raise NotBracketGenerating(
            "Polarization does not generate the algebra",
            {"flag_ranks": [d.rank for d in flag], "dim": spec.algebra.dim},
        )
    ranks = [0] + [d.rank for d in flag]
    return sum(k * (ranks[k] - ranks[k - 1]) for k in range(1, len(ranks)))


def growth_dimension(spec: GroupSpec) -> int:
    series = _require_nilpotent(spec)
    if spec.lattice_rank == 0:
        return sum(s.rank for s in series)
    if not spec.algebra.structure_constants:
        return spec.algebra.dim - spec.lattice_rank
    raise Unsupported(
        "Growth dimension of a non-abelian quotient is not computed",
        {"lattice_rank": spec.lattice_rank},
    )


def is_carnot_polarization(spec: GroupSpec) -> bool:
    """True iff rank D^[k] + rank g^{k+1} == dim for every k."""
    series = _require_nilpotent(spec)
    if spec.lattice_rank > 0:
        raise Unsupported("The Carnot test applies to simply connected groups only")
    flag = polarization_flag(spec.algebra, spec.polarization)
    if not flag[-1].is_full:
        raise NotBracketGenerating("Polarization does not generate the algebra")
    dim = spec.algebra.dim
    for k in range(1, max(len(flag), len(series)) + 1):
        flag_rank = flag[min(k, len(flag)) - 1].rank
        series_rank = series[k].rank if k < len(series) else 0
        if flag_rank + series_rank != dim:
            return False
    return True


def classify_conformal_type(spec: Group) -> ClassificationReport:
    if isinstance(spec, DeclaredGroup):
        return ClassificationReport(
            hausdorff_dim_Q=spec.hausdorff_dim,
            growth_dim_N=spec.growth_dim,
            parabolic_dim=spec.growth_dim,
            isoperimetric_dim=spec.growth_dim,
            bracket_generating=True,
            unimodular=spec.unimodular,
            nilpotent=spec.nilpotent,
            carnot=False,
            conformal_type=spec.conformal_type,
            fundamental_group_infinite=spec.fundamental_group_infinite,
        )

    Q = hausdorff_dimension(spec)
    N = growth_dimension(spec)
    carnot = spec.lattice_rank == 0 and is_carnot_polarization(spec)
    report = ClassificationReport(
        hausdorff_dim_Q=Q,
        growth_dim_N=N,
        parabolic_dim=N,
        isoperimetric_dim=N,
        bracket_generating=True,
        unimodular=is_unimodular(spec.algebra),
        nilpotent=True,
        carnot=carnot,
        conformal_type=conformal_type_from_dimensions(Q, N),
        fundamental_group_infinite=spec.lattice_rank > 0,
    )
    logger.debug(f"Classified {spec.name or 'group'}: Q={Q}, N={N}, type={report.conformal_type.value}")
    return report


def classify_batch(specs: Sequence[Group], jobs: Optional[int] = None) -> List[ClassificationReport]:
    """Classify in parallel; results are in input order."""
    jobs = jobs or get_settings().jobs
    if jobs <= 1 or len(specs) <= 1:
        return [classify_conformal_type(s) for s in specs]
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(classify_conformal_type, specs))


EXPLANATIONS = {
    VerdictCase.OBSTRUCTED: "No quasi-conformal map exists: {mismatch} differ ({left} vs {right}).",
    VerdictCase.QI_FORCED_INFINITE_PI1: (
        "A fundamental group is infinite; every quasi-conformal map is a quasi-isometry."
    ),
    VerdictCase.QI_FORCED_STRICT_PARABOLIC: (
        "Both groups are strictly parabolic (N={N} < Q={Q}); quasi-conformal maps are quasi-isometries."
    ),
    VerdictCase.QI_FORCED_HYPERBOLIC: (
        "Both groups are hyperbolic (Q={Q} < N={N}); quasi-conformal maps are quasi-isometries."
    ),
    VerdictCase.LIMINAL_CARNOT_RIGIDITY: (
        "Both groups are liminal simply connected nilpotent groups (Q=N={Q}); a quasi-conformal map "
        "forces algebraically isomorphic, bi-Lipschitz equivalent Carnot groups."
    ),
    VerdictCase.LIMINAL_UNDECIDED: (
        "Both groups are liminal (Q=N={Q}) but not both nilpotent and simply connected; undecided."
    ),
}


def qc_implies_qi_verdict(a: Group, b: Group) -> Verdict:
    ra, rb = classify_conformal_type(a), classify_conformal_type(b)
    matches = [
        InvariantMatch(name="Q", left=ra.hausdorff_dim_Q, right=rb.hausdorff_dim_Q,
                       equal=ra.hausdorff_dim_Q == rb.hausdorff_dim_Q),
        InvariantMatch(name="N", left=ra.growth_dim_N, right=rb.growth_dim_N,
                       equal=ra.growth_dim_N == rb.growth_dim_N),
        InvariantMatch(name="conformal_type", left=ra.conformal_type.value, right=rb.conformal_type.value,
                       equal=ra.conformal_type == rb.conformal_type),
    ]
    context = {"Q": ra.hausdorff_dim_Q, "N": ra.growth_dim_N}

    mismatched = [m for m in matches if not m.equal]
    if mismatched:
        first = mismatched[0]
        case = VerdictCase.OBSTRUCTED
        context.update(mismatch=first.name, left=first.left, right=first.right)
    elif ra.fundamental_group_infinite or rb.fundamental_group_infinite:
        case = VerdictCase.QI_FORCED_INFINITE_PI1
    elif ra.conformal_type == ConformalType.STRICTLY_PARABOLIC:
        case = VerdictCase.QI_FORCED_STRICT_PARABOLIC
    elif ra.conformal_type == ConformalType.HYPERBOLIC:
        case = VerdictCase.QI_FORCED_HYPERBOLIC
    elif ra.nilpotent and rb.nilpotent:
        case = VerdictCase.LIMINAL_CARNOT_RIGIDITY
    else:
        case = VerdictCase.LIMINAL_UNDECIDED

    return Verdict(case=case, explanation=fill(EXPLANATIONS[case], context), matched_invariants=matches)


def exp_line_sequence(spec: GroupSpec, v: Sequence, k_min: int, k_max: int) -> List[Vector]:
    """The points exp(k v), k_min <= k <= k_max, in exponential coordinates."""
    _require_nilpotent(spec)
    v = spec.algebra.check_vector(v)
    if is_zero(v):
        raise ZeroVector("The exp-line direction must be nonzero")
    return [scale(k, v) for k in range(k_min, k_max + 1)]


def exp_line_metric(spec: GroupSpec, weights: Optional[Sequence[float]] = None):
    """The left-invariant quasi-distance used on exp-line sequences."""
    data = guivarch_splitting(spec.algebra, weights)

    def metric(x, y) -> float:
        return quasi_distance(spec.algebra, data, x, y)

    return metric


def exp_line_defect_bound(spec: GroupSpec, v: Sequence) -> dict:
    """
    A-priori defect bounds for exp(k v) under the quasi-distance.

    With f(t) = quasinorm(t v), distances along the line are f(|k - i|) and f
    is increasing, so the alignment excess f(a) + f(b) - f(a + b) never
    exceeds f(a + b) and K_align <= 1. Steps all equal f(1).
    """
    _require_nilpotent(spec)
    v = spec.algebra.check_vector(v)
    if is_zero(v):
        raise ZeroVector("The exp-line direction must be nonzero")
    step = guivarch_quasinorm(guivarch_splitting(spec.algebra), v)
    return {"K_step": max(0.0, step - 1.0), "K_align": 1.0, "step_length": step}
