"""
Exact Lie algebra engine.

A ``LieAlgebra`` is given by structure constants over the rationals. The
module computes brackets, polarization flags, lower central series,
Baker-Campbell-Hausdorff products in exponential coordinates, and the
layered quasi-norm of a nilpotent algebra.

All algebra is exact (``Fraction``); floating point only appears in
quasi-norm roots.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import yaml
from pydantic import BaseModel, Field, ValidationError

from src.qclab.config import get_settings
from src.qclab.errors import (
    AntisymmetryViolation,
    DimensionMismatch,
    InvalidGroupSpec,
    JacobiViolation,
    MalformedSpec,
    NotNilpotent,
    Unsupported,
    ZeroVector,
)
from src.qclab.format import format_rational
from src.qclab.linalg import (
    Subspace,
    Vector,
    add,
    as_vector,
    inverse,
    is_zero,
    mat_vec,
    parse_rational,
    rank,
    scale,
    transpose,
    unit_vector,
    vec_mat,
    zero_vector,
)

logger = logging.getLogger("qclab.lie_core")

NORM_KINDS = ("euclidean", "max", "l1")


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """
    Finite-dimensional Lie algebra over Q.

    ``structure_constants`` maps 0-based pairs ``(i, j)`` with ``i < j`` to the
    coordinates of ``[e_i, e_j]``; missing pairs bracket to zero.
    """

    dim: int
    basis_labels: Tuple[str, ...]
    structure_constants: Mapping[Tuple[int, int], Vector] = field(default_factory=dict)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.basis_labels == other.basis_labels
            and dict(self.structure_constants) == dict(other.structure_constants)
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.basis_labels, frozenset(self.structure_constants.items())))

    def index(self, label: str) -> int:
        try:
            return self.basis_labels.index(label)
        except ValueError:
            raise MalformedSpec(f"Unknown basis label {label!r}", {"labels": list(self.basis_labels)})

    def basis_vector(self, label: str) -> Vector:
        return unit_vector(self.dim, self.index(label))

    def vector(self, coefficients: Mapping[str, Any]) -> Vector:
        """Build a vector from ``{label: coefficient}``."""
        v = [Fraction(0)] * self.dim
        for label, c in coefficients.items():
            v[self.index(label)] += Fraction(c) if not isinstance(c, str) else parse_rational(c)
        return tuple(v)

    def check_vector(self, v: Sequence) -> Vector:
        if len(v) != self.dim:
            raise DimensionMismatch(
                f"Vector of length {len(v)} for an algebra of dimension {self.dim}",
                {"expected": self.dim, "got": len(v)},
            )
        return as_vector(v)

    def bracket_basis(self, i: int, j: int) -> Vector:
        if i == j:
            return zero_vector(self.dim)
        if i < j:
            return self.structure_constants.get((i, j), zero_vector(self.dim))
        return scale(-1, self.structure_constants.get((j, i), zero_vector(self.dim)))


def _normalize_entries(
    dim: int, labels: Sequence[str], entries: Sequence[Tuple[int, int, Vector]]
) -> Dict[Tuple[int, int], Vector]:
    constants: Dict[Tuple[int, int], Vector] = {}
    for i, j, coeffs in entries:
        if len(coeffs) != dim:
            raise DimensionMismatch(
                f"Bracket [{labels[i]},{labels[j]}] has {len(coeffs)} coefficients, expected {dim}",
                {"expected": dim, "got": len(coeffs)},
            )
        if i == j:
            if not is_zero(coeffs):
                raise AntisymmetryViolation(
                    f"[{labels[i]},{labels[i]}] must vanish",
                    {"pair": [labels[i], labels[i]]},
                )
            continue
        key, value = ((i, j), as_vector(coeffs)) if i < j else ((j, i), scale(-1, coeffs))
        if key in constants and constants[key] != value:
            raise AntisymmetryViolation(
                f"Conflicting entries for [{labels[key[0]]},{labels[key[1]]}]",
                {"pair": [labels[key[0]], labels[key[1]]]},
            )
        constants[key] = value
    return {k: v for k, v in constants.items() if not is_zero(v)}


def _check_jacobi(alg: LieAlgebra):
    n = alg.dim
    for i, j, k in itertools.combinations(range(n), 3):
        ei, ej, ek = (unit_vector(n, t) for t in (i, j, k))
        residual = add(
            add(bracket(alg, bracket(alg, ei, ej), ek), bracket(alg, bracket(alg, ej, ek), ei)),
            bracket(alg, bracket(alg, ek, ei), ej),
        )
        if not is_zero(residual):
            labels = alg.basis_labels
            raise JacobiViolation(
                f"Jacobi identity fails on ({labels[i]}, {labels[j]}, {labels[k]})",
                {
                    "triple": [labels[i], labels[j], labels[k]],
                    "residual": [format_rational(x) for x in residual],
                },
            )


def build_lie_algebra(
    labels: Sequence[str], entries: Sequence[Tuple[int, int, Sequence]]
) -> LieAlgebra:
    """Validate 0-based bracket entries and build the algebra."""
    labels = tuple(labels)
    dim = len(labels)
    if dim == 0:
        raise MalformedSpec("A Lie algebra needs at least one basis vector")
    if len(set(labels)) != dim:
        raise MalformedSpec(f"Duplicate basis labels in {list(labels)}")
    for i, j, _ in entries:
        if not (0 <= i < dim and 0 <= j < dim):
            raise MalformedSpec(f"Bracket index out of range: ({i + 1}, {j + 1})", {"dim": dim})
    constants = _normalize_entries(dim, labels, [(i, j, as_vector(c)) for i, j, c in entries])
    alg = LieAlgebra(dim, labels, constants)
    _check_jacobi(alg)
    return alg


def lie_algebra_from_brackets(
    labels: Sequence[str], brackets: Mapping[Tuple[str, str], Mapping[str, Any]]
) -> LieAlgebra:
    """
    Build an algebra from ``{(a, b): {label: coefficient}}``.

    >>> lie_algebra_from_brackets(["X", "Y", "Z"], {("X", "Y"): {"Z": 1}})
    """
    labels = tuple(labels)
    position = {label: k for k, label in enumerate(labels)}
    entries = []
    for (a, b), image in brackets.items():
        if a not in position or b not in position:
            raise MalformedSpec(f"Unknown label in bracket [{a},{b}]", {"labels": list(labels)})
        coeffs = [Fraction(0)] * len(labels)
        for label, c in image.items():
            if label not in position:
                raise MalformedSpec(f"Unknown label {label!r} in [{a},{b}]")
            coeffs[position[label]] += parse_rational(c) if isinstance(c, str) else Fraction(c)
        entries.append((position[a], position[b], coeffs))
    return build_lie_algebra(labels, entries)


class AlgebraDocument(BaseModel):
    """The algebra file format (1-based bracket indices, rational strings)."""

    dim: int = Field(gt=0)
    basis: Optional[List[str]] = None
    brackets: List[List[Any]] = Field(default_factory=list)
    polarization: Optional[List[List[Any]]] = None
    lattice_rank: int = Field(0, ge=0)
    declared: Optional[Dict[str, Any]] = None


def load_document(text: str) -> AlgebraDocument:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise MalformedSpec(f"Could not parse algebra document: {e}") from e
    if not isinstance(raw, dict):
        raise MalformedSpec("Algebra document must be a mapping")
    try:
        return AlgebraDocument(**raw)
    except ValidationError as e:
        raise MalformedSpec(f"Invalid algebra document: {e}") from e


def _parse_coefficients(values: Any, what: str) -> Vector:
    if not isinstance(values, list):
        raise MalformedSpec(f"{what} must be a list of rationals")
    try:
        return tuple(parse_rational(x) for x in values)
    except ValueError as e:
        raise MalformedSpec(f"{what}: {e}") from e


def algebra_from_document(doc: AlgebraDocument) -> LieAlgebra:
    labels = doc.basis or [f"e{k + 1}" for k in range(doc.dim)]
    if len(labels) != doc.dim:
        raise MalformedSpec(f"{len(labels)} basis labels for dim {doc.dim}")
    entries = []
    for entry in doc.brackets:
        if len(entry) != 3 or not all(isinstance(x, int) for x in entry[:2]):
            raise MalformedSpec(f"Bracket entries are [i, j, coeffs], got {entry!r}")
        i, j, coeffs = entry
        if i >= j:
            raise MalformedSpec(f"Bracket entries need i < j, got [{i}, {j}]")
        entries.append((i - 1, j - 1, _parse_coefficients(coeffs, f"bracket [{i}, {j}]")))
    return build_lie_algebra(labels, entries)


def parse_lie_algebra(text: str) -> LieAlgebra:
    """Parse and validate an algebra document."""
    alg = algebra_from_document(load_document(text))
    logger.debug(f"Parsed Lie algebra of dimension {alg.dim} with {len(alg.structure_constants)} brackets")
    return alg


def bracket(alg: LieAlgebra, x: Sequence, y: Sequence) -> Vector:
    x = alg.check_vector(x)
    y = alg.check_vector(y)
    result = [Fraction(0)] * alg.dim
    for (i, j), c in alg.structure_constants.items():
        coef = x[i] * y[j] - x[j] * y[i]
        if coef:
            for k, ck in enumerate(c):
                if ck:
                    result[k] += coef * ck
    return tuple(result)


def _check_subspace(alg: LieAlgebra, sub: Subspace):
    if sub.ambient_dim != alg.dim:
        raise DimensionMismatch(
            f"Subspace of Q^{sub.ambient_dim} for an algebra of dimension {alg.dim}",
            {"expected": alg.dim, "got": sub.ambient_dim},
        )


def bracket_span(alg: LieAlgebra, a: Subspace, b: Subspace) -> Subspace:
    """The span of [a, b]."""
    vectors = tuple(bracket(alg, x, y) for x in a.basis for y in b.basis)
    return Subspace(alg.dim, tuple(v for v in vectors if not is_zero(v)))


def polarization_flag(alg: LieAlgebra, delta: Subspace) -> List[Subspace]:
    """The chain D^[1] = D, D^[k+1] = D^[k] + [D, D^[k]], up to stabilization."""
    _check_subspace(alg, delta)
    flag = [delta]
    while True:
        current = flag[-1]
        grown = current + bracket_span(alg, delta, current)
        if grown.rank == current.rank:
            return flag
        flag.append(grown)


def lower_central_series(alg: LieAlgebra) -> List[Subspace]:
    """g^1 = g, g^{k+1} = [g, g^k]; ends at zero or at the first repeated term."""
    full = Subspace.full(alg.dim)
    series = [full]
    while series[-1].rank > 0:
        nxt = bracket_span(alg, full, series[-1])
        if nxt.rank == series[-1].rank:
            break
        series.append(nxt)
    return series


def is_nilpotent(alg: LieAlgebra) -> bool:
    return lower_central_series(alg)[-1].rank == 0


def nilpotency_step(alg: LieAlgebra) -> int:
    series = lower_central_series(alg)
    if series[-1].rank != 0:
        raise NotNilpotent(
            "Lower central series stabilizes at a nonzero term",
            {"ranks": [s.rank for s in series]},
        )
    return len(series) - 1


def is_bracket_generating(alg: LieAlgebra, delta: Subspace) -> bool:
    return polarization_flag(alg, delta)[-1].is_full


def is_unimodular(alg: LieAlgebra) -> bool:
    """trace(ad e_i) == 0 for every basis vector."""
    for i in range(alg.dim):
        trace = sum((alg.bracket_basis(i, j)[j] for j in range(alg.dim)), Fraction(0))
        if trace != 0:
            return False
    return True


def center_dimension(alg: LieAlgebra) -> int:
    rows = [
        tuple(c for j in range(alg.dim) for c in alg.bracket_basis(i, j)) for i in range(alg.dim)
    ]
    return alg.dim - rank(rows, alg.dim * alg.dim)


def change_basis(alg: LieAlgebra, P: Sequence[Sequence]) -> LieAlgebra:
    """
    The same algebra written in the basis f_k = sum_i P[i][k] e_i (the columns
    of P). P must be invertible.
    """
    P = [as_vector(row) for row in P]
    if len(P) != alg.dim or any(len(row) != alg.dim for row in P):
        raise DimensionMismatch(f"Basis change must be {alg.dim}x{alg.dim}")
    P_inv = inverse(P)
    columns = transpose(P)
    entries = []
    for a, b in itertools.combinations(range(alg.dim), 2):
        image = bracket(alg, columns[a], columns[b])
        entries.append((a, b, mat_vec(P_inv, image)))
    return build_lie_algebra(alg.basis_labels, entries)


def coordinates_in_basis(P: Sequence[Sequence], v: Sequence) -> Vector:
    """Coordinates of v (old basis) in the basis given by the columns of P."""
    return mat_vec(inverse([as_vector(row) for row in P]), as_vector(v))


# Baker-Campbell-Hausdorff product


def _word_vanishes(word: str) -> bool:
    # right-nested brackets ending in a repeated letter are zero
    return len(word) >= 2 and word[-1] == word[-2]


@lru_cache(maxsize=None)
def dynkin_coefficients(max_degree: int) -> Tuple[Tuple[str, Fraction], ...]:
    """
    Coefficients of the Dynkin series, aggregated by right-nested word in the
    letters X and Y, for all words of length at most ``max_degree``.
    """
    totals: Dict[str, Fraction] = {}
    blocks = [(r, s) for r in range(max_degree + 1) for s in range(max_degree + 1) if 0 < r + s <= max_degree]

    def extend(n: int, used: int, word: str, denominator: int):
        for r, s in blocks:
            if used + r + s > max_degree:
                continue
            w = word + "X" * r + "Y" * s
            d = denominator * math.factorial(r) * math.factorial(s)
            total = used + r + s
            coef = Fraction((-1) ** n, (n + 1) * total * d)
            if not _word_vanishes(w):
                totals[w] = totals.get(w, Fraction(0)) + coef
            extend(n + 1, total, w, d)

    extend(0, 0, "", 1)
    return tuple(sorted((w, c) for w, c in totals.items() if c != 0))


def bch_product(alg: LieAlgebra, x: Sequence, y: Sequence, max_step: Optional[int] = None) -> Vector:
    """log(exp(x) exp(y)), exact, for a nilpotent algebra."""
    x = alg.check_vector(x)
    y = alg.check_vector(y)
    step = nilpotency_step(alg)
    max_step = max_step or get_settings().bch_max_step
    if step > max_step:
        raise Unsupported(
            f"BCH products are supported up to step {max_step}, algebra has step {step}",
            {"step": step, "max_step": max_step},
        )

    letters = {"X": x, "Y": y}
    values: Dict[str, Vector] = {}

    def value(word: str) -> Vector:
        if word not in values:
            if len(word) == 1:
                values[word] = letters[word]
            else:
                values[word] = bracket(alg, letters[word[0]], value(word[1:]))
        return values[word]

    result = zero_vector(alg.dim)
    for word, coef in dynkin_coefficients(step):
        v = value(word)
        if not is_zero(v):
            result = add(result, scale(coef, v))
    return result


def bch_inverse(x: Sequence) -> Vector:
    return scale(-1, as_vector(x))


# Layered quasi-norm


@dataclass(frozen=True, eq=False)
class GuivarchData:
    """
    Splitting of a nilpotent algebra into layers V_m (complements of g^{m+1}
    in g^m) with weights a_m and a norm on each layer.
    """

    layers: Tuple[Subspace, ...]
    weights: Tuple[float, ...]
    norm_kind: str = "euclidean"

    @property
    def ambient_dim(self) -> int:
        return self.layers[0].ambient_dim

    @cached_property
    def _inverse_basis(self) -> List[Vector]:
        rows = [v for layer in self.layers for v in layer.basis]
        return inverse(rows)

    def components(self, v: Sequence) -> List[Vector]:
        """Coordinates of v in each layer's reduced basis."""
        coords = vec_mat(as_vector(v), self._inverse_basis)
        parts, start = [], 0
        for layer in self.layers:
            parts.append(coords[start : start + layer.rank])
            start += layer.rank
        return parts


def _layer_norm(coords: Sequence[Fraction], kind: str) -> float:
    values = [abs(float(c)) for c in coords]
    if not values:
        return 0.0
    if kind == "euclidean":
        return math.hypot(*values)
    if kind == "max":
        return max(values)
    return math.fsum(values)


def guivarch_splitting(
    alg: LieAlgebra, weights: Optional[Sequence[float]] = None, norm_kind: str = "euclidean"
) -> GuivarchData:
    series = lower_central_series(alg)
    if series[-1].rank != 0:
        raise NotNilpotent("Layered splitting needs a nilpotent algebra", {"ranks": [s.rank for s in series]})
    layers = tuple(series[m + 1].complement_in(series[m]) for m in range(len(series) - 1))
    if weights is None:
        weights = (1.0,) * len(layers)
    weights = tuple(float(a) for a in weights)
    if len(weights) != len(layers):
        raise DimensionMismatch(
            f"{len(weights)} weights for {len(layers)} layers",
            {"expected": len(layers), "got": len(weights)},
        )
    if any(a <= 0 for a in weights):
        raise InvalidGroupSpec(f"Layer weights must be positive, got {list(weights)}")
    if norm_kind not in NORM_KINDS:
        raise Unsupported(f"Unknown layer norm {norm_kind!r}", {"supported": list(NORM_KINDS)})
    return GuivarchData(layers, weights, norm_kind)


def guivarch_quasinorm(data: GuivarchData, v: Sequence) -> float:
    """sum_m a_m |v_m|^(1/m)"""
    if len(v) != data.ambient_dim:
        raise DimensionMismatch(
            f"Vector of length {len(v)} for an algebra of dimension {data.ambient_dim}",
            {"expected": data.ambient_dim, "got": len(v)},
        )
    total = []
    for m, (a, coords) in enumerate(zip(data.weights, data.components(v)), start=1):
        norm = _layer_norm(coords, data.norm_kind)
        if norm:
            total.append(a * norm ** (1.0 / m))
    return math.fsum(total)


def quasi_distance(alg: LieAlgebra, data: GuivarchData, x: Sequence, y: Sequence) -> float:
    """Left-invariant quasi-distance: quasinorm of x^{-1} * y."""
    return guivarch_quasinorm(data, bch_product(alg, bch_inverse(x), y))


# Groups


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """A simply connected group (lattice_rank 0) or its quotient by a central lattice."""

    algebra: LieAlgebra
    polarization: Subspace
    lattice_rank: int = 0
    name: str = ""

    def __post_init__(self):
        _check_subspace(self.algebra, self.polarization)
        if self.lattice_rank < 0:
            raise InvalidGroupSpec(f"lattice_rank must be nonnegative, got {self.lattice_rank}")
        if self.lattice_rank > 0:
            center = center_dimension(self.algebra)
            if self.lattice_rank > center:
                raise InvalidGroupSpec(
                    f"lattice_rank {self.lattice_rank} exceeds the center dimension {center}",
                    {"lattice_rank": self.lattice_rank, "center_dimension": center},
                )


def group_spec_from_document(doc: AlgebraDocument, name: str = "") -> GroupSpec:
    alg = algebra_from_document(doc)
    if doc.polarization is None:
        delta = Subspace.full(alg.dim)
    else:
        vectors = tuple(_parse_coefficients(v, "polarization vector") for v in doc.polarization)
        delta = Subspace(alg.dim, vectors)
    return GroupSpec(alg, delta, doc.lattice_rank, name)


def load_group_spec(text: str, name: str = "") -> GroupSpec:
    doc = load_document(text)
    if doc.declared is not None:
        raise MalformedSpec("Declared fixtures are loaded by the classifier")
    return group_spec_from_document(doc, name)


def to_document(spec) -> Dict[str, Any]:
    """The algebra file document of a LieAlgebra or GroupSpec."""
    alg = spec.algebra if isinstance(spec, GroupSpec) else spec
    doc: Dict[str, Any] = {
        "dim": alg.dim,
        "basis": list(alg.basis_labels),
        "brackets": [
            [i + 1, j + 1, [format_rational(c) for c in coeffs]]
            for (i, j), coeffs in sorted(alg.structure_constants.items())
        ],
    }
    if isinstance(spec, GroupSpec):
        doc["polarization"] = [[format_rational(c) for c in v] for v in spec.polarization.basis]
        doc["lattice_rank"] = spec.lattice_rank
    return doc
