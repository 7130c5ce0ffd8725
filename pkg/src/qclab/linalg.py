"""
Exact rational linear algebra.

Vectors are tuples of ``Fraction``. Matrix work (row reduction, nullspaces,
inverses) is delegated to sympy's ``DomainMatrix`` over ``QQ``; rows are
converted on the way in and out so the rest of the package only sees
``Fraction`` values.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from src.qclab.errors import DimensionMismatch

Vector = Tuple[Fraction, ...]

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value) -> Fraction:
    """Parse an exact rational: an integer or a "p/q" string. Floats are refused."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        match = _RATIONAL.match(value)
        if match:
            denominator = int(match.group(2) or 1)
            if denominator == 0:
                raise ValueError(f"zero denominator in {value!r}")
            return Fraction(int(match.group(1)), denominator)
    raise ValueError(f"not an exact rational: {value!r}")


def as_vector(values: Iterable) -> Vector:
    return tuple(Fraction(x) for x in values)


def zero_vector(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(Fraction(1 if k == i else 0) for k in range(n))


def is_zero(v: Sequence[Fraction]) -> bool:
    return not any(v)


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(t, v: Sequence[Fraction]) -> Vector:
    t = Fraction(t)
    return tuple(t * a for a in v)


def _to_qq(x: Fraction):
    return QQ(x.numerator, x.denominator)


def _from_qq(a) -> Fraction:
    return Fraction(int(a.numerator), int(a.denominator))


def domain_matrix(rows: Sequence[Sequence[Fraction]], ncols: int) -> DomainMatrix:
    data = [[_to_qq(Fraction(x)) for x in row] for row in rows]
    return DomainMatrix(data, (len(data), ncols), QQ)


def matrix_rows(m: DomainMatrix) -> List[Vector]:
    return [tuple(_from_qq(a) for a in row) for row in m.to_list()]


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> Tuple[List[Vector], Tuple[int, ...]]:
    """Reduced row echelon form; returns the nonzero rows and the pivot columns."""
    if not rows:
        return [], ()
    reduced, pivots = domain_matrix(rows, ncols).rref()
    return matrix_rows(reduced)[: len(pivots)], tuple(pivots)


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> List[Vector]:
    """Basis of {x : M x = 0} where M has the given rows."""
    if not rows:
        return [unit_vector(ncols, i) for i in range(ncols)]
    return matrix_rows(domain_matrix(rows, ncols).nullspace())


def inverse(rows: Sequence[Sequence[Fraction]]) -> List[Vector]:
    n = len(rows)
    return matrix_rows(domain_matrix(rows, n).inv())


def determinant(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(rows)
    return _from_qq(domain_matrix(rows, n).det())


def mat_vec(rows: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector:
    return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in rows)


def vec_mat(v: Sequence[Fraction], rows: Sequence[Sequence[Fraction]]) -> Vector:
    """Row vector times matrix."""
    ncols = len(rows[0]) if rows else 0
    return tuple(
        sum((v[i] * rows[i][j] for i in range(len(rows))), Fraction(0)) for j in range(ncols)
    )


def transpose(rows: Sequence[Sequence[Fraction]]) -> List[Vector]:
    return [tuple(col) for col in zip(*rows)]


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of Q^n given by (possibly dependent) spanning vectors."""

    ambient_dim: int
    spanning_vectors: Tuple[Vector, ...] = ()

    def __post_init__(self):
        vectors = tuple(as_vector(v) for v in self.spanning_vectors)
        for v in vectors:
            if len(v) != self.ambient_dim:
                raise DimensionMismatch(
                    f"Vector of length {len(v)} in a subspace of Q^{self.ambient_dim}",
                    {"expected": self.ambient_dim, "got": len(v)},
                )
        object.__setattr__(self, "spanning_vectors", vectors)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(unit_vector(n, i) for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @cached_property
    def _echelon(self) -> Tuple[Tuple[Vector, ...], Tuple[int, ...]]:
        basis, pivots = rref(self.spanning_vectors, self.ambient_dim)
        return tuple(basis), pivots

    @property
    def basis(self) -> Tuple[Vector, ...]:
        """Canonical reduced (row echelon) basis."""
        return self._echelon[0]

    @property
    def pivots(self) -> Tuple[int, ...]:
        return self._echelon[1]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def is_full(self) -> bool:
        return self.rank == self.ambient_dim

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return Subspace(self.ambient_dim, self.basis + other.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, rank={self.rank})"

    def _check_ambient(self, other: "Subspace"):
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch(
                f"Subspaces of Q^{self.ambient_dim} and Q^{other.ambient_dim}",
                {"expected": self.ambient_dim, "got": other.ambient_dim},
            )

    def contains_vector(self, v: Sequence[Fraction]) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatch(
                f"Vector of length {len(v)} tested against Q^{self.ambient_dim}",
                {"expected": self.ambient_dim, "got": len(v)},
            )
        return rank(self.basis + (as_vector(v),), self.ambient_dim) == self.rank

    def contains(self, other: "Subspace") -> bool:
        self._check_ambient(other)
        return (self + other).rank == self.rank

    def complement_in(self, larger: "Subspace") -> "Subspace":
        """
        A complement of ``self`` inside ``larger``, completed greedily from the
        reduced basis of ``larger``.
        """
        self._check_ambient(larger)
        chosen: List[Vector] = []
        current = list(self.basis)
        current_rank = self.rank
        for v in larger.basis:
            r = rank(current + [v], self.ambient_dim)
            if r > current_rank:
                chosen.append(v)
                current.append(v)
                current_rank = r
        return Subspace(self.ambient_dim, tuple(chosen))
