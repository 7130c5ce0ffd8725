"""
Seeded random nilpotent Lie algebras and bracket-generating polarizations.

Algebras are built as iterated central extensions of an abelian algebra by
random 2-cocycles. The cocycle space is computed exactly as a nullspace, so
the Jacobi identity holds by construction.
"""

import itertools
import logging
import random
from fractions import Fraction
from typing import List, Optional, Tuple

from src.qclab.linalg import Subspace, Vector, add, determinant, is_zero, nullspace, scale, zero_vector
from src.qclab.lie_core import (
    GroupSpec,
    LieAlgebra,
    bracket_span,
    build_lie_algebra,
    change_basis,
    coordinates_in_basis,
)

logger = logging.getLogger("qclab.random_algebras")


def _pairs(n: int) -> List[Tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def cocycle_basis(alg: LieAlgebra) -> List[Vector]:
    """
    Basis of the antisymmetric forms w (indexed by pairs i < j) with
    w([x,y],z) + w([y,z],x) + w([z,x],y) = 0.
    """
    pairs = _pairs(alg.dim)
    position = {p: k for k, p in enumerate(pairs)}

    def add_form(row: List[Fraction], v: Vector, c: int):
        # adds the coefficients of w(v, e_c)
        for l, vl in enumerate(v):
            if not vl or l == c:
                continue
            if l < c:
                row[position[(l, c)]] += vl
            else:
                row[position[(c, l)]] -= vl

    rows = []
    for i, j, k in itertools.combinations(range(alg.dim), 3):
        row = [Fraction(0)] * len(pairs)
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            add_form(row, alg.bracket_basis(a, b), c)
        if any(row):
            rows.append(tuple(row))
    return nullspace(rows, len(pairs))


def central_extension(alg: LieAlgebra, form: Vector, label: Optional[str] = None) -> LieAlgebra:
    """g + Qz with [x,y]' = [x,y] + w(x,y) z, z central."""
    label = label or f"e{alg.dim + 1}"
    entries = []
    for (i, j), w in zip(_pairs(alg.dim), form):
        coeffs = tuple(alg.bracket_basis(i, j)) + (w,)
        entries.append((i, j, coeffs))
    return build_lie_algebra(alg.basis_labels + (label,), entries)


def _random_invertible(rng: random.Random, n: int) -> List[Vector]:
    while True:
        P = [tuple(Fraction(rng.randint(-1, 1)) for _ in range(n)) for _ in range(n)]
        if determinant(P) != 0:
            return P


def random_nilpotent_algebra(rng: random.Random, dim: int, scramble: bool = True) -> LieAlgebra:
    """A random nilpotent algebra of the given dimension."""
    base_dim = dim if dim < 3 else rng.randint(2, dim - 1)
    alg = build_lie_algebra([f"e{k + 1}" for k in range(base_dim)], [])
    while alg.dim < dim:
        basis = cocycle_basis(alg)
        form: Vector = zero_vector(len(_pairs(alg.dim)))
        while basis and is_zero(form):
            form = zero_vector(len(_pairs(alg.dim)))
            for b in basis:
                form = add(form, scale(rng.randint(-2, 2), b))
        alg = central_extension(alg, form)
    if scramble and dim > 1:
        alg = change_basis(alg, _random_invertible(rng, dim))
    logger.debug(f"Random nilpotent algebra: dim {dim}, base {base_dim}, {len(alg.structure_constants)} brackets")
    return alg


def random_polarization(rng: random.Random, alg: LieAlgebra) -> Subspace:
    """
    A bracket-generating polarization: a complement of [g,g] perturbed by
    elements of [g,g], sometimes enlarged inside [g,g].
    """
    full = Subspace.full(alg.dim)
    derived = bracket_span(alg, full, full)
    complement = derived.complement_in(full)
    vectors = []
    for w in complement.basis:
        shift = zero_vector(alg.dim)
        for d in derived.basis:
            shift = add(shift, scale(rng.randint(-1, 1), d))
        vectors.append(add(w, shift))
    if derived.rank and rng.random() < 0.5:
        extra = zero_vector(alg.dim)
        while is_zero(extra):
            for d in derived.basis:
                extra = add(extra, scale(rng.randint(-2, 2), d))
        vectors.append(extra)
    return Subspace(alg.dim, tuple(vectors))


def random_group_spec(rng: random.Random, min_dim: int = 3, max_dim: int = 7) -> GroupSpec:
    dim = rng.randint(min_dim, max_dim)
    alg = random_nilpotent_algebra(rng, dim)
    return GroupSpec(alg, random_polarization(rng, alg), 0, f"random-{dim}")


def random_basis_change(rng: random.Random, n: int) -> List[Vector]:
    return _random_invertible(rng, n)


def transformed_subspace(P, sub: Subspace) -> Subspace:
    """Image of a subspace under old -> new coordinates for the basis change P."""
    return Subspace(sub.ambient_dim, tuple(coordinates_in_basis(P, v) for v in sub.basis))

