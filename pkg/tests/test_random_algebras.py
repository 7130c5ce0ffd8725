import os
import random
import sys

import pytest

# Add the parent directory to the path so we can import our module
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.qclab.classifier import growth_dimension, hausdorff_dimension, is_carnot_polarization
from src.qclab.lie_core import GroupSpec, build_lie_algebra, change_basis, is_bracket_generating, is_nilpotent
from src.qclab.random_algebras import (
    central_extension,
    cocycle_basis,
    random_basis_change,
    random_group_spec,
    random_nilpotent_algebra,
    random_polarization,
    transformed_subspace,
)


@pytest.fixture
def rng():
    return random.Random(20240531)


class TestConstruction:
    def test_abelian_plane_has_one_cocycle(self):
        plane = build_lie_algebra(["X", "Y"], [])
        basis = cocycle_basis(plane)
        assert len(basis) == 1
        heisenberg = central_extension(plane, basis[0], label="Z")
        assert heisenberg.basis_labels == ("X", "Y", "Z")
        assert len(heisenberg.structure_constants) == 1

    @pytest.mark.parametrize("dim", [1, 2, 3, 5, 7])
    def test_random_algebras_are_nilpotent(self, rng, dim):
        alg = random_nilpotent_algebra(rng, dim)
        assert alg.dim == dim
        assert is_nilpotent(alg)

    def test_polarizations_generate(self, rng):
        for _ in range(20):
            alg = random_nilpotent_algebra(rng, rng.randint(3, 6))
            assert is_bracket_generating(alg, random_polarization(rng, alg))

    def test_seeded_runs_repeat(self):
        a = random_group_spec(random.Random(7))
        b = random_group_spec(random.Random(7))
        assert a.algebra == b.algebra
        assert a.polarization == b.polarization


class TestDimensionProperties:
    def test_growth_dominates_hausdorff_with_equality_exactly_for_carnot(self, rng):
        for _ in range(200):
            spec = random_group_spec(rng)
            Q = hausdorff_dimension(spec)
            N = growth_dimension(spec)
            assert Q <= N
            assert (Q == N) == is_carnot_polarization(spec)

    def test_dimensions_survive_basis_changes(self, rng):
        for _ in range(30):
            spec = random_group_spec(rng, max_dim=5)
            P = random_basis_change(rng, spec.algebra.dim)
            moved = GroupSpec(change_basis(spec.algebra, P), transformed_subspace(P, spec.polarization))
            assert hausdorff_dimension(moved) == hausdorff_dimension(spec)
            assert growth_dimension(moved) == growth_dimension(spec)


if __name__ == "__main__":
    pytest.main(["-xvs", __file__])
