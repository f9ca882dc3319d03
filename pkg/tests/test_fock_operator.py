import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from algebra.fock_operator import (
    FockOperator,
    FockSpace,
    ShiftedDiagonalOperator,
    annihilation,
    commutator,
    creation,
    falling_factorial_diagonal,
    interior_residual,
    number_operator,
    random_operator,
    trace_inner_product,
)
from errors import DimensionMismatchError, DomainError


def test_annihilation_entries_n3():
    z = annihilation(FockSpace(3)).to_dense()
    expected = np.zeros((3, 3))
    expected[0, 1] = 1.0
    expected[1, 2] = math.sqrt(2)
    assert_allclose(z, expected)


def test_annihilation_kills_vacuum_and_lowers():
    z = annihilation(FockSpace(6)).to_dense()
    assert np.all(z[:, 0] == 0)
    assert z[2, 3] == pytest.approx(math.sqrt(3))


def test_creation_is_adjoint_of_annihilation(space16):
    assert_allclose(creation(space16).adjoint().to_dense(), annihilation(space16).to_dense())
    assert creation(space16).to_dense()[3, 2] == pytest.approx(math.sqrt(3))


def test_canonical_commutator_on_interior(space16):
    c = commutator(annihilation(space16), creation(space16))
    assert c.margin >= 1
    assert interior_residual(c, FockOperator.identity(space16)) < 1e-14
    # Truncation corrupts only the last row
    assert c.to_dense()[-1, -1] == pytest.approx(-(space16.dim - 1))


def test_number_commutator_raises(space16):
    zeta = creation(space16) @ annihilation(space16)
    assert_allclose(zeta.to_dense(), number_operator(space16).to_dense())
    lhs = commutator(zeta, creation(space16))
    assert interior_residual(lhs, creation(space16)) < 1e-13


def test_falling_factorial_examples():
    space = FockSpace(8)
    assert_allclose(falling_factorial_diagonal(0, space).to_dense(), np.eye(8))
    values = np.diag(falling_factorial_diagonal(2, space).to_dense()).real
    assert values[5] == 20
    assert np.diag(falling_factorial_diagonal(3, space).to_dense())[2] == 0
    zs, z = creation(space), annihilation(space)
    assert_allclose(np.diag((zs.power(2) @ z.power(2)).to_dense()), values)


def test_trace_inner_product_examples(space16):
    n = space16.dim
    identity = FockOperator.identity(space16)
    assert trace_inner_product(identity, identity) == pytest.approx(n)
    z = annihilation(space16)
    assert trace_inner_product(z, z) == pytest.approx(n * (n - 1) / 2)
    assert trace_inner_product(z, creation(space16)) == 0


def test_shift_outside_space_rejected():
    with pytest.raises(DomainError):
        ShiftedDiagonalOperator(FockSpace(4), 4, np.zeros(4))


def test_mixed_spaces_rejected():
    with pytest.raises(DimensionMismatchError):
        annihilation(FockSpace(4)) + annihilation(FockSpace(5))


def test_empty_interior_gives_nan():
    space = FockSpace(4)
    a = FockOperator(space, {0: np.ones(4)}, margin=4)
    assert math.isnan(interior_residual(a, a))


def test_from_dense_round_trips_sparse_structure(space16, rng):
    op = random_operator(space16, (-2, 0, 3), rng)
    rebuilt = FockOperator.from_dense(op.to_dense())
    assert rebuilt.shifts == [-2, 0, 3]


@given(st.integers(min_value=0, max_value=2**31 - 1),
       st.lists(st.integers(min_value=-4, max_value=4), min_size=1, max_size=3, unique=True),
       st.lists(st.integers(min_value=-4, max_value=4), min_size=1, max_size=3, unique=True))
def test_inner_product_hermitian_and_product_adjoint(seed, shifts_a, shifts_b):
    space = FockSpace(12)
    rng = np.random.default_rng(seed)
    a = random_operator(space, shifts_a, rng)
    b = random_operator(space, shifts_b, rng)
    assert trace_inner_product(a, b) == pytest.approx(np.conj(trace_inner_product(b, a)))
    assert_allclose((a @ b).adjoint().to_dense(), (b.adjoint() @ a.adjoint()).to_dense(), atol=1e-12)
    assert_allclose((a @ b).to_dense(), a.to_dense() @ b.to_dense(), atol=1e-12)


def test_commutator_antisymmetric(space16, rng):
    a = random_operator(space16, (-1, 2), rng)
    assert np.max(np.abs(commutator(a, a).to_dense())) == 0
