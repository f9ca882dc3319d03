import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

from algebra.fock_operator import FockSpace, random_operator
from errors import DomainError, PoleError
from irrep.irrep_basis import (
    IrrepLabel,
    SeriesKind,
    boundary_operators,
    classify,
    coefficient_c,
    coefficient_c_normalized,
    d_operator,
    d_operator_product,
    export_csv,
    f_series_value,
    f_value,
    f_values,
    highest_lowest_weight_check,
    ladder_minus,
    ladder_residuals,
    lie_algebra_residuals,
    real_structure_check,
    recurrence_residuals,
    reduced_index,
    reflection_sign,
    remove_boundary,
)

HALF = Fraction(1, 2)


@pytest.mark.parametrize("tau,eps,kind,inside,outside", [
    (1, 0, SeriesKind.FINITE, [-1, 0, 1], [-2, 2]),
    (-1, 0, SeriesKind.DISCRETE_PAIR, [-3, -1, 1, 4], [0]),
    (HALF, HALF, SeriesKind.FINITE, [-1, 0], [-2, 1]),
    (-HALF, HALF, SeriesKind.DISCRETE_PAIR, [-2, -1, 0, 3], []),
    (complex(-0.5, 1.0), 0, SeriesKind.CONTINUOUS, [-10, 0, 10], []),
    (0.3, 0, SeriesKind.CONTINUOUS, [-5, 5], []),
])
def test_classify(tau, eps, kind, inside, outside):
    series = classify(IrrepLabel(tau, eps))
    assert series.kind == kind
    assert all(series.contains(k) for k in inside)
    assert not any(series.contains(k) for k in outside)


def test_label_validation():
    with pytest.raises(DomainError):
        IrrepLabel(1, 0.3)
    assert IrrepLabel(2, 0).exact
    assert not IrrepLabel(0.3, 0).exact
    assert IrrepLabel(HALF, 0.5).to_json() == {'tau': [0.5, 0.0], 'epsilon': 0.5}


def test_coefficient_examples():
    assert coefficient_c(IrrepLabel(1, 0), 1, 2) == 1
    assert coefficient_c(IrrepLabel(2, 0), 0, 0) == 2
    assert coefficient_c_normalized(IrrepLabel(2, 0), 0, 1) == Fraction(3)
    with pytest.raises(PoleError):
        coefficient_c(IrrepLabel(-3, 0), 0, 1)


@pytest.mark.parametrize("label", [IrrepLabel(2, 0), IrrepLabel(HALF, 0), IrrepLabel(HALF, HALF)])
def test_recurrences_hold_exactly(label):
    for k in range(1, 4):
        for n in range(6):
            assert recurrence_residuals(label, k, n) == (0, 0)


def test_recurrences_complex_label():
    label = IrrepLabel(complex(-0.5, 1.0), 0)
    for k in range(3):
        for n in range(5):
            r1, r2 = recurrence_residuals(label, k, n)
            assert abs(r1) < 1e-10 and abs(r2) < 1e-10


def test_reduced_index_reflects_negative_k():
    assert reduced_index(IrrepLabel(1, HALF), 2) == Fraction(5, 2)
    assert reduced_index(IrrepLabel(1, HALF), -2) == Fraction(3, 2)


def test_f_conventions_differ_in_sign():
    label = IrrepLabel(1, 0)
    assert f_value(label, 1, 0) == 2
    assert f_value(label, 1, 1) == -2
    assert f_value(label, 1, 1, convention="literal") == 2
    assert f_series_value(label, 1, 1) == -2


def test_f_closed_form_matches_defining_expansion():
    for label in (IrrepLabel(2, 0), IrrepLabel(HALF, HALF)):
        for k in (0, 1, -1):
            values = f_values(label, k, 6)
            for zeta in range(7):
                assert complex(values[zeta]) == pytest.approx(complex(f_series_value(label, k, zeta)))


def test_f_errors():
    with pytest.raises(DomainError):
        f_value(IrrepLabel(1, 0), 0, -1)
    with pytest.raises(DomainError):
        f_values(IrrepLabel(1, 0), 0, 3, convention="other")


def test_d_operator_entry():
    d = d_operator(IrrepLabel(1, 0), 1, FockSpace(8)).as_operator().to_dense()
    assert d[3, 1] == pytest.approx(math.sqrt(6) * -2)
    assert d[2, 0] == pytest.approx(math.sqrt(2) * 2)


@pytest.mark.parametrize("label,k", [(IrrepLabel(2, 0), 1), (IrrepLabel(2, 0), -1),
                                     (IrrepLabel(0.3, 0), 2), (IrrepLabel(HALF, HALF), -1)])
def test_d_constructions_agree(label, k):
    space = FockSpace(12)
    direct = d_operator(label, k, space).as_operator().to_dense()
    product = d_operator_product(label, k, space).to_dense()
    scale = max(1.0, float(np.max(np.abs(direct))))
    assert_allclose(direct, product, atol=1e-12 * scale)


def test_d_outside_subspace_or_truncation():
    with pytest.raises(DomainError):
        d_operator(IrrepLabel(1, 0), 2, FockSpace(8))
    with pytest.raises(DomainError):
        d_operator(IrrepLabel(0.3, 0), 3, FockSpace(6))


def test_ladder_finite_label_skips_outside_neighbours(space16):
    residuals = ladder_residuals(IrrepLabel(1, 0), 1, space16)
    assert set(residuals) == {'h', 'minus'}
    assert max(residuals.values()) < 1e-10


@pytest.mark.parametrize("label", [IrrepLabel(0.3, 0), IrrepLabel(complex(-0.5, 1.0), 0), IrrepLabel(2, HALF)])
def test_ladder_relations(label):
    residuals = ladder_residuals(label, 0, FockSpace(24))
    assert set(residuals) == {'h', 'minus', 'plus'}
    assert max(residuals.values()) < 1e-9


def test_edge_weights_finite(space16):
    check = highest_lowest_weight_check(IrrepLabel(1, 0), space16)
    assert all(c == 0 for c in check.coefficients.values())
    assert set(check.image_norms) == set(check.coefficients)
    assert max(check.image_norms.values()) < 1e-10


def test_edge_weights_discrete_pair_measures_the_residue(space16):
    check = highest_lowest_weight_check(IrrepLabel(-1, 0), space16)
    assert all(c == 0 for c in check.coefficients.values())
    assert set(check.image_norms) == set(check.coefficients) == set(check.boundary)
    # H- D_1 = H+ D_-1 = -1 exactly: the residue of (1 + tau) D_0 at tau = -1
    for value in check.boundary.values():
        assert value == pytest.approx(-1.0, abs=1e-12)
    assert max(check.image_norms.values()) < 1e-10


def test_edge_weights_discrete_pair_without_gap(space16):
    check = highest_lowest_weight_check(IrrepLabel(-HALF, HALF), space16)
    assert check.boundary == {}
    assert max(check.image_norms.values()) < 1e-10


def test_boundary_operators():
    space = FockSpace(10)
    identity = boundary_operators(IrrepLabel(-1, 0), space)
    assert list(identity) == [0]
    assert_allclose(identity[0].to_dense(), np.eye(10), atol=1e-14)
    assert sorted(boundary_operators(IrrepLabel(-2, 0), space)) == [-1, 0, 1]
    assert sorted(boundary_operators(IrrepLabel(-Fraction(3, 2), HALF), space)) == [-1, 0]
    assert boundary_operators(IrrepLabel(1, 0), space) == {}
    assert boundary_operators(IrrepLabel(-HALF, HALF), space) == {}


def test_boundary_operators_close_the_ladder():
    # at tau = -2 the edge D_2 falls onto the residue at the top of the gap
    space = FockSpace(20)
    label = IrrepLabel(-2, 0)
    basis = boundary_operators(label, space)
    image = ladder_minus(d_operator(label, 2, space).as_operator())
    size = image.interior
    remainder, found = remove_boundary(image.interior_block(size),
                                       {j: op.interior_block(size) for j, op in basis.items()})
    assert set(found) == {-1, 0, 1}
    assert abs(found[1]) > 1e-3
    assert abs(found[0]) < 1e-12 and abs(found[-1]) < 1e-12
    assert float(np.max(np.abs(remainder))) < 1e-10


def test_remove_boundary_projects_each_diagonal():
    block = np.diag([2.0, 2.0, 2.0]) + np.diag([1.0, 5.0], k=1)
    remainder, found = remove_boundary(block, {0: np.eye(3)})
    assert found == {0: pytest.approx(2.0)}
    assert_allclose(remainder, np.diag([1.0, 5.0], k=1))


def test_reflection_sign():
    assert reflection_sign(IrrepLabel(HALF, HALF), -1) == -1
    assert reflection_sign(IrrepLabel(HALF, HALF), 0) == 1
    assert reflection_sign(IrrepLabel(2, 0), -3) == 1


@pytest.mark.parametrize("label,k", [
    (IrrepLabel(HALF, HALF), 0),
    (IrrepLabel(HALF, HALF), -1),
    (IrrepLabel(Fraction(3, 2), HALF), 0),
    (IrrepLabel(Fraction(3, 2), HALF), -1),
    (IrrepLabel(complex(-0.5, 1.0), HALF), 0),
    (IrrepLabel(complex(-0.5, 1.0), HALF), -1),
    (IrrepLabel(complex(-0.5, 1.0), HALF), -2),
])
def test_ladder_across_zero_half_epsilon(label, k):
    residuals = ladder_residuals(label, k, FockSpace(24))
    assert {'minus', 'plus'} & set(residuals)
    assert max(residuals.values()) < 1e-9

def test_edge_weights_need_an_edge(space16):
    with pytest.raises(DomainError):
        highest_lowest_weight_check(IrrepLabel(0.3, 0), space16)


def test_lie_algebra_on_random_operator(space16, rng):
    residuals = lie_algebra_residuals(random_operator(space16, (-2, 0, 2), rng))
    assert max(residuals.values()) < 1e-9


def test_real_structure(space16, rng):
    residuals = real_structure_check(space16, rng)
    assert residuals['H+ vs -H-'] < 1e-8
    assert residuals['H self-adjoint'] < 1e-8


def test_export_f_table():
    lines = export_csv(IrrepLabel(1, 0), [0], FockSpace(9), table="f").splitlines()
    assert lines[0].startswith("# ")
    assert lines[1] == "k,t,re,im"
    assert len(lines) == 2 + 9
    with pytest.raises(DomainError):
        export_csv(IrrepLabel(1, 0), [0], FockSpace(9), table="x")
