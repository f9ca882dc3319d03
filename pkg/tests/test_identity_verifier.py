import math
from fractions import Fraction

import numpy as np
import pytest

from algebra.fock_operator import FockSpace
from errors import DomainError
from group.su11_group import GroupElement, compose, h_element, inverse, k_element, random_element
from irrep.irrep_basis import IrrepLabel
from verify.identity_verifier import IdentityVerifier

HALF = Fraction(1, 2)
PRINCIPAL = IrrepLabel(complex(-0.5, 1.0), 0)


@pytest.fixture
def verifier():
    return IdentityVerifier({'tolerance': 1e-9, 'tolerances': {'addition': 1e-8, 'legendre': 1e-10,
                                                               'unity': 1e-11}})


def test_tolerance_lookup(verifier):
    assert verifier.tolerance_for('addition') == 1e-8
    assert verifier.tolerance_for('sandwich_a') == 1e-9


def test_addition_identity_element(verifier, space32):
    report = verifier.check_addition(IrrepLabel(1, 0), 0, GroupElement.identity(), space32)
    assert report.residual < 1e-13
    assert report.passed


@pytest.mark.parametrize("label,k,g", [
    (IrrepLabel(1, 0), 1, h_element(0.5)),
    (IrrepLabel(2, 0), -1, k_element(0.9)),
    (IrrepLabel(HALF, HALF), 0, h_element(0.7)),
    (IrrepLabel(HALF, HALF), -1, h_element(0.5)),
    (IrrepLabel(Fraction(3, 2), HALF), -1, h_element(0.5)),
    (IrrepLabel(complex(-0.5, 1.0), HALF), -1, h_element(0.6)),
    (PRINCIPAL, 0, random_element(np.random.default_rng(4), alpha_max=1.0)),
    (IrrepLabel(-1, 0), 1, h_element(0.5)),
    (IrrepLabel(-1, 0), -2, random_element(np.random.default_rng(5), alpha_max=1.0)),
    (IrrepLabel(-HALF, HALF), 0, h_element(0.5)),
])
def test_addition_theorem(verifier, space32, label, k, g):
    report = verifier.check_addition(label, k, g, space32)
    assert report.passed, report.message
    assert report.extra['interior'] >= 8


def test_addition_discrete_pair_boundary_component(verifier, space32):
    label, g = IrrepLabel(-1, 0), h_element(0.5)
    report = verifier.check_addition(label, 1, g, space32)
    assert report.passed, report.message
    # U D_1 U* leaves the subspace D_1, D_2, ... only along the identity
    assert abs(report.extra['boundary']['0']) > 1e-3
    size = report.extra['interior']
    difference, rhs, _ = verifier.addition_difference(label, 1, g, FockSpace(report.parameters['N_used']), size)
    scale = max(1.0, float(np.max(np.abs(rhs))))
    off_diagonal = difference - np.diag(np.diag(difference))
    assert float(np.max(np.abs(off_diagonal))) / scale < 1e-8
    diagonal = np.diag(difference)
    assert float(np.max(np.abs(diagonal - diagonal[0]))) / scale < 1e-8
    assert diagonal[0] == pytest.approx(report.extra['boundary']['0'], abs=1e-8 * scale)


def test_addition_boundary_only_for_discrete_pair(verifier, space32):
    report = verifier.check_addition(IrrepLabel(1, 0), 0, h_element(0.5), space32)
    assert report.extra['boundary'] == {}


def test_addition_finite_truncation_error_decreases():
    verifier = IdentityVerifier()
    label, g = IrrepLabel(1, 0), h_element(2.0)
    errors = []
    for dim in (24, 32, 48):
        difference, _, _ = verifier.addition_difference(label, 0, g, FockSpace(dim), 8)
        errors.append(float(np.max(np.abs(difference))))
    assert errors[2] < errors[1] < errors[0]
    assert errors[2] < 0.5 * errors[0]

def test_sandwich_identity_element(verifier, space32):
    report = verifier.check_sandwich_a(IrrepLabel(1, 0), 1, GroupElement.identity(), 3, 1, space32)
    assert report.residual < 1e-13
    assert report.extra['lhs'] == pytest.approx(report.extra['rhs'])


def test_sandwich_b_boost(verifier, space32):
    report = verifier.check_sandwich_b(IrrepLabel(1, 0), 1, h_element(0.5), 2, 0, space32)
    assert report.residual < 1e-10


def test_sandwich_c_boost(verifier, space32):
    report = verifier.check_sandwich_c(IrrepLabel(1, 0), 0, h_element(1.0), 1, 1, space32)
    assert report.residual <= 1e-9
    assert report.extra['order'] == 'nk'
    assert 'order_kn_residual' in report.extra


def test_sandwich_a_boost_example(verifier, space32):
    report = verifier.check_sandwich_a(IrrepLabel(1, 0), 0, h_element(1.0), 0, 0, space32)
    assert report.residual <= 1e-10
    assert abs(report.extra['rhs']) > 0


@pytest.mark.parametrize("l,s", [(3, 1), (2, 0), (4, 4), (3, 0)])
def test_sandwich_a_matches_addition_difference(verifier, space32, l, s):
    label, g = IrrepLabel(1, 0), h_element(0.8)
    addition = verifier.check_addition(label, 0, g, space32)
    space = FockSpace(addition.parameters['N_used'])
    difference, _, _ = verifier.addition_difference(label, 0, g, space, addition.extra['interior'])
    entry = verifier.check_sandwich_a(label, 0, g, l, s, space32)
    assert abs((entry.extra['lhs'] - entry.extra['rhs']) - difference[l, s]) < 1e-13


def test_sandwich_c_copasses_with_sandwich_a_of_inverse(verifier, space32):
    g = compose(h_element(0.7), k_element(0.3))
    for label, k, l, s in ((IrrepLabel(1, 0), 0, 2, 0), (IrrepLabel(2, 0), 1, 3, 1), (PRINCIPAL, 0, 1, 1)):
        inverted = verifier.check_sandwich_c(label, k, g, l, s, space32)
        direct = verifier.check_sandwich_a(label, k, inverse(g), l, s, space32)
        assert inverted.passed and direct.passed


def test_sandwich_c_raises_truncation_for_the_double_sum(verifier, space32):
    report = verifier.check_sandwich_c(IrrepLabel(2, 0), 0, h_element(0.5), 4, 6, space32)
    assert report.passed
    assert report.extra['N_used'] == 2 * report.extra['N_compared']
    assert report.tail_estimate < 1e-6

def test_sandwich_entry_outside_interior(verifier, space32):
    with pytest.raises(DomainError):
        verifier.check_sandwich_a(IrrepLabel(1, 0), 0, h_element(0.5), 40, 0, space32)


def test_generating_function_binomial(verifier):
    report = verifier.check_generating_function(0, 0, 3, 0.4)
    assert report.passed
    zero = verifier.check_generating_function(0.5, 1.5, 2.0, 0.0)
    assert zero.residual < 1e-15


def test_generating_function_exact_sample(verifier):
    report = verifier.check_generating_function(-1, 2, 3, Fraction(2, 5))
    assert report.passed
    assert report.extra['exact']


def test_generating_function_complex_parameters(verifier):
    report = verifier.check_generating_function(complex(0.5, 1.0), complex(0.5, -1.0), 1.5, 0.6)
    assert report.passed


def test_generating_function_domain(verifier):
    with pytest.raises(DomainError):
        verifier.check_generating_function(1, 1, 2, 1.0)
    with pytest.raises(DomainError):
        verifier.check_generating_function(1, 1, -2, 0.5)


def test_structural_orthogonality(verifier, space16):
    different_k = verifier.check_orthogonality_structural(IrrepLabel(1, 0), IrrepLabel(2, 0), 0, 1, space16)
    assert different_k.residual == 0 and different_k.passed
    different_eps = verifier.check_orthogonality_structural(IrrepLabel(HALF, HALF), IrrepLabel(1, 0), 0, 0,
                                                            space16)
    assert different_eps.residual == 0
    same = verifier.check_orthogonality_structural(IrrepLabel(1, 0), IrrepLabel(2, 0), 0, 0, space16)
    assert same.extra['same_shift']


@pytest.mark.parametrize("mu", [0.0, 0.25])
def test_regulated_orthogonality(verifier, mu):
    other = IrrepLabel(complex(-0.5, 1.5), 0)
    report = verifier.check_orthogonality_regulated(PRINCIPAL, other, 0, 0.5, mu=mu)
    assert report.passed
    assert len(report.extra['trend']) == 3


def test_regulated_orthogonality_mixed_epsilon(verifier):
    with pytest.raises(DomainError):
        verifier.check_orthogonality_regulated(PRINCIPAL, IrrepLabel(0.3, HALF), 0, 0.5)


@pytest.mark.parametrize("tau", range(4))
@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 2.0])
def test_legendre_identity(verifier, tau, alpha):
    assert verifier.check_legendre_identity(tau, alpha).passed


def test_legendre_examples(verifier):
    assert verifier.check_legendre_identity(3, 0.0).extra['value'] == pytest.approx(1.0)
    report = verifier.check_legendre_identity(1, 1.0)
    assert report.extra['value'] == pytest.approx(math.cosh(1.0), abs=1e-10)


@pytest.mark.parametrize("tau", range(4))
@pytest.mark.parametrize("alpha", [0.0, 0.3, 1.0, 2.0])
def test_unity_identity(verifier, tau, alpha):
    assert verifier.check_unity_identity(tau, alpha).passed


def test_unity_printed_sign_differs(verifier):
    report = verifier.check_unity_identity(0, 0.3)
    assert report.extra['value'] == pytest.approx(1.0)
    assert report.extra['printed_sign_residual'] == pytest.approx(2.0)


def test_closing_identities_reject_negative_alpha(verifier):
    with pytest.raises(DomainError):
        verifier.check_legendre_identity(1, -0.5)
    with pytest.raises(DomainError):
        verifier.check_unity_identity(1, -0.5)
