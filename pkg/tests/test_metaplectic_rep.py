import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from algebra.fock_operator import FockSpace
from errors import DimensionMismatchError, DomainError
from group.su11_group import compose, h_element, k_element, random_element
from weyl.metaplectic_rep import (
    BlockSource,
    UnitaryBlock,
    homomorphism_residual,
    interior_size,
    intertwining_residual,
    margin_heuristic,
    row_leakage,
    scaling_check,
    squeeze_element,
    u_of_g,
    u_phase,
    u_squeeze_closed,
    u_squeeze_quadrature,
)


def test_phase_block_entries():
    space = FockSpace(6)
    full_turn = np.diag(u_phase(2 * math.pi, space).entries)
    assert full_turn[1] == pytest.approx(-1.0)
    assert full_turn[2] == pytest.approx(1.0)
    assert np.diag(u_phase(math.pi, space).entries)[2] == pytest.approx(-1.0)


def test_closed_form_at_zero_is_identity():
    assert_allclose(u_squeeze_closed(0.0, FockSpace(10)).entries, np.eye(10))


@pytest.mark.parametrize("alpha", [0.3, 1.0, -1.4])
def test_closed_form_low_entries(alpha):
    s, c = math.sinh(0.5 * alpha), math.cosh(0.5 * alpha)
    assert squeeze_element(0, 0, alpha) == pytest.approx(c ** -0.5)
    assert squeeze_element(0, 2, alpha) == pytest.approx(s / (math.sqrt(2) * c ** 1.5))
    assert squeeze_element(1, 2, alpha) == 0


def test_swap_rule():
    for m, n in [(4, 0), (5, 1), (6, 2)]:
        assert squeeze_element(m, n, 0.7) == squeeze_element(n, m, -0.7)
    assert squeeze_element(2, 0, 0.7) == pytest.approx(-squeeze_element(0, 2, 0.7))


def test_negative_index_rejected():
    with pytest.raises(DomainError):
        squeeze_element(-1, 1, 0.5)


@pytest.mark.parametrize("alpha", [0.3, 1.0, 2.0])
def test_closed_form_matches_quadrature(alpha):
    space = FockSpace(24)
    closed = u_squeeze_closed(alpha, space).entries
    quadrature = u_squeeze_quadrature(alpha, space).entries
    assert np.max(np.abs(closed - quadrature)) < 1e-10


def test_quadrature_order_too_low():
    with pytest.raises(DomainError):
        u_squeeze_quadrature(0.5, FockSpace(16), order=8)


def test_interior_unitarity(space32):
    block = u_squeeze_closed(1.0, space32)
    assert 0 < block.interior() <= space32.dim
    assert block.unitarity_residual() < 1e-9


def test_leakage_and_interior():
    assert row_leakage(0, 0.0, 8) == 0
    assert row_leakage(0, 1.0, 8) > row_leakage(0, 1.0, 16)
    space = FockSpace(16)
    assert interior_size(0.0, space) == 16
    assert interior_size(3.0, space) < interior_size(0.5, space)
    assert margin_heuristic(0.0, 16) == 0
    assert margin_heuristic(2.0, 16) == 10


def test_u_of_boost_matches_closed_form(space16):
    block = u_of_g(h_element(0.8), space16)
    assert block.source == BlockSource.CARTAN_PRODUCT
    assert_allclose(block.entries, u_squeeze_closed(0.8, space16).entries, atol=1e-14)


def test_u_of_rotation_is_diagonal_phase(space16):
    entries = u_of_g(k_element(0.6), space16).entries
    assert_allclose(np.abs(np.diag(entries)), np.ones(16), atol=1e-14)
    assert np.max(np.abs(entries - np.diag(np.diag(entries)))) < 1e-14


def test_homomorphism_random_pairs(space32):
    rng = np.random.default_rng(11)
    for _ in range(10):
        g1, g2 = random_element(rng, alpha_max=1.0), random_element(rng, alpha_max=1.0)
        result = homomorphism_residual(g1, g2, space32)
        assert result.interior > 0
        assert result.residual < 1e-8
        assert abs(abs(result.phase) - 1.0) < 1e-12


def test_homomorphism_boosts_compose_without_phase(space32):
    result = homomorphism_residual(h_element(0.4), h_element(0.6), space32)
    assert result.residual < 1e-10
    assert result.phase == pytest.approx(1.0)
    assert compose(h_element(0.4), h_element(0.6)).distance(h_element(1.0)) < 1e-12


def test_intertwining_boost(space32):
    result = intertwining_residual(h_element(0.8), space32)
    assert result.interior > 0
    assert result.residual < 1e-8
    assert len(result.residuals) == 4


def test_intertwining_general_element(space32):
    result = intertwining_residual(random_element(np.random.default_rng(2), alpha_max=1.0), space32)
    assert min(result.residuals.values()) < 1e-8


@pytest.mark.parametrize("m", range(4))
def test_hermite_scaling(m):
    x = np.linspace(-3.0, 3.0, 10)
    assert scaling_check(0.3, m, x, FockSpace(40)) < 1e-8


def test_scaling_index_outside_truncation():
    with pytest.raises(DomainError):
        scaling_check(0.3, 8, np.zeros(1), FockSpace(8))


def test_block_shape_checked():
    with pytest.raises(DimensionMismatchError):
        UnitaryBlock(FockSpace(4), np.eye(3), BlockSource.CLOSED_FORM)


def test_csv_and_json_exports():
    block = u_of_g(h_element(0.5), FockSpace(4))
    lines = block.to_csv().splitlines()
    assert lines[0].startswith("# ")
    assert json.loads(lines[0][2:])['N'] == 4
    assert lines[1] == "m,n,re,im"
    assert len(lines) == 2 + 16
    payload = json.loads(block.to_json())
    assert payload['source'] == 'cartan_product'
    assert len(payload['entries']) == 4
