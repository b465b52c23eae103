import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscindex.factorization import builtin_certificate_PQUh
from oscindex.opnum import (
    Factor,
    GridSpec,
    SupportError,
    apply,
    apply_chain,
    block_factors,
    bump_family,
    certificate_chain,
    identity_matrix,
    pquh_factor,
    pquh_helper_det,
    pquh_helper_det_closed,
    printed_inverse_factor,
    residual_identity,
)


def zeros(t):
    return np.zeros(np.shape(t) + (2, 2), dtype=complex)


def test_identity_leaves_f():
    grid = GridSpec(4.0, 4, 1.0)
    f = bump_family(grid, 1, margin=1.0)[0]
    np.testing.assert_array_equal(apply(identity_matrix, None, 0.0, f, grid), f)


def test_shift_back_and_forth_is_exact():
    grid = GridSpec(6.0, 4, 1.0)
    f = bump_family(grid, 1, margin=2.5)[0]
    g = apply(zeros, identity_matrix, 1.0, f, grid)
    np.testing.assert_array_equal(apply(zeros, identity_matrix, -1.0, g, grid), f)


def test_support_violation():
    grid = GridSpec(3.0, 2, 1.0)
    f = np.ones((grid.t.size, 2), dtype=complex)
    with pytest.raises(SupportError):
        apply(zeros, identity_matrix, 1.0, f, grid)


def test_shift_must_be_grid_multiple():
    with pytest.raises(ValueError):
        GridSpec(3.0, 4, 1.0).slots(0.3)


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("q", [4, 8])
def test_printed_inverse(h, q):
    grid = GridSpec(6.0, q, h)
    ident = [Factor(identity_matrix)]
    assert residual_identity([pquh_factor(h), printed_inverse_factor(h)], ident, grid) < 1e-10
    assert residual_identity([printed_inverse_factor(h), pquh_factor(h)], ident, grid) < 1e-10


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
def test_helper_determinant_display(h):
    t = np.linspace(-5, 5, 1001)
    np.testing.assert_allclose(pquh_helper_det(t, h), pquh_helper_det_closed(t, h), atol=1e-10)


def test_helper_determinant_at_zero_shift():
    np.testing.assert_allclose(pquh_helper_det_closed(np.array([-np.inf, -3.0, 0.0, 3.0, np.inf]), 0.0), 1.0)


def test_block_identity():
    E1, E2 = block_factors(1.0)
    grid = GridSpec(5.0, 4, 1.0)
    assert residual_identity([E1, E2], [Factor(identity_matrix)], grid) < 1e-12


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
def test_corrected_certificate_identity(h):
    lhs, rhs = certificate_chain(builtin_certificate_PQUh(h), h)
    assert residual_identity(lhs, rhs, GridSpec(6.0, 4, h)) < 1e-8


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), a=st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_apply_is_linear(seed, a):
    grid = GridSpec(5.0, 4, 1.0)
    f, g = bump_family(grid, 2, margin=1.5, seed=seed)
    fac = pquh_factor(1.0)
    lhs = apply(fac.B0, fac.B1, 1.0, a * f + g, grid)
    rhs = a * apply(fac.B0, fac.B1, 1.0, f, grid) + apply(fac.B0, fac.B1, 1.0, g, grid)
    assert np.abs(lhs - rhs).max() < 1e-12 * max(1.0, abs(a))


def test_composition_is_associative():
    h = 1.0
    grid = GridSpec(6.0, 4, h)
    f = bump_family(grid, 1, margin=3.5, seed=3)[0]
    A, B, C = pquh_factor(h), printed_inverse_factor(h), pquh_factor(h)
    left = apply_chain([A, B, C], f, grid)
    right = apply_chain([A], apply_chain([B, C], f, grid), grid)
    np.testing.assert_array_equal(left, right)
