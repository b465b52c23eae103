import numpy as np
import pytest

from oscindex.geometry import OscillationSpec, constant, step_blend
from oscindex.symbols import (
    ExtendedElement,
    Generator,
    identity,
    p_symbol,
    projection_p,
    projection_q,
    s_symbol,
    singular,
    t_from_u,
    u_from_t,
)

RP = 0.5
T = np.linspace(-6, 6, 121)


def test_scalar_symbols_of_named_elements():
    s = np.array([0.3, 2.0, -1.0])
    np.testing.assert_allclose(identity(RP).plus(s), 1)
    np.testing.assert_allclose(identity(RP).minus(s), 1)
    np.testing.assert_allclose(singular(RP).plus(s), 1)
    np.testing.assert_allclose(singular(RP).minus(s), -1)
    np.testing.assert_allclose(projection_p(RP).plus(s), 1)
    np.testing.assert_allclose(projection_p(RP).minus(s), 0)


def test_sigma_at_zero():
    np.testing.assert_allclose(s_symbol(np.array([0.0]))[0], [[0, 1j], [-1j, 0]], atol=1e-15)


def test_sigma_limits():
    np.testing.assert_allclose(s_symbol(np.array([np.inf]))[0], np.diag([1, -1]), atol=1e-15)
    np.testing.assert_allclose(s_symbol(np.array([-np.inf]))[0], np.diag([-1, 1]), atol=1e-15)


def test_sigma_involution():
    S = s_symbol(T)
    np.testing.assert_allclose(np.linalg.det(S), -1, atol=1e-12)
    np.testing.assert_allclose(S @ S, np.broadcast_to(np.eye(2), S.shape), atol=1e-12)


def test_matrix_symbols():
    np.testing.assert_allclose(identity(RP).matrix_symbol(T), np.broadcast_to(np.eye(2), (T.size, 2, 2)))
    np.testing.assert_allclose(projection_p(RP).matrix_symbol(np.array([np.inf]))[0], np.diag([1, 0]), atol=1e-15)
    np.testing.assert_allclose(projection_p(RP).matrix_symbol(np.array([-np.inf]))[0], np.diag([0, 1]), atol=1e-15)
    np.testing.assert_allclose(singular(RP).det_symbol(T), -1, atol=1e-12)
    np.testing.assert_allclose(projection_p(RP).matrix_symbol(T), p_symbol(T), atol=1e-15)


def test_det_quadratic_matches_matrix():
    g = Generator(step_blend(2, 1j, RP), step_blend(0.5, -0.3, RP))
    np.testing.assert_allclose(g.det_symbol(T), np.linalg.det(g.matrix_symbol(T)), atol=1e-12)


def test_product_symbol_is_multiplicative():
    a = Generator(step_blend(2, 1j, RP), step_blend(0.5, -0.3, RP))
    b = projection_q(RP) + 3.0
    np.testing.assert_allclose((a * b).matrix_symbol(T), a.matrix_symbol(T) @ b.matrix_symbol(T), atol=1e-12)


def test_compactification_roundtrip():
    u = np.linspace(-1, 1, 41)
    np.testing.assert_allclose(u_from_t(t_from_u(u)), u, atol=1e-15)
    assert t_from_u(np.array([1.0]))[0] == np.inf


def test_pquh_corners(pquh):
    d = pquh(1.0)
    c = d.corner_data()
    assert c[("+", "+0")] == (1, 0) and c[("+", "-0")] == (1, 0)
    assert c[("-", "+0")] == (0, 1) and c[("-", "-0")] == (0, 1)
    pair = d.symbol_pair()
    np.testing.assert_allclose(pair.B0(T) + pair.B1(T), np.broadcast_to(np.eye(2), (T.size, 2, 2)), atol=1e-15)


def test_zero_shift_part():
    osc = OscillationSpec(1.0)
    zero = Generator(constant(0, RP), constant(0, RP))
    d = ExtendedElement(singular(RP), zero, osc)
    assert all(b == 0 for _, b in d.corner_data().pairs.values())
    np.testing.assert_allclose(d.symbol_pair().B1(T), 0)


def test_zero_h_collapses(pquh):
    d = pquh(0.0)
    s = np.array([0.1, -0.2, 2.0])
    total = projection_p(RP) + projection_q(RP)
    np.testing.assert_allclose(d.plus(s), total.plus(s))
    np.testing.assert_allclose(d.minus(s), total.minus(s))


def test_rho_prime_must_match():
    with pytest.raises(ValueError):
        Generator(constant(1, 0.5), constant(1, 0.4))
