import numpy as np
import pytest

from oscindex.factorization import (
    Certificate,
    builtin_certificate_PQUh,
    constant_certificate,
    corrected_pquh_pair,
    diagonal_certificate,
    displayed_w1_tilde,
    flip_certificate,
    normalize_certificate,
    pquh_element,
    swap_certificate,
    verify_certificate,
    weighted_shift_spectral_radius,
)
from oscindex.geometry import OscillationSpec, constant, step_blend
from oscindex.symbols import ExtendedElement, FLIP, multiplication, p_symbol

RP = 0.5


@pytest.fixture
def diag_element():
    # B0 = diag(1, 1/4), B1 = diag(1/4, 1)
    g0 = multiplication(step_blend(1.0, 0.25, RP))
    g1 = multiplication(step_blend(0.25, 1.0, RP))
    return ExtendedElement(g0, g1, OscillationSpec(1.0))


def test_identity_certificate_accepted(diag_element):
    cert = constant_certificate(np.eye(2), np.eye(2), [1, 0.25], [0.25, 1], "e3", 1)
    rep = verify_certificate(cert, diag_element)
    assert rep.accepted, rep.reasons
    assert rep.spectral_radii == {"e0_22": 0.25, "e1_11": 0.25}
    assert rep.implied_case == "III"


def test_large_weight_rejected(diag_element):
    cert = constant_certificate(np.eye(2), np.eye(2), [1, 4], [0.25, 1], "e3", 1)
    rep = verify_certificate(cert, diag_element)
    assert not rep.accepted
    assert any("spectral radius" in r for r in rep.reasons)


def test_weighted_shift_radius():
    assert weighted_shift_spectral_radius(0.25, 0.25) == 0.25
    assert weighted_shift_spectral_radius(0.5, 1 / 3) == 0.5
    assert weighted_shift_spectral_radius(0, 0) == 0


def test_weighted_shift_radius_oracle():
    # ||(c T_h)^n||^(1/n) = sup_t |c(t) c(t+h) ... c(t+(n-1)h)|^(1/n) with c from 1/3 to 1/2
    c = lambda t: 1 / 3 + (1 / 6) * (1 + np.tanh(t)) / 2  # noqa: E731
    t = np.linspace(-50, 200, 5001)
    n = 64
    prod = np.prod([np.abs(c(t + k)) for k in range(n)], axis=0)
    assert prod.max() ** (1 / n) == pytest.approx(weighted_shift_spectral_radius(0.5, 1 / 3), abs=1e-3)


def test_printed_matrix_is_degenerate_at_zero():
    t = np.linspace(-2, 2, 41)
    np.testing.assert_allclose(np.linalg.det(displayed_w1_tilde(t)), 1 - np.exp(2 * np.pi * t), atol=1e-12)
    assert np.linalg.det(displayed_w1_tilde(np.array([0.0])))[0] == 0


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0, -1.0])
def test_builtin_certificate(h):
    cert = builtin_certificate_PQUh(h)
    rep = verify_certificate(cert, pquh_element(h), tol=1e-8)
    assert rep.accepted, rep.reasons
    assert rep.implied_case == "V" and rep.infinity_type == "skew-diagonal"
    assert "1 - e^(2 pi t)" in cert.provenance


def test_builtin_certificate_zero_shift():
    rep = verify_certificate(builtin_certificate_PQUh(0.0), pquh_element(0.0))
    assert rep.accepted, rep.reasons


def test_corrected_pair_reduces_projection():
    w1, s1 = corrected_pquh_pair(1.0)
    t = np.linspace(-4, 4, 161)
    prod = np.linalg.inv(w1(t)) @ p_symbol(t) @ s1(t)
    np.testing.assert_allclose(prod, np.broadcast_to(np.diag([0, 1]), prod.shape), atol=1e-8)


def skew_certificate():
    return constant_certificate(FLIP, FLIP, [1, 0.25], [0.25, 1], "e3", 1)


def test_flip_is_involution():
    cert = builtin_certificate_PQUh(1.0)
    twice = flip_certificate(flip_certificate(cert))
    t = np.linspace(-3, 3, 13)
    for name in ("w1", "s1", "e0", "e1"):
        np.testing.assert_allclose(getattr(twice, name)(t), getattr(cert, name)(t))
    assert (twice.form, twice.l) == (cert.form, cert.l)


def test_normalize_skew_skew(diag_element):
    cert = skew_certificate()
    assert cert.infinity_type() == "skew-skew"
    norm = normalize_certificate(cert)
    assert norm.infinity_type() == "diagonal-diagonal"


def test_normalize_keeps_diagonal():
    cert = constant_certificate(np.eye(2), np.eye(2), [1, 0.25], [0.25, 1], "e3", 1)
    assert normalize_certificate(cert) is cert


def test_flip_keeps_residuals(pquh):
    d = pquh(1.0)
    cert = builtin_certificate_PQUh(1.0)
    a = verify_certificate(cert, d)
    b = verify_certificate(flip_certificate(cert), d)
    assert b.accepted and b.implied_case == a.implied_case
    assert max(b.residual_e0, b.residual_e1) < 1e-12


def test_swap_certificate_for_q_plus_p(pquh):
    h = 0.7
    d = pquh(-h).swapped()  # Q + P U_h
    cert = swap_certificate(builtin_certificate_PQUh(-h), -h)
    rep = verify_certificate(cert, d)
    assert rep.accepted, rep.reasons
    assert rep.implied_case == "VI"


def test_diagonal_certificate(diag_element):
    cert = diagonal_certificate(diag_element, "III")
    assert verify_certificate(cert, diag_element).accepted
    g = ExtendedElement(multiplication(constant(2.0, RP)), multiplication(constant(1j, RP)), OscillationSpec(1.0))
    rep = verify_certificate(diagonal_certificate(g, "I"), g)
    assert rep.accepted and rep.implied_case == "I"


def test_wrong_form_rejected():
    with pytest.raises(ValueError):
        Certificate(None, None, None, None, "e5", 1)
