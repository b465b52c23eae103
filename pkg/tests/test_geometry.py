import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscindex.geometry import (
    OscillationPointError,
    OscillationSpec,
    constant,
    damping,
    eval_oscillation,
    flattened_angle,
    helper_p1_q1,
    s_to_theta,
    step_blend,
    theta_to_s,
    trig_polynomial,
    winding_exp,
)


def test_oscillation_boundary_value():
    assert eval_oscillation(OscillationSpec(2.0, 0.5), 0.5) == pytest.approx(1.0)


def test_oscillation_half_turn():
    s = 0.5 * np.exp(-np.pi / 2)
    assert eval_oscillation(OscillationSpec(2.0, 0.5), s) == pytest.approx(-1.0, abs=1e-14)


def test_oscillation_outside_neighbourhood_is_one():
    s = np.array([1.0, 2.0, -3.0])
    np.testing.assert_allclose(eval_oscillation(OscillationSpec(1.7, 1.0), s), 1.0)


@settings(max_examples=50, deadline=None)
@given(
    h=st.floats(-5, 5, allow_nan=False),
    s=st.floats(1e-9, np.pi, allow_nan=False),
    sign=st.sampled_from([-1.0, 1.0]),
)
def test_oscillation_unimodular(h, s, sign):
    assert abs(abs(eval_oscillation(OscillationSpec(h, 1.0), sign * s)) - 1.0) < 1e-12


def test_oscillation_rejects_m0():
    with pytest.raises(OscillationPointError):
        eval_oscillation(OscillationSpec(1.0), 0.0)


def test_rho_range():
    with pytest.raises(ValueError):
        OscillationSpec(1.0, 4.0)


def test_damping_values():
    assert damping(0.0, 0.3, 0.01) == 1.0
    assert damping(1.0, 0.3, 1e-12) == pytest.approx(0.0, abs=1e-10)
    assert damping(1.0, 0.2, 0.1) == pytest.approx(0.5)
    assert damping(1.0, 0.2, -0.5) == 1.0


def test_helper_coefficients():
    spec = OscillationSpec(1.0, 1.0)
    rp = 0.5
    p1, q1 = helper_p1_q1(spec, rp)
    assert p1(rp / 2) == pytest.approx(1.0) and q1(rp / 2) == pytest.approx(0.0)
    assert p1(-rp / 2) == pytest.approx(0.0) and q1(-rp / 2) == pytest.approx(1.0)
    s = theta_to_s(np.linspace(1.01, 2 * np.pi - 1.01, 101))
    back = eval_oscillation(spec.reversed(), s)
    np.testing.assert_allclose(p1(s) + q1(s) * back, 1.0, atol=1e-14)


def test_angle_maps_roundtrip():
    th = np.linspace(0.01, 2 * np.pi - 0.01, 50)
    np.testing.assert_allclose(s_to_theta(theta_to_s(th)), th)


def test_flattened_angle_frozen_near_m0():
    rp = 0.4
    assert flattened_angle(0.1, rp) == 0.0
    assert flattened_angle(-0.1, rp) == pytest.approx(2 * np.pi)
    th = np.linspace(rp, 2 * np.pi - rp, 200)
    assert np.all(np.diff(flattened_angle(theta_to_s(th), rp)) >= 0)


def test_primitives_are_constant_near_m0():
    rp = 0.3
    for c in (constant(2 - 1j, rp), winding_exp(3, rp), trig_polynomial({-1: 1, 2: 0.5j}, rp), step_blend(1, 0.25, rp)):
        assert c.check_constancy() < 1e-14


def test_step_blend_limits_and_arithmetic():
    rp = 0.5
    g = step_blend(1.0, 0.25, rp) * 2 + constant(1j, rp)
    assert g.limit_plus == 2 + 1j and g.limit_minus == 0.5 + 1j
    assert g(0.1) == pytest.approx(2 + 1j)
