import numpy as np
import pytest

from oscindex.geometry import OscillationSpec
from oscindex.opnum import pquh_helper_det_closed
from oscindex.symbols import singular, t_from_u
from oscindex.winding import (
    CurveSegment,
    CurveTouchesZero,
    UndampedOscillation,
    arg_increment,
    arg_increment_line,
    oscillatory_segment,
)

TWO_PI = 2 * np.pi


@pytest.mark.parametrize("n", range(-3, 4))
def test_exact_winding(n):
    seg = CurveSegment(lambda th: np.exp(1j * n * th), 0.0, TWO_PI)
    assert arg_increment(seg) == pytest.approx(TWO_PI * n, abs=1e-12)


def test_constant_and_shifted_circle():
    assert arg_increment(CurveSegment(lambda th: np.full_like(th, 3 - 1j, dtype=complex), 0, TWO_PI)) == 0
    assert arg_increment(CurveSegment(lambda th: 2 + np.exp(1j * th), 0, TWO_PI)) == pytest.approx(0, abs=1e-12)


def test_refinement_resolves_fast_winding():
    # 257 initial samples leave steps of about 1 rad, above the pi/8 cap
    seg = CurveSegment(lambda th: np.exp(40j * th), 0.0, TWO_PI)
    assert arg_increment(seg) == pytest.approx(80 * np.pi)
    assert seg.samples.size > 257


def test_touching_zero_raises():
    with pytest.raises(CurveTouchesZero):
        arg_increment(CurveSegment(lambda th: np.exp(1j * th) - 1, 0.0, TWO_PI))


def test_line_increments():
    assert arg_increment_line(lambda u: singular(0.5).det_symbol(t_from_u(u))) == 0
    assert arg_increment_line(lambda u: pquh_helper_det_closed(t_from_u(u), 0.0) + 0j) == pytest.approx(0, abs=1e-15)
    assert arg_increment_line(lambda u: u + 2 + 0j) == 0


def test_damped_segment_stays_near_dominant_term():
    seg = oscillatory_segment(2, 1, OscillationSpec(1.0), 0.5, "+")
    inc = arg_increment(seg)
    assert abs(inc) < np.pi / 2
    assert np.all(np.abs(seg.values - 2) <= 1 + 1e-12)


def test_zero_subdominant_term():
    assert arg_increment(oscillatory_segment(2, 0, OscillationSpec(1.0), 0.5, "-")) == 0


def test_undamped_oscillation_rejected():
    with pytest.raises(UndampedOscillation, match="undamped oscillation"):
        oscillatory_segment(2, 1, OscillationSpec(1.0), 0.5, "+", tau=0.0)
