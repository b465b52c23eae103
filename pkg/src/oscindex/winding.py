"""Argument increments of sampled nonvanishing curves.

Every increment is a sum of principal arguments of consecutive ratios
``z[k+1] / z[k]``.  Intervals whose step exceeds ``max_step`` are bisected
until all steps are small, so the sum equals the continuous increment for
any curve that is resolved by the refinement.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import OscillationSpec, damping, eval_oscillation
from .symbols import t_from_u

DEFAULT_MAX_STEP = np.pi / 8
MAX_SAMPLES = 2**20


class CurveTouchesZero(ArithmeticError):
    def __init__(self, location, value):
        super().__init__(f"curve touches zero at parameter {location:.6g} (|z| = {abs(value):.3g})")
        self.location = location


class RefinementError(RuntimeError):
    pass


@dataclass
class CurveSegment:
    """A sampled curve ``sampler(x)`` for ``x`` in ``[start, stop]``.

    ``start_value`` / ``stop_value`` replace the sampler at the endpoints
    when given (used for limits that the sampler cannot evaluate).
    """

    sampler: Callable
    start: float
    stop: float
    label: str = ""
    policy: str = "uniform"
    start_value: complex | None = None
    stop_value: complex | None = None
    error_bound: float = 0.0
    samples: np.ndarray | None = field(default=None, repr=False)
    values: np.ndarray | None = field(default=None, repr=False)


def _refine(f, x, z, max_step, floor, max_samples):
    while True:
        steps = np.angle(z[1:] / z[:-1])
        bad = np.nonzero(np.abs(steps) > max_step)[0]
        if bad.size == 0:
            return x, z, steps
        if x.size + bad.size > max_samples:
            raise RefinementError(f"refinement exceeded {max_samples} samples")
        mid = 0.5 * (x[bad] + x[bad + 1])
        zm = np.asarray(f(mid), dtype=complex)
        _check_floor(mid, zm, floor)
        x = np.insert(x, bad + 1, mid)
        z = np.insert(z, bad + 1, zm)


def _check_floor(x, z, floor):
    small = np.abs(z) < floor
    if np.any(small):
        k = int(np.argmax(small))
        raise CurveTouchesZero(float(np.atleast_1d(x)[k]), complex(np.atleast_1d(z)[k]))


def sample_curve(seg: CurveSegment, *, n_init=257, max_step=DEFAULT_MAX_STEP, floor=1e-12, max_samples=MAX_SAMPLES):
    """Refined samples ``(x, z)`` of a segment, endpoints overridden."""
    x = np.linspace(seg.start, seg.stop, n_init)
    z = np.empty(n_init, dtype=complex)
    inner = slice(1 if seg.start_value is not None else 0, n_init - 1 if seg.stop_value is not None else n_init)
    z[inner] = seg.sampler(x[inner])
    if seg.start_value is not None:
        z[0] = seg.start_value
    if seg.stop_value is not None:
        z[-1] = seg.stop_value

    def f(xx):
        return np.asarray(seg.sampler(xx), dtype=complex)

    _check_floor(x, z, floor)
    x, z, steps = _refine(f, x, z, max_step, floor, max_samples)
    return x, z, steps


def arg_increment(seg: CurveSegment, tol: float = DEFAULT_MAX_STEP, **kw) -> float:
    """Continuous increase of ``arg z`` along the segment.

    ``tol`` is the largest admissible angular step between neighbouring
    samples (always capped at ``pi / 2``).
    """
    x, z, steps = sample_curve(seg, max_step=min(tol, np.pi / 2), **kw)
    seg.samples, seg.values = x, z
    return float(np.sum(steps))


def arg_increment_func(f, a, b, tol=DEFAULT_MAX_STEP, **kw) -> float:
    return arg_increment(CurveSegment(f, a, b), tol, **kw)


def arg_increment_line(f: Callable, tol: float = DEFAULT_MAX_STEP, *, floor=1e-12, **kw) -> float:
    """Increment of ``arg f(u)`` from ``u = -1`` (``t = -inf``) to ``u = 1``.

    ``f`` is a function of the compactified coordinate ``u`` and must be
    defined (as the limit) at ``u = +-1``.
    """
    ends = np.asarray(f(np.array([-1.0, 1.0])), dtype=complex)
    if np.any(np.abs(ends) < floor):
        raise CurveTouchesZero(-1.0 if abs(ends[0]) < floor else 1.0, ends[np.argmin(np.abs(ends))])
    return arg_increment(CurveSegment(f, -1.0, 1.0, policy="compactified-u"), tol, floor=floor, **kw)


def line_sampler(g: Callable) -> Callable:
    """Turn a function of ``t`` (accepting ``+-inf``) into one of ``u``."""
    return lambda u: g(t_from_u(u))


# -- oscillatory pieces near m0 ---------------------------------------------------


class UndampedOscillation(RefinementError):
    pass


class CasePreconditionError(ValueError):
    pass


def oscillatory_segment(
    b0_corner: complex,
    b1_corner: complex,
    osc: OscillationSpec,
    rho_prime: float,
    side: str,
    *,
    tau: float = 1.0,
    eps: float = 1e-3,
) -> CurveSegment:
    """Core factor ``b0 + phi_tau(s) b1 a_h(s)`` on one side of ``m0``.

    The segment is parametrized by ``x = ln |s|`` and runs from the cutoff
    ``s*`` (where ``|phi b1 / b0| < eps``) to ``|s| = rho_prime``.  Below
    the cutoff the curve stays in the disc of radius ``eps |b0|`` around
    ``b0``, so the missing increment is at most ``arcsin(eps)``; it is
    recovered exactly by starting the segment at the limit value ``b0``.
    For ``side == '-'`` the orientation is reversed (from ``-rho_prime``
    towards ``m0``), matching the traversal of the curve.
    """
    b0, b1 = complex(b0_corner), complex(b1_corner)
    if abs(b1) >= abs(b0):
        raise CasePreconditionError("case precondition: |b0| must exceed |b1| on the damped side")
    sign = 1.0 if side == "+" else -1.0

    def value(x):
        s = sign * np.exp(x)
        return b0 + damping(tau, rho_prime, s) * b1 * eval_oscillation(osc, s)

    if b1 == 0 or osc.h == 0:
        lo = np.log(rho_prime) - 1.0
    else:
        # phi_tau(s) >= 1 - tau, so the cutoff exists only for tau = 1 up to eps
        floor_amp = (1.0 - tau) * abs(b1 / b0)
        if floor_amp >= eps:
            raise UndampedOscillation("undamped oscillation: |phi b1 / b0| never drops below eps")
        r_star = rho_prime * (eps - floor_amp) / (tau * abs(b1 / b0))
        lo = np.log(min(r_star, rho_prime))
    hi = np.log(rho_prime)
    bound = float(np.arcsin(eps))
    if side == "+":
        return CurveSegment(value, lo, hi, "near m0+0", "log", start_value=b0, error_bound=bound)
    # reversed orientation: parameter y = -x runs from -hi to -lo
    return CurveSegment(lambda y: value(-y), -hi, -lo, "near m0-0", "log", stop_value=b0, error_bound=bound)


# -- dumps --------------------------------------------------------------------------


def dump_segment_csv(seg: CurveSegment, path, **kw):
    """Write refined samples with the running argument to ``path``."""
    x, z, steps = sample_curve(seg, **kw)
    cum = np.concatenate([[0.0], np.cumsum(steps)])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["parameter", "re", "im", "cumulative_arg"])
        for xi, zi, ci in zip(x, z, cum):
            w.writerow([repr(float(xi)), repr(float(zi.real)), repr(float(zi.imag)), repr(float(ci))])
    return len(x)
