"""Curve model, coefficient class and the oscillating factor.

The closed curve is the unit circle, parametrized by an arc parameter
``s`` in ``(-pi, pi]`` with the oscillation point ``m0`` at ``s = 0``.
Traversal of the punctured curve ``M \\ {m0}`` starts just after ``m0``
(``s -> 0+``), runs through ``s = pi`` and ends just before ``m0``
(``s -> 0-``).  Internally this is the angle ``theta`` in ``(0, 2 pi)``.

Coefficients are required to be constant on the punctured neighbourhood
``0 < |s| < rho_prime``; every primitive in this module is built that way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

TWO_PI = 2.0 * np.pi


class OscillationPointError(ValueError):
    """Raised when a function is evaluated exactly at ``m0``."""


def theta_to_s(theta):
    """Map the traversal angle in ``(0, 2 pi)`` to the arc parameter."""
    theta = np.asarray(theta, dtype=float)
    return np.where(theta <= np.pi, theta, theta - TWO_PI)


def s_to_theta(s):
    s = np.asarray(s, dtype=float)
    return np.where(s > 0, s, s + TWO_PI)


def _check_nonzero(s):
    s = np.asarray(s, dtype=float)
    if np.any(s == 0.0):
        raise OscillationPointError("evaluation at the oscillation point s = 0")
    return s


def smoothstep(x):
    """C^1 ramp from 0 (x <= 0) to 1 (x >= 1)."""
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def flattened_angle(s, rho_prime):
    """Angle that is frozen at ``m0`` and still winds once around the curve.

    Equal to 0 for ``0 < s < rho_prime``, equal to ``2 pi`` for
    ``-rho_prime < s < 0`` and monotone in between, so ``exp(i k psi)`` is
    continuous on the whole curve and constant near ``m0``.
    """
    theta = s_to_theta(_check_nonzero(s))
    span = TWO_PI - 2.0 * rho_prime
    return TWO_PI * smoothstep((theta - rho_prime) / span)


@dataclass(frozen=True)
class OscillationSpec:
    """Shift parameter ``h`` and radius ``rho`` of the neighbourhood O(m0)."""

    h: float
    rho: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.rho < np.pi):
            raise ValueError(f"rho must lie in (0, pi), got {self.rho}")

    @property
    def default_rho_prime(self) -> float:
        return self.rho / 2.0

    def reversed(self) -> "OscillationSpec":
        return OscillationSpec(-self.h, self.rho)


def eval_oscillation(spec: OscillationSpec, s):
    """Value of the oscillating factor ``a_h`` at arc parameter ``s``.

    ``a_h(s) = exp(-i h ln(|s| / rho))`` inside ``|s| < rho`` and 1 outside,
    which makes the factor continuous at the boundary of O(m0).
    """
    s = _check_nonzero(s)
    r = np.abs(s)
    inside = r < spec.rho
    phase = np.where(inside, -spec.h * np.log(np.where(inside, r, spec.rho) / spec.rho), 0.0)
    return np.exp(1j * phase)


def damping(tau: float, rho_prime: float, s):
    """Homotopy damping ``phi_tau``: ``1 - tau (1 - |s|/rho')`` near m0, else 1."""
    r = np.abs(np.asarray(s, dtype=float))
    return np.where(r < rho_prime, 1.0 - tau * (1.0 - r / rho_prime), 1.0)


def _as_complex_array(values, shape):
    out = np.asarray(values, dtype=complex)
    if out.shape != shape:
        out = np.broadcast_to(out, shape).astype(complex)
    return out


@dataclass(frozen=True, eq=False)
class Coefficient:
    """Function on the punctured curve with one-sided limits at ``m0``.

    Parameters
    ----------
    func : callable
        Vectorized map from arc parameter arrays to complex arrays.
    limit_plus, limit_minus : complex
        Declared values as ``s -> 0+`` and ``s -> 0-``.
    rho_prime : float
        The function equals ``limit_plus`` on ``(0, rho_prime)`` and
        ``limit_minus`` on ``(-rho_prime, 0)``.
    """

    func: Callable
    limit_plus: complex
    limit_minus: complex
    rho_prime: float
    label: str = field(default="", compare=False)

    def __call__(self, s):
        s = _check_nonzero(s)
        return _as_complex_array(self.func(s), s.shape)

    @property
    def is_continuous_at_m0(self) -> bool:
        return self.limit_plus == self.limit_minus

    def check_constancy(self) -> float:
        """Largest deviation from the declared limits on the constancy zone."""
        r = self.rho_prime
        s = np.concatenate([np.linspace(r * 1e-6, r * (1 - 1e-9), 41), -np.linspace(r * 1e-6, r * (1 - 1e-9), 41)])
        vals = self(s)
        target = np.where(s > 0, self.limit_plus, self.limit_minus)
        return float(np.max(np.abs(vals - target)))

    def _combine(self, other, op, label):
        if isinstance(other, Coefficient):
            if other.rho_prime != self.rho_prime:
                raise ValueError("coefficients must share rho_prime")
            return Coefficient(
                lambda s, f=self.func, g=other.func: op(f(s), g(s)),
                complex(op(self.limit_plus, other.limit_plus)),
                complex(op(self.limit_minus, other.limit_minus)),
                self.rho_prime,
                label,
            )
        c = complex(other)
        return Coefficient(
            lambda s, f=self.func: op(f(s), c),
            complex(op(self.limit_plus, c)),
            complex(op(self.limit_minus, c)),
            self.rho_prime,
            label,
        )

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y, f"({self.label}+{_label(other)})")

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y, f"({self.label}-{_label(other)})")

    def __rsub__(self, other):
        return self._combine(other, lambda x, y: y - x, f"({_label(other)}-{self.label})")

    def __mul__(self, other):
        return self._combine(other, lambda x, y: x * y, f"{self.label}*{_label(other)}")

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __truediv__(self, other):
        return self._combine(other, lambda x, y: x / y, f"{self.label}/{_label(other)}")


def _label(obj):
    return obj.label if isinstance(obj, Coefficient) else repr(obj)


# -- primitives ---------------------------------------------------------------


def constant(value, rho_prime: float) -> Coefficient:
    v = complex(value)
    return Coefficient(lambda s: np.full(np.shape(s), v, dtype=complex), v, v, rho_prime, f"{v:g}")


def winding_exp(k: int, rho_prime: float) -> Coefficient:
    """``exp(i k psi)`` with the flattened angle ``psi``; winds ``k`` times."""
    k = int(k)
    return Coefficient(
        lambda s: np.exp(1j * k * flattened_angle(s, rho_prime)), 1.0 + 0j, 1.0 + 0j, rho_prime, f"e^(i{k}t)"
    )


def trig_polynomial(coeffs: dict, rho_prime: float) -> Coefficient:
    """Finite sum ``sum_k c_k exp(i k psi)`` in the flattened angle."""
    items = [(int(k), complex(c)) for k, c in coeffs.items()]
    value_at_m0 = complex(sum(c for _, c in items))

    def func(s):
        psi = flattened_angle(s, rho_prime)
        out = np.zeros(np.shape(psi), dtype=complex)
        for k, c in items:
            out += c * np.exp(1j * k * psi)
        return out

    return Coefficient(func, value_at_m0, value_at_m0, rho_prime, "trig")


def step_blend(plus, minus, rho_prime: float) -> Coefficient:
    """Two-sided step: ``plus`` right after m0, ``minus`` right before it.

    The two values are joined by a smooth convex blend along the far arc;
    the caller is responsible for the blend avoiding zero when that matters.
    """
    vp, vm = complex(plus), complex(minus)
    span = TWO_PI - 2.0 * rho_prime

    def func(s):
        w = smoothstep((s_to_theta(s) - rho_prime) / span)
        return (1.0 - w) * vp + w * vm

    return Coefficient(func, vp, vm, rho_prime, f"step({vp:g},{vm:g})")


def helper_p1_q1(spec: OscillationSpec, rho_prime: float | None = None):
    """Coefficients ``(p1, q1)`` of the helper operator ``P1 + Q1 U_{-h}``.

    Inside O(m0) ``p1`` is the indicator of ``s > 0`` and ``q1 = 1 - p1``.
    Outside O(m0) they are ``(1 + g)/2`` and ``(1 - g)/2`` with ``g`` a
    monotone ramp from 1 to -1 along the far arc; there ``a_{-h} = 1`` so
    ``p1 + q1 a_{-h} = 1``.
    """
    rho = spec.rho
    rp = spec.default_rho_prime if rho_prime is None else rho_prime
    span = TWO_PI - 2.0 * rho

    def g(s):
        theta = s_to_theta(s)
        return 1.0 - 2.0 * smoothstep((theta - rho) / span)

    p1 = Coefficient(lambda s: (1.0 + g(s)) / 2.0 + 0j, 1.0 + 0j, 0j, rp, "p1")
    q1 = Coefficient(lambda s: (1.0 - g(s)) / 2.0 + 0j, 0j, 1.0 + 0j, rp, "q1")
    return p1, q1
