"""Grid evaluation of ``B0(t) f(t) + B1(t) f(t + h)`` for vector functions on the line.

The grid step is ``|h| / q`` so the shift is an exact translation by ``q``
slots and no interpolation ever happens; closed-form operator identities
can then be checked to rounding level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .symbols import p_symbol


class SupportError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on ``[-T, T]`` with step ``|h| / q``."""

    T: float
    q: int
    h: float

    def __post_init__(self):
        if self.h == 0 or self.q < 1:
            raise ValueError("grid needs h != 0 and q >= 1")

    @property
    def delta(self) -> float:
        return abs(self.h) / self.q

    @property
    def t(self) -> np.ndarray:
        n = int(np.floor(2.0 * self.T / self.delta + 1e-9)) + 1
        return -self.T + self.delta * np.arange(n)

    def slots(self, shift: float) -> int:
        k = shift / self.delta
        if abs(k - round(k)) > 1e-9:
            raise ValueError(f"shift {shift} is not a multiple of the grid step {self.delta}")
        return int(round(k))


@dataclass(frozen=True)
class Factor:
    """The operator ``B0 + B1 T_shift``; ``B1 = None`` means a plain multiplication."""

    B0: Callable
    B1: Callable | None = None
    shift: float = 0.0


def _shifted(f, k):
    out = np.zeros_like(f)
    if k > 0:
        out[:-k] = f[k:]
    elif k < 0:
        out[-k:] = f[:k]
    else:
        out[:] = f
    return out


def apply(B0, B1, h, f, grid: GridSpec):
    """``B0(t) f(t) + B1(t) f(t + h)`` on the grid; ``f`` has shape ``(n, 2)``.

    ``f`` must vanish on the grid points within ``|h|`` of the window ends,
    so that values shifted in from outside the window are genuinely zero.
    """
    t = grid.t
    f = np.asarray(f, dtype=complex)
    if f.shape != (t.size, 2):
        raise ValueError(f"grid function must have shape {(t.size, 2)}, got {f.shape}")
    out = np.einsum("nij,nj->ni", B0(t), f)
    if B1 is None:
        return out
    k = grid.slots(h)
    if k:
        edge = np.abs(t) > grid.T - abs(h) + 1e-12
        if np.any(f[edge] != 0):
            raise SupportError("support violation: f must vanish within |h| of the window ends")
    return out + np.einsum("nij,nj->ni", B1(t), _shifted(f, k))


def apply_chain(chain: Sequence[Factor], f, grid: GridSpec):
    """Apply ``chain[0] o chain[1] o ...`` (rightmost factor first)."""
    for fac in reversed(chain):
        f = apply(fac.B0, fac.B1, fac.shift, f, grid)
    return f


def reach(chain: Sequence[Factor]) -> float:
    return float(sum(abs(fac.shift) for fac in chain if fac.B1 is not None))


def bump_family(grid: GridSpec, n_funcs: int = 8, margin: float = 0.0, seed: int = 0, degree: int = 3):
    """Smooth compactly supported bumps with random complex polynomial modulation.

    Supports lie inside ``[-T + margin, T - margin]``; each function is
    scaled to unit sup-norm.
    """
    rng = np.random.default_rng(seed)
    t = grid.t
    lo, hi = -grid.T + margin + grid.delta, grid.T - margin - grid.delta
    if hi <= lo:
        raise SupportError("window too small for the requested margin")
    funcs = []
    for _ in range(n_funcs):
        a, b = np.sort(rng.uniform(lo, hi, 2))
        if b - a < max(0.1 * (hi - lo), 4 * grid.delta):
            a, b = lo, hi
        c, w = 0.5 * (a + b), 0.5 * (b - a)
        x = (t - c) / w
        bump = np.zeros_like(t)
        inside = np.abs(x) < 1
        bump[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
        coeffs = rng.normal(size=(degree + 1, 2)) + 1j * rng.normal(size=(degree + 1, 2))
        poly = np.stack([np.polyval(coeffs[:, k], x) for k in range(2)], axis=-1)
        f = bump[:, None] * poly
        funcs.append(f / np.abs(f).max())
    return funcs


def residual_identity(lhs: Sequence[Factor], rhs: Sequence[Factor], grid: GridSpec, n_funcs: int = 8, seed: int = 0):
    """Sup-norm of ``lhs f - rhs f`` over the seeded test family."""
    margin = max(reach(lhs), reach(rhs)) + grid.delta
    worst = 0.0
    for f in bump_family(grid, n_funcs, margin, seed):
        diff = apply_chain(lhs, f, grid) - apply_chain(rhs, f, grid)
        worst = max(worst, float(np.abs(diff).max()))
    return worst


# -- closed-form data for P + Q U_h -------------------------------------------------------


def _exp(x):
    return np.exp(np.asarray(x, dtype=float))


def identity_matrix(t):
    return np.broadcast_to(np.eye(2, dtype=complex), np.shape(t) + (2, 2)).copy()


def q_symbol(t):
    return np.eye(2) - p_symbol(t)


def printed_inverse(t, h):
    """The two coefficients of the printed inverse ``R0 + R1 T_{-h}`` of ``A + (I - A) T_h``."""
    t = np.asarray(t, dtype=float)
    E1, E2, H = _exp(np.pi * t), _exp(2 * np.pi * t), _exp(np.pi * h)
    den = H + E2
    R0 = np.empty(t.shape + (2, 2), dtype=complex)
    R1 = np.empty_like(R0)
    R0[..., 0, 0], R0[..., 0, 1] = E2, 1j * E1
    R0[..., 1, 0], R0[..., 1, 1] = -1j * E1 * H, H
    R1[..., 0, 0], R1[..., 0, 1] = H, -1j * E1
    R1[..., 1, 0], R1[..., 1, 1] = 1j * E1 * H, E2
    return R0 / den[..., None, None], R1 / den[..., None, None]


def pquh_factor(h) -> Factor:
    return Factor(p_symbol, q_symbol, h)


def printed_inverse_factor(h) -> Factor:
    return Factor(lambda t: printed_inverse(t, h)[0], lambda t: printed_inverse(t, h)[1], -h)


def pquh_helper_det(t, h):
    """``det(A(t) + Q(t) Q(t + h))`` computed from the matrix symbols."""
    t = np.asarray(t, dtype=float)
    return np.linalg.det(p_symbol(t) + q_symbol(t) @ q_symbol(t + h))


def pquh_helper_det_closed(t, h):
    """The closed form ``(1 + e^{pi h + 2 pi t})^2 / ((1 + e^{2 pi t})(1 + e^{2 pi h + 2 pi t}))``."""
    t = np.asarray(t, dtype=float)
    H = np.exp(np.pi * h)
    # with x = e^{2 pi t}; for t > 0 numerator and denominator are divided by x^2
    x = _exp(-2 * np.pi * np.abs(t))
    small = (1 + H * x) ** 2 / ((1 + x) * (1 + H * H * x))
    large = (x + H) ** 2 / ((x + 1) * (x + H * H))
    return np.where(t > 0, large, small)


def block_factors(h):
    """``E + F T_h`` and ``E + F T_{-h}`` with ``E = diag(1, 0)``, ``F = diag(0, 1)``."""
    E = np.diag([1.0, 0.0]).astype(complex)
    F = np.diag([0.0, 1.0]).astype(complex)

    def const(m):
        return lambda t: np.broadcast_to(m, np.shape(t) + (2, 2)).copy()

    return Factor(const(E), const(F), h), Factor(const(E), const(F), -h)


def certificate_chain(cert, h):
    """``(w1^{-1}, A + (I-A) T_h, s1)`` and ``e0 + e1 T_h`` as factor chains."""

    def diag_of(f):
        def g(t):
            d = f(t)
            out = np.zeros(np.shape(t) + (2, 2), dtype=complex)
            out[..., 0, 0], out[..., 1, 1] = d[..., 0], d[..., 1]
            return out

        return g

    lhs = [Factor(lambda t: np.linalg.inv(cert.w1(t))), pquh_factor(h), Factor(cert.s1)]
    rhs = [Factor(diag_of(cert.e0), diag_of(cert.e1), h)]
    return lhs, rhs


def factorization_chain(cert, d):
    """``(w1^{-1}, B0 + B1 T_h, s1)`` and ``e0 + e1 T_h`` for a general element ``d``."""

    def diag_of(f):
        def g(t):
            v = f(t)
            out = np.zeros(np.shape(t) + (2, 2), dtype=complex)
            out[..., 0, 0], out[..., 1, 1] = v[..., 0], v[..., 1]
            return out

        return g

    lhs = [Factor(lambda t: np.linalg.inv(cert.w1(t))), Factor(d.b0.matrix_symbol, d.b1.matrix_symbol, d.h), Factor(cert.s1)]
    rhs = [Factor(diag_of(cert.e0), diag_of(cert.e1), d.h)]
    return lhs, rhs
