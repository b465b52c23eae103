"""Local representatives (symbols) of elements of B and of d = b0 + b1 U_h.

An element ``b = c1 + c2 S`` has

* scalar symbols ``b^{+-}(s) = c1(s) +- c2(s)`` on the two copies of the
  punctured curve,
* four corner values ``b^{+-}(m0 +- 0)``,
* a 2x2 matrix symbol on the real line ``R_{m0}``,
  ``D1 + D2 Sigma(t)`` with ``Di = diag(ci(m0+0), ci(m0-0))``.

Points of the line are handled through ``u = tanh(pi t / 2)``, equivalently
``exp(pi t) = (1 + u) / (1 - u)``, so ``t = +-inf`` is just ``u = +-1`` and
nothing overflows.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from .geometry import Coefficient, OscillationSpec, constant, eval_oscillation

CORNER_KEYS = (("+", "+0"), ("+", "-0"), ("-", "+0"), ("-", "-0"))
FLIP = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def u_from_t(t):
    return np.tanh(np.pi * np.asarray(t, dtype=float) / 2.0)


def t_from_u(u):
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(u) >= 1.0, np.sign(u) * np.inf, 2.0 / np.pi * np.arctanh(np.clip(u, -1, 1)))


def _tanh_sech(t):
    u = u_from_t(t)
    d = 1.0 + u * u
    return 2.0 * u / d, (1.0 - u * u) / d


def s_symbol(t):
    """Matrix symbol of the singular integral operator S at ``t``.

    ``[[tanh(pi t), i sech(pi t)], [-i sech(pi t), -tanh(pi t)]]``; accepts
    arrays and ``+-inf``.
    """
    th, sh = _tanh_sech(t)
    out = np.empty(np.shape(th) + (2, 2), dtype=complex)
    out[..., 0, 0] = th
    out[..., 0, 1] = 1j * sh
    out[..., 1, 0] = -1j * sh
    out[..., 1, 1] = -th
    return out


def p_symbol(t):
    """Matrix symbol ``A(t) = (I + Sigma(t)) / 2`` of ``P = (I + S) / 2``."""
    return 0.5 * (np.eye(2) + s_symbol(t))


def _diag(a, b):
    return np.array([[a, 0], [0, b]], dtype=complex)


def is_diagonal(m, tol=1e-12):
    return abs(m[0, 1]) <= tol and abs(m[1, 0]) <= tol


def is_skew(m, tol=1e-12):
    return abs(m[0, 0]) <= tol and abs(m[1, 1]) <= tol


class ElementB:
    """Element of the algebra B, known through its symbols.

    Subclasses implement ``plus``, ``minus``, ``corner`` and
    ``matrix_symbol``.  Sums, products and scalar multiples stay inside B
    and are formed with ``+``, ``*`` (the symbol map is multiplicative).
    """

    rho_prime: float
    label: str = ""

    def plus(self, s):
        raise NotImplementedError

    def minus(self, s):
        raise NotImplementedError

    def corner(self, component: str, side: str) -> complex:
        raise NotImplementedError

    def matrix_symbol(self, t):
        raise NotImplementedError

    def det_symbol(self, t):
        return np.linalg.det(self.matrix_symbol(t))

    def det_quadratics(self):
        """Quadratics in ``tau = tanh(pi t)`` whose product is det, or None."""
        return None

    def limit_matrix(self, sign: int):
        """Diagonal limit of the matrix symbol at ``+inf`` (1) or ``-inf`` (-1)."""
        if sign > 0:
            return _diag(self.corner("+", "+0"), self.corner("-", "-0"))
        return _diag(self.corner("-", "+0"), self.corner("+", "-0"))

    def corners(self) -> dict:
        return {key: self.corner(*key) for key in CORNER_KEYS}

    def __mul__(self, other):
        if isinstance(other, ElementB):
            return ProductB([self, other])
        return ProductB([self, scalar_element(other, self.rho_prime)])

    def __rmul__(self, other):
        return ProductB([scalar_element(other, self.rho_prime), self])

    def __add__(self, other):
        if isinstance(other, ElementB):
            return SumB([self, other])
        return SumB([self, scalar_element(other, self.rho_prime)])

    __radd__ = __add__

    def scaled(self, lam) -> "ElementB":
        return lam * self

    def __repr__(self):
        return f"{type(self).__name__}({self.label})"


class Generator(ElementB):
    """The basic element ``c1 + c2 S``."""

    def __init__(self, c1: Coefficient, c2: Coefficient, label: str = ""):
        if c1.rho_prime != c2.rho_prime:
            raise ValueError("c1 and c2 must share rho_prime")
        self.c1, self.c2 = c1, c2
        self.rho_prime = c1.rho_prime
        self.label = label or f"{c1.label}+{c2.label}S"

    def plus(self, s):
        return self.c1(s) + self.c2(s)

    def minus(self, s):
        return self.c1(s) - self.c2(s)

    def corner(self, component, side):
        c1 = self.c1.limit_plus if side == "+0" else self.c1.limit_minus
        c2 = self.c2.limit_plus if side == "+0" else self.c2.limit_minus
        return complex(c1 + c2 if component == "+" else c1 - c2)

    def matrix_symbol(self, t):
        d1 = _diag(self.c1.limit_plus, self.c1.limit_minus)
        d2 = _diag(self.c2.limit_plus, self.c2.limit_minus)
        return d1 + d2 @ s_symbol(t)

    def det_quadratic(self) -> np.ndarray:
        """Coefficients (highest power first) of det as a polynomial in tau.

        ``(a1 + a2 tau)(b1 - b2 tau) - a2 b2 (1 - tau^2)`` where ``a`` are the
        limits at ``m0 + 0`` and ``b`` those at ``m0 - 0``.  The quadratic
        terms cancel, so the result is affine in ``tau``.
        """
        a1, a2 = self.c1.limit_plus, self.c2.limit_plus
        b1, b2 = self.c1.limit_minus, self.c2.limit_minus
        return np.array([0.0, a2 * b1 - a1 * b2, a1 * b1 - a2 * b2], dtype=complex)

    def det_quadratics(self):
        return [self.det_quadratic()]

    def det_symbol(self, t):
        tau, _ = _tanh_sech(t)
        return np.polyval(self.det_quadratic(), tau)

    def scaled(self, lam):
        return Generator(self.c1 * lam, self.c2 * lam, f"{lam}*({self.label})")


class ProductB(ElementB):
    def __init__(self, factors: Sequence[ElementB]):
        flat = []
        for f in factors:
            flat.extend(f.factors if isinstance(f, ProductB) else [f])
        _check_rho(flat)
        self.factors = flat
        self.rho_prime = flat[0].rho_prime
        self.label = "*".join(f"({f.label})" for f in flat)

    def plus(self, s):
        return reduce(lambda x, y: x * y, (f.plus(s) for f in self.factors))

    def minus(self, s):
        return reduce(lambda x, y: x * y, (f.minus(s) for f in self.factors))

    def corner(self, component, side):
        return complex(np.prod([f.corner(component, side) for f in self.factors]))

    def matrix_symbol(self, t):
        return reduce(lambda x, y: x @ y, (f.matrix_symbol(t) for f in self.factors))

    def det_symbol(self, t):
        return reduce(lambda x, y: x * y, (f.det_symbol(t) for f in self.factors))

    def det_quadratics(self):
        parts = [f.det_quadratics() for f in self.factors]
        if any(p is None for p in parts):
            return None
        return [q for p in parts for q in p]


class SumB(ElementB):
    def __init__(self, terms: Sequence[ElementB]):
        _check_rho(terms)
        self.terms = list(terms)
        self.rho_prime = self.terms[0].rho_prime
        self.label = "+".join(f"({t.label})" for t in self.terms)

    def plus(self, s):
        return sum(t.plus(s) for t in self.terms)

    def minus(self, s):
        return sum(t.minus(s) for t in self.terms)

    def corner(self, component, side):
        return complex(sum(t.corner(component, side) for t in self.terms))

    def matrix_symbol(self, t):
        return sum(term.matrix_symbol(t) for term in self.terms)


def _check_rho(elements):
    rps = {e.rho_prime for e in elements}
    if len(rps) != 1:
        raise ValueError(f"elements must share rho_prime, got {sorted(rps)}")


def scalar_element(value, rho_prime) -> Generator:
    return Generator(constant(value, rho_prime), constant(0.0, rho_prime), f"{complex(value):g}")


def multiplication(c: Coefficient) -> Generator:
    return Generator(c, constant(0.0, c.rho_prime), c.label)


def identity(rho_prime) -> Generator:
    return Generator(constant(1.0, rho_prime), constant(0.0, rho_prime), "I")


def singular(rho_prime) -> Generator:
    return Generator(constant(0.0, rho_prime), constant(1.0, rho_prime), "S")


def projection_p(rho_prime) -> Generator:
    return Generator(constant(0.5, rho_prime), constant(0.5, rho_prime), "P")


def projection_q(rho_prime) -> Generator:
    return Generator(constant(0.5, rho_prime), constant(-0.5, rho_prime), "Q")


def riesz_combination(a: Coefficient, b: Coefficient) -> Generator:
    """The element ``a P + b Q`` written as ``c1 + c2 S``."""
    return Generator((a + b) * 0.5, (a - b) * 0.5, f"{a.label}P+{b.label}Q")


def scalar_symbols(e: ElementB):
    """Return the pair of callables ``(b^+, b^-)``."""
    return e.plus, e.minus


def matrix_symbol(e: ElementB) -> Callable:
    return e.matrix_symbol


# -- extended elements ---------------------------------------------------------


@dataclass(frozen=True)
class CornerData:
    """Corner operators ``a + b T_h`` keyed by (component, side)."""

    pairs: dict

    def __getitem__(self, key):
        return self.pairs[key]

    def moduli(self):
        return {k: (abs(a), abs(b)) for k, (a, b) in self.pairs.items()}

    def scaled(self, lam) -> "CornerData":
        return CornerData({k: (lam * a, lam * b) for k, (a, b) in self.pairs.items()})

    def swapped(self) -> "CornerData":
        return CornerData({k: (b, a) for k, (a, b) in self.pairs.items()})

    def as_table(self):
        rows = []
        for comp, side in CORNER_KEYS:
            a, b = self.pairs[(comp, side)]
            rows.append({"component": comp, "side": side, "a": _cjson(a), "b": _cjson(b), "|a|": abs(a), "|b|": abs(b)})
        return rows


def _cjson(z):
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class MatrixSymbolPair:
    """``d(m0) = B0(t) + B1(t) T_h`` with explicit limits at ``+-inf``."""

    B0: Callable
    B1: Callable
    B0_plus_inf: np.ndarray
    B0_minus_inf: np.ndarray
    B1_plus_inf: np.ndarray
    B1_minus_inf: np.ndarray

    def limits(self, sign: int):
        if sign > 0:
            return self.B0_plus_inf, self.B1_plus_inf
        return self.B0_minus_inf, self.B1_minus_inf


@dataclass(frozen=True)
class ExtendedElement:
    """The operator ``d = b0 + b1 U_h``."""

    b0: ElementB
    b1: ElementB
    osc: OscillationSpec
    label: str = ""

    def __post_init__(self):
        _check_rho([self.b0, self.b1])
        if self.rho_prime > self.osc.rho:
            raise ValueError("rho_prime must not exceed rho")

    @property
    def rho_prime(self) -> float:
        return self.b0.rho_prime

    @property
    def h(self) -> float:
        return self.osc.h

    def swapped(self) -> "ExtendedElement":
        """``d U_h^{-1} = b1 + b0 U_{-h}``, which has the same index."""
        return ExtendedElement(self.b1, self.b0, self.osc.reversed(), f"swap({self.label})")

    def scaled(self, lam) -> "ExtendedElement":
        return ExtendedElement(self.b0.scaled(lam), self.b1.scaled(lam), self.osc, f"{lam}*({self.label})")

    def left_multiplied(self, x: ElementB) -> "ExtendedElement":
        return ExtendedElement(x * self.b0, x * self.b1, self.osc, f"({x.label})({self.label})")

    def plus(self, s):
        return self.b0.plus(s) + self.b1.plus(s) * eval_oscillation(self.osc, s)

    def minus(self, s):
        return self.b0.minus(s) + self.b1.minus(s) * eval_oscillation(self.osc, s)

    def corner_data(self) -> CornerData:
        return CornerData({k: (self.b0.corner(*k), self.b1.corner(*k)) for k in CORNER_KEYS})

    def symbol_pair(self) -> MatrixSymbolPair:
        return MatrixSymbolPair(
            self.b0.matrix_symbol,
            self.b1.matrix_symbol,
            self.b0.limit_matrix(1),
            self.b0.limit_matrix(-1),
            self.b1.limit_matrix(1),
            self.b1.limit_matrix(-1),
        )


@dataclass(frozen=True)
class ExtendedSymbol:
    pair: MatrixSymbolPair
    corners: CornerData
    plus: Callable
    minus: Callable


def extended_symbol(d: ExtendedElement) -> ExtendedSymbol:
    """Full symbol package of ``d``: matrix pair, corners and scalar symbols."""
    return ExtendedSymbol(d.symbol_pair(), d.corner_data(), d.plus, d.minus)
