"""Fredholm criteria, corner case classification and a finite-section probe."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from .geometry import TWO_PI, theta_to_s
from .symbols import CORNER_KEYS, CornerData, ElementB, MatrixSymbolPair, t_from_u

DEFAULT_MARGIN = 1e-6


class CaseTag(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"
    MIXED = "Mixed"
    INDETERMINATE = "Indeterminate"

    @property
    def is_admissible(self) -> bool:
        return self not in (CaseTag.MIXED, CaseTag.INDETERMINATE)

    def swapped(self) -> "CaseTag":
        """Tag of ``d U_h^{-1}`` (roles of b0 and b1 exchanged)."""
        return _SWAP.get(self, self)


_SWAP = {
    CaseTag.I: CaseTag.II,
    CaseTag.II: CaseTag.I,
    CaseTag.III: CaseTag.IV,
    CaseTag.IV: CaseTag.III,
    CaseTag.V: CaseTag.VI,
    CaseTag.VI: CaseTag.V,
}


class Overall(str, enum.Enum):
    FREDHOLM = "Fredholm"
    NOT_FREDHOLM = "NotFredholm"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class FredholmVerdict:
    scalar_ok: bool
    corner_ok: bool
    line_ok: bool
    limits_ok: bool
    overall: Overall
    reasons: list = field(default_factory=list)
    probe: "ProbeResult | None" = None
    min_scalar: float | None = None

    def to_dict(self):
        out = {
            "overall": self.overall.value,
            "scalar_ok": self.scalar_ok,
            "corner_ok": self.corner_ok,
            "line_ok": self.line_ok,
            "limits_ok": self.limits_ok,
            "reasons": list(self.reasons),
        }
        if self.min_scalar is not None:
            out["min_scalar_modulus"] = self.min_scalar
        if self.probe is not None:
            out["probe"] = self.probe.to_dict()
        return out


def compare(a, b, margin=DEFAULT_MARGIN) -> str:
    """``'>'`` if ``|a| > |b|(1+margin)``, ``'<'`` if ``|a|(1+margin) < |b|``, else ``'='``."""
    ma, mb = abs(a), abs(b)
    if ma > mb * (1.0 + margin):
        return ">"
    if ma * (1.0 + margin) < mb:
        return "<"
    return "="


def classify_case(corners: CornerData, margin: float = DEFAULT_MARGIN) -> CaseTag:
    """Map the four corner comparisons ``|b0| vs |b1|`` to a case tag."""
    cmp = {k: compare(*corners[k], margin) for k in CORNER_KEYS}
    if "=" in cmp.values():
        return CaseTag.INDETERMINATE
    pp, pm, mp, mm = (cmp[k] for k in CORNER_KEYS)  # (+,+0) (+,-0) (-,+0) (-,-0)
    if pp == pm == mp == mm == ">":
        return CaseTag.I
    if pp == pm == mp == mm == "<":
        return CaseTag.II
    if pp == mp == ">" and pm == mm == "<":
        return CaseTag.III
    if pp == mp == "<" and pm == mm == ">":
        return CaseTag.IV
    if pp == pm == ">" and mp == mm == "<":
        return CaseTag.V
    if pp == pm == "<" and mp == mm == ">":
        return CaseTag.VI
    return CaseTag.MIXED


def corner_invertibility(corners: CornerData, margin: float = DEFAULT_MARGIN) -> dict:
    """Whether each corner operator ``a + b T_h`` is invertible (``|a| != |b|``)."""
    return {k: compare(*corners[k], margin) != "=" for k in CORNER_KEYS}


# -- conditions for elements of B ----------------------------------------------------


def min_modulus_on_curve(f, rho_prime, n_samples=2001, n_refine=5):
    """Minimum of ``|f(s)|`` over the punctured curve and where it occurs.

    Away from ``m0`` the curve is sampled uniformly in the traversal angle
    and the smallest local minima are polished with a bounded scalar
    minimizer.  On the constancy zone the value is the declared limit, so
    sampling starts at ``rho_prime / 2``.
    """
    a, b = rho_prime / 2.0, TWO_PI - rho_prime / 2.0
    theta = np.linspace(a, b, n_samples)
    vals = np.abs(f(theta_to_s(theta)))
    best_val, best_theta = float(vals.min()), float(theta[np.argmin(vals)])
    interior = np.nonzero((vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:]))[0] + 1
    cand = interior[np.argsort(vals[interior])[:n_refine]]
    dt = theta[1] - theta[0]
    for k in cand:
        lo, hi = max(a, theta[k] - dt), min(b, theta[k] + dt)
        res = minimize_scalar(
            lambda x: float(np.abs(f(theta_to_s(np.array([x])))[0])),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if res.fun < best_val:
            best_val, best_theta = float(res.fun), float(res.x)
    return best_val, float(theta_to_s(best_theta))


def _poly_has_root_in(poly, lo=-1.0, hi=1.0, closed=True, tol=1e-12):
    poly = np.trim_zeros(np.asarray(poly, dtype=complex), "f")
    scale = max(np.max(np.abs(poly)) if poly.size else 0.0, 1e-300)
    if poly.size == 0 or np.all(np.abs(poly) <= tol * scale):
        return True, None
    if poly.size == 1:
        return False, None
    for r in np.roots(poly):
        if abs(r.imag) <= 1e-9 * max(1.0, abs(r)):
            x = r.real
            inside = lo - 1e-12 <= x <= hi + 1e-12 if closed else lo < x < hi
            if inside:
                return True, float(x)
    return False, None


def check_conditions_B(b: ElementB, n_samples: int = 2001, zero_tol: float = 1e-9) -> FredholmVerdict:
    """Fredholm test for ``b`` in B.

    (1) ``b^{+-}`` do not vanish on the punctured curve, (2) the determinant
    of the matrix symbol does not vanish for finite ``t``, (3) its limits
    at ``+-inf`` are nonzero.
    """
    reasons = []
    scalar_ok = True
    min_scalar = np.inf
    for name, f in (("b+", b.plus), ("b-", b.minus)):
        m, where = min_modulus_on_curve(f, b.rho_prime, n_samples)
        min_scalar = min(min_scalar, m)
        if m <= zero_tol:
            scalar_ok = False
            reasons.append(f"condition (1): {name} vanishes near s = {where:.6g}")
    corner_vals = b.corners()
    corner_ok = all(abs(v) > zero_tol for v in corner_vals.values())
    if not corner_ok:
        scalar_ok = False
        reasons.append("condition (1): a one-sided limit of the scalar symbol is zero")

    limits = [b.det_symbol(np.array([-np.inf]))[0], b.det_symbol(np.array([np.inf]))[0]]
    limits_ok = all(abs(v) > zero_tol for v in limits)
    if not limits_ok:
        reasons.append("condition (3): det of the matrix symbol vanishes at an infinity")

    quads = b.det_quadratics()
    line_ok = True
    if quads is not None:
        for q in quads:
            hit, where = _poly_has_root_in(q, closed=False)
            if hit:
                line_ok = False
                reasons.append(
                    "condition (2): det of the matrix symbol vanishes"
                    + (f" at tanh(pi t) = {where:.6g}" if where is not None else " identically")
                )
    else:
        u = np.linspace(-1.0, 1.0, 4001)[1:-1]
        dets = np.abs(b.det_symbol(t_from_u(u)))
        k = int(np.argmin(dets))
        res = minimize_scalar(
            lambda x: float(np.abs(b.det_symbol(t_from_u(np.array([x])))[0])),
            bounds=(u[max(k - 1, 0)], u[min(k + 1, u.size - 1)]),
            method="bounded",
        )
        if min(dets[k], res.fun) <= zero_tol:
            line_ok = False
            reasons.append(f"condition (2): det of the matrix symbol vanishes near u = {res.x:.6g}")
        reasons.append("condition (2) checked by sampling (element is not a product of generators)")

    ok = scalar_ok and corner_ok and line_ok and limits_ok
    return FredholmVerdict(
        scalar_ok,
        corner_ok,
        line_ok,
        limits_ok,
        Overall.FREDHOLM if ok else Overall.NOT_FREDHOLM,
        reasons,
        min_scalar=float(min_scalar),
    )


# -- finite sections of d(m0) --------------------------------------------------------


@dataclass
class ProbeResult:
    truncations: list
    sigma_min: list
    square: bool
    index_deficit: int
    plain_sigma_min: list
    q: int
    h: float

    @property
    def decay_ratio(self) -> float:
        """``sigma(first) / sigma(last)`` of the plain sections."""
        first, last = self.plain_sigma_min[0], self.plain_sigma_min[-1]
        return np.inf if last == 0 else first / last

    def to_dict(self):
        return {
            "truncations": list(self.truncations),
            "sigma_min": [float(x) for x in self.sigma_min],
            "square": self.square,
            "index_deficit": self.index_deficit,
            "plain_sigma_min": [float(x) for x in self.plain_sigma_min],
            "q": self.q,
            "h": self.h,
        }


def _shift_dominant(pair: MatrixSymbolPair, margin):
    """Per channel: is the shift term dominant at -inf / +inf?"""
    left, right = [], []
    for sign, store in ((-1, left), (1, right)):
        B0, B1 = pair.limits(sign)
        for c in range(2):
            store.append(compare(B0[c, c], B1[c, c], margin) == "<")
    return left, right


def section_matrix(pair: MatrixSymbolPair, h: float, n: int, q: int, *, adapted=True, margin=DEFAULT_MARGIN, return_slots=False):
    """Finite section of ``B0(t) + B1(t) T_h`` on ``n`` grid points per channel.

    Grid step ``|h| / q`` so the shift moves exactly ``q`` slots.  With
    ``adapted=True`` the column window of each channel is moved by ``q``
    slots at every end where the corner limit operator is shift-dominant,
    which keeps the section of an invertible operator uniformly invertible.
    The matrix is square exactly when the corner pattern has zero
    per-channel index; otherwise it is returned rectangular.  With
    ``return_slots`` the grid slot of every row and column is returned too.
    """
    if h == 0:
        raise ValueError("finite-section probe needs h != 0; for h = 0 the operator lies in B")
    if h < 0:
        # reflect t -> -t: the shift then points to the right again
        pair = MatrixSymbolPair(
            lambda t, f=pair.B0: f(-np.asarray(t)),
            lambda t, f=pair.B1: f(-np.asarray(t)),
            pair.B0_minus_inf,
            pair.B0_plus_inf,
            pair.B1_minus_inf,
            pair.B1_plus_inf,
        )
        h = -h
    delta = h / q
    ext = np.arange(n + q)
    t_ext = (ext - (n - 1) / 2.0) * delta
    if adapted:
        left, right = _shift_dominant(pair, margin)
    else:
        left, right = [False, False], [False, False]
    dom = [(q if left[c] else 0, n - 1 + (q if right[c] else 0)) for c in range(2)]
    col_offset, offsets = 0, []
    for lo, hi in dom:
        offsets.append(col_offset - lo)
        col_offset += hi - lo + 1
    M = np.zeros((2 * n, col_offset), dtype=complex)
    rows = np.arange(n)
    B0 = pair.B0(t_ext[:n])
    B1 = pair.B1(t_ext[:n])
    for c in range(2):
        for m in range(2):
            lo, hi = dom[m]
            ok0 = (rows >= lo) & (rows <= hi)
            M[c * n + rows[ok0], offsets[m] + rows[ok0]] += B0[ok0, c, m]
            ok1 = (rows + q >= lo) & (rows + q <= hi)
            M[c * n + rows[ok1], offsets[m] + rows[ok1] + q] += B1[ok1, c, m]
    deficit = (col_offset - 2 * n) // q
    if not return_slots:
        return M, deficit
    row_slot = np.concatenate([rows, rows])
    col_slot = np.concatenate([np.arange(lo, hi + 1) for lo, hi in dom])
    return M, deficit, row_slot, col_slot


def _sigma_min(M, row_slot=None, col_slot=None, q=1):
    """Smallest singular value; 0 for non-square sections.

    The shift couples only grid slots in the same residue class mod ``q``,
    so with slot labels the matrix splits into ``q`` independent blocks.
    """
    if M.shape[0] != M.shape[1]:
        return 0.0
    if row_slot is None or q == 1:
        return float(scipy.linalg.svdvals(M).min())
    best = np.inf
    for r in range(q):
        rows = np.nonzero(row_slot % q == r)[0]
        cols = np.nonzero(col_slot % q == r)[0]
        if rows.size != cols.size:
            return 0.0
        best = min(best, float(scipy.linalg.svdvals(M[np.ix_(rows, cols)]).min()))
    return best


def finite_section_probe(pair: MatrixSymbolPair, h: float, truncations=(64, 128, 256), q: int = 2, margin=DEFAULT_MARGIN):
    """Smallest singular values of finite sections of ``d(m0)``.

    A sequence bounded away from zero supports invertibility; decay towards
    zero signals non-invertibility.  This is numerical evidence, not proof.
    """
    sig, plain, deficit = [], [], 0
    for n in truncations:
        M, deficit, rs, cs = section_matrix(pair, h, n, q, adapted=True, margin=margin, return_slots=True)
        sig.append(_sigma_min(M, rs, cs, q))
        Mp, _, rs, cs = section_matrix(pair, h, n, q, adapted=False, return_slots=True)
        plain.append(_sigma_min(Mp, rs, cs, q))
    return ProbeResult(list(truncations), sig, deficit == 0, int(deficit), plain, q, float(h))


def corner_pattern_deficit(pair: MatrixSymbolPair, margin=DEFAULT_MARGIN) -> int:
    """Per-residue index of ``d(m0)`` read off the corner limit operators."""
    left, right = _shift_dominant(pair, margin)
    return sum(int(r) - int(l) for l, r in zip(left, right))
