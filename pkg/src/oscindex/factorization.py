"""Factorization certificates ``w1^{-1} d(m0) s1 = e0 + e1 T_h``.

A certificate is a pair of nondegenerate 2x2 matrix functions ``w1, s1``
on the compactified line together with the diagonal canonical factors
``e0, e1``.  Two canonical forms exist, for ``l = 1, 2``:

* ``'e3'``: ``e0 = diag(I_l, *)``, ``e1 = diag(*, I_{2-l})``, with
  ``r(e0_22 T_h^{-1}) < 1`` and ``r(e1_11 T_h) < 1``;
* ``'e4'``: ``e0 = diag(*, I_{2-l})``, ``e1 = diag(I_l, *)``, with
  ``r(e0_11 T_h) < 1`` and ``r(e1_22 T_h^{-1}) < 1``.

Certificates are never constructed here in general, only verified,
normalized and transformed.  The one built-in certificate is the
factorization of ``P + Q U_h``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .symbols import FLIP, ExtendedElement, ElementB, is_diagonal, is_skew, projection_p, projection_q, t_from_u
from .geometry import OscillationSpec


class CertificateError(ValueError):
    pass


def _const_matrix(m):
    m = np.asarray(m, dtype=complex)
    return lambda t: np.broadcast_to(m, np.shape(t) + (2, 2)).copy()


def _const_diag(d):
    d = np.asarray(d, dtype=complex)
    return lambda t: np.broadcast_to(d, np.shape(t) + (2,)).copy()


@dataclass(frozen=True)
class Certificate:
    """Factorization data; all maps accept arrays of ``t`` including ``+-inf``.

    ``e0`` and ``e1`` return the two diagonal entries, shape ``(..., 2)``.
    ``h`` records the shift the certificate was built for (``None`` if it
    does not depend on it).
    """

    w1: Callable
    s1: Callable
    e0: Callable
    e1: Callable
    form: str
    l: int
    h: float | None = None
    provenance: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.form not in ("e3", "e4") or self.l not in (1, 2):
            raise CertificateError(f"unknown canonical form {self.form!r}, l={self.l}")

    # which diagonal entries are pinned to 1
    def unit_entries(self):
        """List of ``(factor, index)`` forced to equal 1 by the form."""
        if self.form == "e3":
            return [("e0", 0), ("e0", 1)] if self.l == 2 else [("e0", 0), ("e1", 1)]
        return [("e1", 0), ("e1", 1)] if self.l == 2 else [("e0", 1), ("e1", 0)]

    def small_entries(self):
        """Entries subject to the spectral radius condition."""
        units = set(self.unit_entries())
        return [(f, i) for f in ("e0", "e1") for i in (0, 1) if (f, i) not in units]

    def infinity_type(self) -> str:
        """``'<type at +inf>-<type at -inf>'`` with types diagonal/skew/general."""
        return f"{self.infinity_kind(1)}-{self.infinity_kind(-1)}"

    def infinity_kind(self, sign: int) -> str:
        t = np.array([sign * np.inf])
        w, s = self.w1(t)[0], self.s1(t)[0]
        scale = max(np.abs(w).max(), np.abs(s).max())
        tol = 1e-10 * scale
        if is_diagonal(w, tol) and is_diagonal(s, tol):
            return "diagonal"
        if is_skew(w, tol) and is_skew(s, tol):
            return "skew"
        return "general"


def weighted_shift_spectral_radius(c_plus_inf: complex, c_minus_inf: complex) -> float:
    """Spectral radius of ``c T_h`` for a continuous weight with limits at ``+-inf``."""
    return float(max(abs(c_plus_inf), abs(c_minus_inf)))


def default_grid(n: int = 801) -> np.ndarray:
    """Points of the line, uniform in ``u``, including ``t = +-inf``."""
    return t_from_u(np.linspace(-1.0, 1.0, n))


@dataclass
class CertificateReport:
    accepted: bool
    residual_e0: float
    residual_e1: float
    unit_residual: float
    min_det_w1: float
    min_det_s1: float
    spectral_radii: dict
    infinity_type: str
    corner_residual: float
    implied_case: str | None
    reasons: list = field(default_factory=list)

    def to_dict(self):
        return {
            "accepted": self.accepted,
            "residual_e0": self.residual_e0,
            "residual_e1": self.residual_e1,
            "unit_residual": self.unit_residual,
            "min_abs_det_w1": self.min_det_w1,
            "min_abs_det_s1": self.min_det_s1,
            "spectral_radii": dict(self.spectral_radii),
            "infinity_type": self.infinity_type,
            "corner_residual": self.corner_residual,
            "implied_case": self.implied_case,
            "reasons": list(self.reasons),
        }


_IMPLIED = {
    ("e3", 2): {"*": "I"},
    ("e4", 2): {"*": "II"},
    ("e3", 1): {"diagonal-diagonal": "III", "skew-skew": "IV", "diagonal-skew": "V", "skew-diagonal": "VI"},
    ("e4", 1): {"diagonal-diagonal": "IV", "skew-skew": "III", "skew-diagonal": "V", "diagonal-skew": "VI"},
}


def implied_case(cert: Certificate) -> str | None:
    """Corner case forced by the form and the behaviour at the infinities."""
    table = _IMPLIED[(cert.form, cert.l)]
    if "*" in table:
        return table["*"]
    return table.get(cert.infinity_type())


def infinity_products(cert: Certificate, d: ExtendedElement, sign: int) -> list:
    """Corner products ``a_ii x_jk y_kl`` that must equal 1 at one infinity.

    ``X = w1^{-1}(inf)``, ``Y = s1(inf)``, ``A = B0(inf)``, ``B = B1(inf)``.
    """
    t = np.array([sign * np.inf])
    X = np.linalg.inv(cert.w1(t)[0])
    Y = cert.s1(t)[0]
    A = d.b0.limit_matrix(sign)
    B = d.b1.limit_matrix(sign)
    kind = cert.infinity_kind(sign)
    a11, a22, b11, b22 = A[0, 0], A[1, 1], B[0, 0], B[1, 1]
    if cert.l == 2:
        c11, c22 = (a11, a22) if cert.form == "e3" else (b11, b22)
        return [c11 * X[0, 0] * Y[0, 0], c22 * X[1, 1] * Y[1, 1]]
    if cert.form == "e4":
        if kind == "diagonal":
            return [a22 * X[1, 1] * Y[1, 1], b11 * X[0, 0] * Y[0, 0]]
        return [a11 * X[1, 0] * Y[0, 1], b22 * X[0, 1] * Y[1, 0]]
    if kind == "diagonal":
        return [a11 * X[0, 0] * Y[0, 0], b22 * X[1, 1] * Y[1, 1]]
    return [a22 * X[0, 1] * Y[1, 0], b11 * X[1, 0] * Y[0, 1]]


def factor_products(cert: Certificate, d: ExtendedElement, t):
    """``(w1^{-1} B0 s1, w1^{-1} B1 s1(t+h))`` on the points ``t``."""
    t = np.asarray(t, dtype=float)
    winv = np.linalg.inv(cert.w1(t))
    E0 = winv @ d.b0.matrix_symbol(t) @ cert.s1(t)
    E1 = winv @ d.b1.matrix_symbol(t) @ cert.s1(t + d.h)
    return E0, E1


def verify_certificate(cert: Certificate, d: ExtendedElement, grid=None, tol: float = 1e-8) -> CertificateReport:
    """Check a certificate against the symbol of ``d`` pointwise on ``grid``.

    Checks the two coefficient identities, the pinned unit entries, the
    spectral radius conditions, nondegeneracy of ``w1, s1``, the behaviour
    at the infinities and the corner products.
    """
    t = default_grid() if grid is None else np.asarray(grid, dtype=float)
    reasons = []
    if cert.h is not None and not np.isclose(cert.h, d.h, rtol=0, atol=1e-12):
        reasons.append(f"certificate built for h = {cert.h}, operator has h = {d.h}")

    dw = np.abs(np.linalg.det(cert.w1(t)))
    ds = np.abs(np.linalg.det(cert.s1(t)))
    min_dw, min_ds = float(dw.min()), float(ds.min())
    if min_dw <= tol or min_ds <= tol:
        k = int(np.argmin(np.minimum(dw, ds)))
        reasons.append(f"w1 or s1 degenerate near t = {t[k]:.6g}")
        return CertificateReport(False, np.inf, np.inf, np.inf, min_dw, min_ds, {}, cert.infinity_type(), np.inf, None, reasons)

    E0, E1 = factor_products(cert, d, t)
    e0, e1 = cert.e0(t), cert.e1(t)
    D0 = np.zeros_like(E0)
    D1 = np.zeros_like(E1)
    D0[..., 0, 0], D0[..., 1, 1] = e0[..., 0], e0[..., 1]
    D1[..., 0, 0], D1[..., 1, 1] = e1[..., 0], e1[..., 1]
    r0 = float(np.abs(E0 - D0).max())
    r1 = float(np.abs(E1 - D1).max())
    if r0 > tol:
        reasons.append(f"w1^-1 B0 s1 != e0 (residual {r0:.3g})")
    if r1 > tol:
        reasons.append(f"w1^-1 B1 s1(t+h) != e1 (residual {r1:.3g})")

    vals = {"e0": e0, "e1": e1}
    unit = max(float(np.abs(vals[f][..., i] - 1.0).max()) for f, i in cert.unit_entries())
    if unit > tol:
        reasons.append(f"entries pinned by form {cert.form} (l={cert.l}) differ from 1 by {unit:.3g}")

    ends = np.array([np.inf, -np.inf])
    radii = {}
    for f, i in cert.small_entries():
        lim = (cert.e0 if f == "e0" else cert.e1)(ends)[..., i]
        r = weighted_shift_spectral_radius(lim[0], lim[1])
        radii[f"{f}_{i + 1}{i + 1}"] = r
        if r >= 1.0:
            reasons.append(f"spectral radius of {f}_{i + 1}{i + 1} weighted shift is {r:.6g} >= 1")

    itype = cert.infinity_type()
    if "general" in itype:
        reasons.append(f"w1, s1 not simultaneously diagonal or skew at an infinity ({itype})")
    elif itype == "skew-skew" and cert.l == 2:
        reasons.append("skew at both infinities; apply normalize_certificate")

    corner_res = 0.0
    if "general" not in itype:
        for sign in (1, -1):
            prods = infinity_products(cert, d, sign)
            corner_res = max(corner_res, max(abs(p - 1.0) for p in prods))
        if corner_res > tol:
            reasons.append(f"corner products differ from 1 by {corner_res:.3g}")

    implied = implied_case(cert) if "general" not in itype else None
    return CertificateReport(not reasons, r0, r1, unit, min_dw, min_ds, radii, itype, corner_res, implied, reasons)


# -- transformations ----------------------------------------------------------------


def flip_certificate(cert: Certificate) -> Certificate:
    """Right-multiply ``w1`` and ``s1`` by the flip ``[[0, 1], [1, 0]]``.

    This conjugates ``e0 + e1 T_h`` by the flip, which exchanges the two
    diagonal entries; for ``l = 1`` the form switches between ``e3`` and
    ``e4`` and the diagonal/skew type flips at both infinities.
    """
    form = cert.form if cert.l == 2 else ("e4" if cert.form == "e3" else "e3")
    return replace(
        cert,
        w1=lambda t, f=cert.w1: f(t) @ FLIP,
        s1=lambda t, f=cert.s1: f(t) @ FLIP,
        e0=lambda t, f=cert.e0: f(t)[..., ::-1],
        e1=lambda t, f=cert.e1: f(t)[..., ::-1],
        form=form,
        provenance=_append(cert.provenance, "flipped"),
    )


def normalize_certificate(cert: Certificate) -> Certificate:
    """Remove the skew-at-both-infinities situation by one flip."""
    if cert.infinity_type() == "skew-skew":
        return flip_certificate(cert)
    return cert


def swap_certificate(cert: Certificate, h: float) -> Certificate:
    """Certificate of ``b1 + b0 U_{-h}`` obtained from one of ``b0 + b1 U_h``.

    ``w1`` is kept, ``s1`` becomes ``s1(t + h)`` and ``e0, e1`` exchange
    roles, which also switches the canonical form.
    """
    return replace(
        cert,
        s1=lambda t, f=cert.s1: f(np.asarray(t, dtype=float) + h),
        e0=cert.e1,
        e1=cert.e0,
        form="e4" if cert.form == "e3" else "e3",
        h=None if cert.h is None else -cert.h,
        provenance=_append(cert.provenance, "swapped to b1 + b0 U_-h"),
    )


def scale_certificate(cert: Certificate, lam: complex) -> Certificate:
    """Certificate of ``lam d``."""
    lam = complex(lam)
    return replace(cert, w1=lambda t, f=cert.w1: lam * f(t), provenance=_append(cert.provenance, f"scaled by {lam}"))


def left_multiply_certificate(cert: Certificate, x: ElementB) -> Certificate:
    """Certificate of ``x d`` for ``x`` in B with invertible matrix symbol."""
    return replace(
        cert,
        w1=lambda t, f=cert.w1: x.matrix_symbol(t) @ f(t),
        provenance=_append(cert.provenance, f"left factor {x.label}"),
    )


def constant_certificate(w1, s1, e0, e1, form, l, provenance="constant") -> Certificate:
    return Certificate(_const_matrix(w1), _const_matrix(s1), _const_diag(e0), _const_diag(e1), form, l, None, provenance)


def diagonal_certificate(d: ExtendedElement, case: str) -> Certificate:
    """Constant certificate for ``d`` whose matrix symbols are constant and diagonal.

    This covers multiplication operators (``c2 = 0``), where
    ``B0 = diag(a1, a2)`` and ``B1 = diag(b1, b2)``; the dominant entry of
    each channel is divided out.  Cases V and VI cannot occur for such
    operators.
    """
    a = np.diag(d.b0.limit_matrix(1))
    b = np.diag(d.b1.limit_matrix(1))
    for sign in (1, -1):
        if not (is_diagonal(d.b0.limit_matrix(sign)) and is_diagonal(d.b1.limit_matrix(sign))):
            raise CertificateError("matrix symbols are not diagonal")
    if not (np.allclose(d.b0.limit_matrix(-1), np.diag(a)) and np.allclose(d.b1.limit_matrix(-1), np.diag(b))):
        raise CertificateError("matrix symbols are not constant along the line")
    table = {
        "I": ("e3", 2, a, [1, 1], b / a),
        "II": ("e4", 2, b, a / b, [1, 1]),
        "III": ("e3", 1, [a[0], b[1]], [1, a[1] / b[1]], [b[0] / a[0], 1]),
        "IV": ("e4", 1, [b[0], a[1]], [a[0] / b[0], 1], [1, b[1] / a[1]]),
    }
    if case not in table:
        raise CertificateError(f"no diagonal certificate for case {case}")
    form, l, w, e0, e1 = table[case]
    return constant_certificate(np.diag(w), np.eye(2), e0, e1, form, l, f"diagonal certificate, case {case}")


def _append(prov, note):
    return f"{prov}; {note}" if prov else note


# -- the built-in certificate for P + Q U_h --------------------------------------------


def displayed_w1_tilde(t):
    """Displayed closed form ``[[1, -i e^{pi t}], [i e^{pi t}, 1]]`` of ``w1~``."""
    E = np.exp(np.pi * np.asarray(t, dtype=float))
    out = np.empty(np.shape(E) + (2, 2), dtype=complex)
    out[..., 0, 0] = 1.0
    out[..., 0, 1] = -1j * E
    out[..., 1, 0] = 1j * E
    out[..., 1, 1] = 1.0
    return out


def displayed_s1_tilde(t, h):
    """The printed companion matrix of :func:`displayed_w1_tilde`."""
    t = np.asarray(t, dtype=float)
    e = np.exp
    pi = np.pi
    den = (1 + e(pi * t)) * (e(pi * h) + e(2 * pi * t)) * (1 + e(pi * t - pi * h))
    out = np.empty(t.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = e(-pi * h) * (1 + e(pi * t)) * (e(2 * pi * h) + e(2 * pi * t)) / den
    out[..., 0, 1] = -1j * e(-pi * h + pi * t) * (e(pi * h) + e(pi * t)) * (1 + e(2 * pi * t)) / den
    out[..., 1, 0] = 1j * e(-pi * h + pi * t) * (e(2 * pi * h) + e(2 * pi * t)) * (1 + e(pi * t)) / den
    out[..., 1, 1] = -(e(pi * h) + e(pi * t)) * (1 + e(2 * pi * t)) / den
    return out


def _unit_vectors(t):
    """Normalized kernel vector ``(1, i e^{pi t})`` and range vector ``(e^{pi t}, -i)`` of ``A(t)``."""
    u = np.tanh(np.pi * np.asarray(t, dtype=float) / 2.0)
    nrm = np.sqrt(2.0 * (1.0 + u * u))
    c = (1.0 - u) / nrm
    s = (1.0 + u) / nrm
    ker = np.stack([c + 0j, 1j * s], axis=-1)
    ran = np.stack([s + 0j, -1j * c], axis=-1)
    return ker, ran


def _project(r, x):
    """``r r^H x`` for unit vectors ``r`` (the orthogonal projection onto ``r``)."""
    return r * np.sum(np.conj(r) * x, axis=-1, keepdims=True)


def corrected_pquh_pair(h: float):
    """Nondegenerate ``(w, s)`` with ``w^{-1}(A + (I-A) T_h) s = diag(0,1) + diag(1,0) T_h``.

    ``A(t)`` is the orthogonal projection onto ``ran A(t)``.  Take
    ``s(t) = [ker A(t), ran A(t-h)]``, so ``A s`` kills the first column and
    ``(I - A(t)) s(t+h)`` kills the second.  The surviving columns
    ``(I - A(t)) ker A(t+h)`` and ``A(t) ran A(t-h)`` form ``w(t)``; they lie
    in the orthogonal lines ``ker A(t)`` and ``ran A(t)`` and never vanish,
    since the inner products ``<ker(t), ker(t')>`` are positive.
    """

    def s1(t):
        t = np.asarray(t, dtype=float)
        ker, _ = _unit_vectors(t)
        _, ran_back = _unit_vectors(t - h)
        return np.stack([ker, ran_back], axis=-1)

    def w1(t):
        t = np.asarray(t, dtype=float)
        ker, ran = _unit_vectors(t)
        ker_fwd, _ = _unit_vectors(t + h)
        _, ran_back = _unit_vectors(t - h)
        return np.stack([_project(ker, ker_fwd), _project(ran, ran_back)], axis=-1)

    return w1, s1


def pquh_element(h: float, rho: float = 1.0, rho_prime: float | None = None) -> ExtendedElement:
    osc = OscillationSpec(h, rho)
    rp = osc.default_rho_prime if rho_prime is None else rho_prime
    return ExtendedElement(projection_p(rp), projection_q(rp), osc, "P+QU_h")


def builtin_certificate_PQUh(h: float, tol: float = 1e-8, store=None) -> Certificate:
    """Verified factorization certificate of ``P + Q U_h``.

    The printed matrix ``w1~`` is evaluated first; its determinant
    ``1 - e^{2 pi t}`` vanishes at ``t = 0``, so it cannot serve as a
    certificate and the pair is rebuilt from the rank-one structure of
    ``A(t)`` (:func:`corrected_pquh_pair`).  The result must pass
    :func:`verify_certificate` at ``tol``; it is optionally persisted to
    the directory ``store``.
    """
    d = pquh_element(h)
    grid = default_grid()
    notes = []
    det_disp = np.linalg.det(displayed_w1_tilde(np.array([0.0])))[0]
    if abs(det_disp) > tol:
        disp = Certificate(
            displayed_w1_tilde,
            lambda t: displayed_s1_tilde(t, h),
            _const_diag([0.0, 1.0]),
            _const_diag([1.0, 0.0]),
            "e4",
            1,
            h,
            "printed matrices",
        )
        if verify_certificate(disp, d, grid[1:-1], tol).accepted:
            return disp
    notes.append(f"printed w1~ has det(0) = {det_disp.real:.3g} (det = 1 - e^(2 pi t)); rebuilt from ker/ran of A(t)")
    w1, s1 = corrected_pquh_pair(h)
    cert = Certificate(
        w1,
        s1,
        _const_diag([0.0, 1.0]),
        _const_diag([1.0, 0.0]),
        "e4",
        1,
        float(h),
        "corrected P+QU_h factorization: " + "; ".join(notes),
        {"displayed_det_at_0": complex(det_disp)},
    )
    report = verify_certificate(cert, d, grid, tol)
    if not report.accepted:
        raise CertificateError("corrected P+QU_h certificate failed verification: " + "; ".join(report.reasons))
    if store is not None:
        from .certfile import save_certificate

        os.makedirs(store, exist_ok=True)
        save_certificate(cert, os.path.join(store, f"pquh_h{h:g}.cert"))
    return cert
