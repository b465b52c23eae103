"""Index of elements of B and of ``d = b0 + b1 U_h``.

For ``b`` in B::

    ind b = -(1/2pi) (D+ arg b+  -  D- arg b-  +  Dline arg det b(m0)(t))

with increments along the punctured curve (traversed from ``m0 + 0`` to
``m0 - 0``) and along the line from ``-inf`` to ``+inf``.

For ``d`` the case pipelines homotope ``d`` into B.  Each pipeline yields
two scalar curves with an oscillating tail near ``m0`` and a line term
built from determinants of the factorization matrices.  Because ``w`` and
``s`` have zero index, their contributions on the curve are traded for
line terms; only determinants of the certificate enter.

Conventions (see the decisions ledger): case V is the corner pattern of
``P + Q U_h`` and its certificate is skew at ``+inf``, diagonal at
``-inf`` (form ``e4``); cases II, IV, VI are reduced to I, III, V through
``d U_h^{-1} = b1 + b0 U_{-h}``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .factorization import (
    Certificate,
    builtin_certificate_PQUh,
    flip_certificate,
    normalize_certificate,
    swap_certificate,
    verify_certificate,
)
from .fredholm import (
    DEFAULT_MARGIN,
    CaseTag,
    FredholmVerdict,
    Overall,
    check_conditions_B,
    classify_case,
    compare,
    finite_section_probe,
    min_modulus_on_curve,
)
from .geometry import TWO_PI, OscillationSpec, damping, eval_oscillation, helper_p1_q1, theta_to_s
from .symbols import CORNER_KEYS, ElementB, ExtendedElement, Generator, SumB, t_from_u
from .winding import (
    DEFAULT_MAX_STEP,
    CurveTouchesZero,
    RefinementError,
    arg_increment,
    arg_increment_line,
    CurveSegment,
    oscillatory_segment,
)

DEFECT_TOL = 1e-3


@dataclass
class IndexOptions:
    tol: float = DEFAULT_MAX_STEP
    margin: float = DEFAULT_MARGIN
    eps: float = 1e-3
    n_samples: int = 2001
    zero_tol: float = 1e-9
    verify_tol: float = 1e-8
    probe_truncations: tuple = (64, 128, 256)
    probe_q: int = 4
    probe: bool = True

    def to_dict(self):
        return {
            "tol": self.tol,
            "margin": self.margin,
            "eps": self.eps,
            "n_samples": self.n_samples,
            "zero_tol": self.zero_tol,
            "verify_tol": self.verify_tol,
            "probe_truncations": list(self.probe_truncations),
            "probe_q": self.probe_q,
            "probe": self.probe,
        }


@dataclass
class IndexReport:
    verdict: FredholmVerdict
    case: CaseTag | None
    index: int | None
    breakdown: dict = field(default_factory=dict)
    error_budget: float = 0.0
    defect: float | None = None
    warnings: list = field(default_factory=list)
    pipeline: str = ""
    certificate: dict | None = None

    @property
    def status(self) -> str:
        return self.verdict.overall.value

    def to_dict(self, instance_hash: str | None = None):
        out = {
            "tool": "oscindex",
            "version": __version__,
            "verdict": self.verdict.to_dict(),
            "case": None if self.case is None else self.case.value,
            "index": self.index,
            "breakdown": {k: float(v) for k, v in self.breakdown.items()},
            "error_budget": self.error_budget,
            "defect": self.defect,
            "warnings": list(self.warnings),
            "pipeline": self.pipeline,
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if instance_hash is not None:
            out["instance_hash"] = instance_hash
        return out

    def to_json(self, instance_hash: str | None = None) -> str:
        return json.dumps(self.to_dict(instance_hash), indent=2, sort_keys=True)


def _round_bracket(bracket: float):
    """Integer index from the bracket, or ``None`` when the defect is too large."""
    x = -bracket / TWO_PI
    k = int(np.rint(x))
    defect = abs(x - k)
    return (k if defect < DEFECT_TOL else None), float(defect)


# -- elements of B -------------------------------------------------------------------


def _curve_increment(f, rho_prime, tol, label):
    """Increment of ``f`` along the punctured curve, ``theta`` in ``[rho'/2, 2pi - rho'/2]``.

    Coefficients are constant on ``|s| < rho'``, so the ends equal the
    one-sided limits.
    """
    seg = CurveSegment(lambda th: f(theta_to_s(th)), rho_prime / 2.0, TWO_PI - rho_prime / 2.0, label)
    return arg_increment(seg, tol)


def _det_line(elem: ElementB):
    return lambda u: elem.det_symbol(t_from_u(u))


def bracket_B(b: ElementB, tol: float = DEFAULT_MAX_STEP) -> dict:
    """The three increments entering the index formula for ``b``."""
    return {
        "delta_plus": _curve_increment(b.plus, b.rho_prime, tol, "b+ on M+"),
        "delta_minus": _curve_increment(b.minus, b.rho_prime, tol, "b- on M-"),
        "delta_line": arg_increment_line(_det_line(b), tol),
    }


def index_formula_B(b: ElementB, options: IndexOptions | None = None, verdict: FredholmVerdict | None = None) -> IndexReport:
    """Index of ``b`` in B from the symbol increments."""
    opt = options or IndexOptions()
    verdict = verdict or check_conditions_B(b, opt.n_samples, opt.zero_tol)
    if verdict.overall is not Overall.FREDHOLM:
        return IndexReport(verdict, None, None, pipeline="B")
    br = bracket_B(b, opt.tol)
    bracket = br["delta_plus"] - br["delta_minus"] + br["delta_line"]
    k, defect = _round_bracket(bracket)
    rep = IndexReport(verdict, None, k, br, TWO_PI * DEFECT_TOL, defect, pipeline="B")
    if k is None:
        verdict.overall = Overall.INCONCLUSIVE
        verdict.reasons.append(f"index defect {defect:.3g} exceeds {DEFECT_TOL}")
    return rep


# -- pieces of the case pipelines ------------------------------------------------------


@dataclass
class NearModel:
    """``dom + phi_1(s) sub a_{sigma h}(s)`` on one side of ``m0``."""

    dom: complex
    sub: complex
    sigma: int


@dataclass
class ScalarCurve:
    """A homotoped scalar symbol: two near-``m0`` models and the far-arc function."""

    name: str
    near_plus: NearModel
    near_minus: NearModel
    far: object


def _near_segment(model: NearModel, osc: OscillationSpec, rho_prime, side, eps):
    spec = OscillationSpec(model.sigma * osc.h, osc.rho)
    return oscillatory_segment(model.dom, model.sub, spec, rho_prime, side, tau=1.0, eps=eps)


def scalar_curve_increment(curve: ScalarCurve, osc, rho_prime, opt: IndexOptions):
    """Increment along ``m0 + 0 -> far arc -> m0 - 0`` and the tail error bound."""
    seg_p = _near_segment(curve.near_plus, osc, rho_prime, "+", opt.eps)
    seg_m = _near_segment(curve.near_minus, osc, rho_prime, "-", opt.eps)
    far = CurveSegment(lambda th: curve.far(theta_to_s(th)), rho_prime, TWO_PI - rho_prime, f"{curve.name} far arc")
    total = arg_increment(seg_p, opt.tol) + arg_increment(far, opt.tol) + arg_increment(seg_m, opt.tol)
    # junctions: near and far pieces meet at s = +-rho' up to rounding
    total += float(np.angle(far.values[0] / seg_p.values[-1]))
    total += float(np.angle(seg_m.values[0] / far.values[-1]))
    return total, seg_p.error_bound + seg_m.error_bound, (seg_p, far, seg_m)


def _line_term(f_of_t, tol):
    return arg_increment_line(lambda u: f_of_t(t_from_u(u)), tol)


def homotopy_lower_bounds(d: ExtendedElement, taus=(0.0, 0.25, 0.5, 0.75, 1.0), n: int = 400) -> dict:
    """``min |b0 + phi_tau b1 a_h|`` near ``m0`` per corner along the damping homotopy.

    With the dominant term first this never drops below ``|b0| - |b1|``.
    """
    r = np.geomspace(d.rho_prime * 1e-8, d.rho_prime, n)
    out = {}
    for comp, side in CORNER_KEYS:
        a, b = d.b0.corner(comp, side), d.b1.corner(comp, side)
        if abs(a) < abs(b):
            a, b, spec = b, a, d.osc.reversed()
        else:
            spec = d.osc
        s = r if side == "+0" else -r
        a_h = eval_oscillation(spec, s)
        out[(comp, side)] = [float(np.abs(a + damping(tau, d.rho_prime, s) * b * a_h).min()) for tau in taus]
    return out


# -- case pipelines ------------------------------------------------------------------------


def _finish(verdict, case, bracket, parts, budget, pipeline, warnings, cert_info=None):
    k, defect = _round_bracket(bracket)
    warnings = list(warnings)
    if k is None:
        verdict.overall = Overall.INCONCLUSIVE
        verdict.reasons.append(f"index defect {defect:.3g} exceeds {DEFECT_TOL}")
    budget = budget + TWO_PI * DEFECT_TOL
    if budget >= np.pi:
        verdict.overall = Overall.INCONCLUSIVE
        verdict.reasons.append("error budget exceeds pi")
        k = None
    return IndexReport(verdict, case, k, parts, float(budget), defect, warnings, pipeline, cert_info)


def _far_symbol(d: ExtendedElement, component):
    b0 = d.b0.plus if component == "+" else d.b0.minus
    b1 = d.b1.plus if component == "+" else d.b1.minus
    return lambda s: b0(s) + b1(s) * eval_oscillation(d.osc, s)


def case_curves(d: ExtendedElement, target: CaseTag):
    """The two homotoped scalar curves of the case I, III or V pipeline.

    * case I: ``b0 + phi b1 a_h`` on both sides of ``m0``;
    * case III: as case I after ``m0``, and ``(phi b0 + b1 a_h) a_{-h}``
      before ``m0``; the far arc is multiplied by the symbol
      ``p1 + q1 a_{-h}`` of the helper ``P1 + Q1 U_{-h}``;
    * case V: ``b0 + phi b1 a_h`` for the ``+`` component and
      ``(phi b0 + b1 a_h) a_{-h}`` for the ``-`` component, the latter
      factor being the scalar symbol of ``(P + Q U_h)^{-1}`` on ``M-``.
    """
    c0, c1 = d.b0.corner, d.b1.corner
    a_back = lambda s: eval_oscillation(d.osc.reversed(), s)  # noqa: E731
    if target is CaseTag.III:
        p1, q1 = helper_p1_q1(d.osc, d.rho_prime)
        r = lambda s: p1(s) + q1(s) * a_back(s)  # noqa: E731
    curves = []
    for comp in ("+", "-"):
        far = _far_symbol(d, comp)
        fwd_p = NearModel(c0(comp, "+0"), c1(comp, "+0"), 1)
        fwd_m = NearModel(c0(comp, "-0"), c1(comp, "-0"), 1)
        back_p = NearModel(c1(comp, "+0"), c0(comp, "+0"), -1)
        back_m = NearModel(c1(comp, "-0"), c0(comp, "-0"), -1)
        if target is CaseTag.I:
            curves.append(ScalarCurve(f"d{comp}", fwd_p, fwd_m, far))
        elif target is CaseTag.III:
            curves.append(ScalarCurve(f"d{comp} r", fwd_p, back_m, lambda s, far=far: far(s) * r(s)))
        elif comp == "+":
            curves.append(ScalarCurve("d+", fwd_p, fwd_m, far))
        else:
            curves.append(ScalarCurve("d- a_-h", back_p, back_m, lambda s, far=far: far(s) * a_back(s)))
    return curves


def _det_of(f):
    return lambda t: np.linalg.det(f(t))


def line_terms(target: CaseTag, d: ExtendedElement, cert: Certificate | None, opt: IndexOptions):
    """Named line increments and the signed combination entering the bracket."""
    if target is CaseTag.I:
        parts = {"delta_line_det_B0": arg_increment_line(_det_line(d.b0), opt.tol)}
        return parts, parts["delta_line_det_B0"]
    parts = {
        "delta_line_det_w1": _line_term(_det_of(cert.w1), opt.tol),
        "delta_line_det_s1": _line_term(_det_of(cert.s1), opt.tol),
    }
    total = parts["delta_line_det_w1"] - parts["delta_line_det_s1"]
    if target is CaseTag.V:
        # d' = w2 d1 s2 (P + Q U_h)^{-1}; the built-in factors enter with opposite sign
        ref = builtin_certificate_PQUh(d.h, opt.verify_tol)
        parts["delta_line_det_w1_ref"] = _line_term(_det_of(ref.w1), opt.tol)
        parts["delta_line_det_s1_ref"] = _line_term(_det_of(ref.s1), opt.tol)
        total += parts["delta_line_det_s1_ref"] - parts["delta_line_det_w1_ref"]
    return parts, total


def run_pipeline(target: CaseTag, d: ExtendedElement, cert: Certificate | None, opt: IndexOptions):
    """Breakdown, bracket and tail error bound for a reduced case."""
    cp, cm = case_curves(d, target)
    dp, bp, _ = scalar_curve_increment(cp, d.osc, d.rho_prime, opt)
    dm, bm, _ = scalar_curve_increment(cm, d.osc, d.rho_prime, opt)
    parts = {"delta_plus": dp, "delta_minus": dm}
    lines, line_total = line_terms(target, d, cert, opt)
    parts.update(lines)
    return parts, dp - dm + line_total, bp + bm


def index_case_I_II(d: ExtendedElement, options: IndexOptions | None = None) -> IndexReport:
    """Case I (or II, through the swap) without a certificate."""
    rep = compute_index(d, None, options)
    _expect(rep, (CaseTag.I, CaseTag.II))
    return rep


def index_case_III_IV(d: ExtendedElement, cert: Certificate, options: IndexOptions | None = None) -> IndexReport:
    rep = compute_index(d, cert, options)
    _expect(rep, (CaseTag.III, CaseTag.IV))
    return rep


def index_case_V_VI(d: ExtendedElement, cert: Certificate | None = None, options: IndexOptions | None = None) -> IndexReport:
    rep = compute_index(d, cert, options)
    _expect(rep, (CaseTag.V, CaseTag.VI))
    return rep


class CaseMismatch(ValueError):
    pass


def _expect(rep, cases):
    if rep.case not in cases:
        found = None if rep.case is None else rep.case.value
        raise CaseMismatch(f"corner pattern is {found}, expected one of {[c.value for c in cases]}")


# -- Fredholm checks for d -------------------------------------------------------------


def _far_scalar_check(d: ExtendedElement, opt: IndexOptions, reasons):
    ok, least = True, np.inf
    for comp in ("+", "-"):
        m, where = min_modulus_on_curve(_far_symbol(d, comp), d.rho_prime, opt.n_samples)
        least = min(least, m)
        if m <= opt.zero_tol:
            ok = False
            reasons.append(f"scalar symbol d{comp} vanishes near s = {where:.6g}")
    return ok, least


def _is_zero_element(b: ElementB, n=257) -> bool:
    if any(abs(v) > 0 for v in b.corners().values()):
        return False
    s = theta_to_s(np.linspace(0.01, TWO_PI - 0.01, n))
    return not (np.any(b.plus(s) != 0) or np.any(b.minus(s) != 0))


def _collapse(d: ExtendedElement) -> ElementB:
    """``b0 + b1`` as an element of B (used when ``h = 0``)."""
    if isinstance(d.b0, Generator) and isinstance(d.b1, Generator):
        return Generator(d.b0.c1 + d.b1.c1, d.b0.c2 + d.b1.c2, f"{d.b0.label}+{d.b1.label}")
    return SumB([d.b0, d.b1])


_REDUCE = {CaseTag.II: CaseTag.I, CaseTag.IV: CaseTag.III, CaseTag.VI: CaseTag.V}


def _orient(cert: Certificate, target: CaseTag):
    """Flip the certificate if needed so it has the pipeline's orientation."""
    want = {CaseTag.I: ("e3", 2), CaseTag.III: ("e3", 1), CaseTag.V: ("e4", 1)}[target]
    cert = normalize_certificate(cert)
    if (cert.form, cert.l) != want and cert.l == want[1]:
        cert = flip_certificate(cert)
    return cert


def compute_index(d: ExtendedElement, cert: Certificate | None = None, options: IndexOptions | None = None) -> IndexReport:
    """Fredholm checks, case classification and the matching pipeline.

    Never raises on valid input; non-Fredholm and inconclusive outcomes are
    report states.
    """
    opt = options or IndexOptions()
    if d.h == 0 or _is_zero_element(d.b1):
        b = _collapse(d) if d.h == 0 else d.b0
        rep = index_formula_B(b, opt)
        rep.pipeline = "B (h = 0)" if d.h == 0 else "B (b1 = 0)"
        rep.warnings.append("operator lies in B; index from the symbol formula")
        return rep

    reasons, warnings = [], []
    corners = d.corner_data()
    case = classify_case(corners, opt.margin)
    scalar_ok, least = _far_scalar_check(d, opt, reasons)
    eq = [k for k in CORNER_KEYS if compare(*corners[k], opt.margin) == "="]
    corner_ok = not eq
    for comp, side in eq:
        reasons.append(f"corner modulus equality at ({comp}, m0{side}): |b0| = |b1| within margin")
    limits_ok = corner_ok
    verdict = FredholmVerdict(scalar_ok, corner_ok, False, limits_ok, Overall.NOT_FREDHOLM, reasons, min_scalar=float(least))
    if not corner_ok:
        return IndexReport(verdict, case, None, warnings=warnings, pipeline="none")
    if case is CaseTag.MIXED:
        verdict.reasons.append("corner pattern matches none of the cases I-VI; d(m0) is not invertible")
        if opt.probe:
            verdict.probe = finite_section_probe(d.symbol_pair(), d.h, opt.probe_truncations, opt.probe_q, opt.margin)
        return IndexReport(verdict, case, None, warnings=warnings, pipeline="none")
    if not scalar_ok:
        return IndexReport(verdict, case, None, warnings=warnings, pipeline="none")

    # reduce II, IV, VI through d U_h^{-1}
    work, work_cert, target = d, cert, case
    if case in _REDUCE:
        work, target = d.swapped(), _REDUCE[case]
        warnings.append(f"case {case.value} reduced to {target.value} via d U_h^-1 = b1 + b0 U_(-h)")
        if cert is not None:
            work_cert = swap_certificate(cert, d.h)

    try:
        if target is CaseTag.I:
            dets = np.abs(work.b0.det_symbol(t_from_u(np.linspace(-1, 1, 4001))))
            if dets.min() <= opt.zero_tol:
                verdict.overall = Overall.INCONCLUSIVE
                verdict.reasons.append("det B0 vanishes on the line; contradicts the case I factorization")
                return IndexReport(verdict, case, None, warnings=warnings, pipeline="I")
            verdict.line_ok = True
            verdict.overall = Overall.FREDHOLM
            parts, bracket, budget = run_pipeline(target, work, None, opt)
            cert_info = None
            if work_cert is not None:
                oriented = _orient(work_cert, target)
                rep = verify_certificate(oriented, work, tol=opt.verify_tol)
                cert_info = rep.to_dict()
                if rep.accepted:
                    alt = _line_term(lambda t: np.linalg.det(oriented.w1(t)), opt.tol) - _line_term(
                        lambda t: np.linalg.det(oriented.s1(t)), opt.tol
                    )
                    parts["delta_line_certificate"] = alt
                    if abs(alt - parts["delta_line_det_B0"]) > 1e-6:
                        warnings.append("certificate line term disagrees with det B0")
            return _finish(verdict, case, bracket, parts, budget, f"case {target.value}", warnings, cert_info)

        if work_cert is None and target is CaseTag.V and _is_pquh(work):
            work_cert = builtin_certificate_PQUh(work.h, opt.verify_tol)
            warnings.append("built-in P+QU_h certificate used")
        if work_cert is None:
            verdict.overall = Overall.INCONCLUSIVE
            verdict.reasons.append("Inconclusive-numerical: no factorization certificate for case " + case.value)
            if opt.probe:
                verdict.probe = finite_section_probe(d.symbol_pair(), d.h, opt.probe_truncations, opt.probe_q, opt.margin)
            return IndexReport(verdict, case, None, warnings=warnings, pipeline=f"case {target.value}")
        oriented = _orient(work_cert, target)
        rep = verify_certificate(oriented, work, tol=opt.verify_tol)
        cert_info = rep.to_dict()
        if not rep.accepted:
            verdict.overall = Overall.INCONCLUSIVE
            verdict.reasons.append("certificate rejected: " + "; ".join(rep.reasons))
            return IndexReport(verdict, case, None, warnings=warnings, pipeline=f"case {target.value}", certificate=cert_info)
        if rep.implied_case != target.value:
            verdict.overall = Overall.INCONCLUSIVE
            verdict.reasons.append(f"certificate implies case {rep.implied_case}, corners give {target.value}")
            return IndexReport(verdict, case, None, warnings=warnings, pipeline=f"case {target.value}", certificate=cert_info)
        verdict.line_ok = True
        verdict.overall = Overall.FREDHOLM
        parts, bracket, budget = run_pipeline(target, work, oriented, opt)
        return _finish(verdict, case, bracket, parts, budget, f"case {target.value}", warnings, cert_info)
    except (CurveTouchesZero, RefinementError) as exc:
        verdict.overall = Overall.INCONCLUSIVE
        verdict.reasons.append(f"argument increment failed: {exc}")
        return IndexReport(verdict, case, None, warnings=warnings, pipeline=f"case {target.value}")


def _is_pquh(d: ExtendedElement) -> bool:
    """Whether ``d`` has exactly the symbol data of ``P + Q U_h``."""
    t = t_from_u(np.linspace(-1, 1, 101))
    from .symbols import p_symbol

    A = p_symbol(t)
    s = theta_to_s(np.linspace(0.01, TWO_PI - 0.01, 101))
    return (
        np.allclose(d.b0.matrix_symbol(t), A, atol=1e-14)
        and np.allclose(d.b1.matrix_symbol(t), np.eye(2) - A, atol=1e-14)
        and np.allclose(d.b0.plus(s), 1, atol=1e-14)
        and np.allclose(d.b0.minus(s), 0, atol=1e-14)
        and np.allclose(d.b1.plus(s), 0, atol=1e-14)
        and np.allclose(d.b1.minus(s), 1, atol=1e-14)
    )


def instance_hash(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()).hexdigest()
