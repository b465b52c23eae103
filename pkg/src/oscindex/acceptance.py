"""The acceptance battery, shared by ``oscindex selftest`` and the test suite.

Every ``criterion_*`` function returns ``(ok, detail)``; tolerances are
module constants so the tests and the command line agree.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .certfile import load_certificate, read_header
from .factorization import (
    builtin_certificate_PQUh,
    diagonal_certificate,
    displayed_w1_tilde,
    left_multiply_certificate,
    pquh_element,
    swap_certificate,
    verify_certificate,
)
from .fredholm import CaseTag, Overall, check_conditions_B, classify_case, compare, finite_section_probe
from .geometry import TWO_PI, OscillationSpec, constant, step_blend, trig_polynomial, winding_exp
from .index import DEFECT_TOL, IndexOptions, bracket_B, compute_index, index_formula_B
from .instances import bundled, bundled_names, scaled, with_rho_prime, with_tolerances
from .opnum import (
    GridSpec,
    Factor,
    identity_matrix,
    pquh_factor,
    pquh_helper_det,
    pquh_helper_det_closed,
    printed_inverse_factor,
    residual_identity,
)
from .symbols import CORNER_KEYS, ExtendedElement, Generator, projection_p, projection_q, riesz_combination
from .winding import CurveSegment, arg_increment

OPNUM_TOL = 1e-10
DET_TOL = 1e-10
TOEPLITZ_TRUNCATION = 256
MIXED_DECAY = 10.0
QUANT_TOL = 1e-6 * TWO_PI
CERT_TOL = 1e-8
H_VALUES = (0.5, 1.0, 2.0)


# -- 1, 2: closed-form identities for P + Q U_h ----------------------------------------------


def criterion_1():
    worst = 0.0
    for h in H_VALUES:
        for q in (4, 8):
            grid = GridSpec(6.0, q, h)
            ident = [Factor(identity_matrix)]
            for chain in ([pquh_factor(h), printed_inverse_factor(h)], [printed_inverse_factor(h), pquh_factor(h)]):
                worst = max(worst, residual_identity(chain, ident, grid))
    return worst < OPNUM_TOL, f"max residual {worst:.3g} (limit {OPNUM_TOL:g})"


def criterion_2():
    t = np.linspace(-5.0, 5.0, 2001)
    worst = max(float(np.abs(pquh_helper_det(t, h) - pquh_helper_det_closed(t, h)).max()) for h in H_VALUES)
    return worst < DET_TOL, f"max deviation {worst:.3g} (limit {DET_TOL:g})"


# -- 3: P + Q U_h and Q + P U_h ----------------------------------------------------------------


def qpuh_element(h):
    osc = OscillationSpec(h, 1.0)
    rp = osc.default_rho_prime
    return ExtendedElement(projection_q(rp), projection_p(rp), osc, "Q+PU_h")


def criterion_3():
    rows, ok = [], True
    for h in H_VALUES:
        for name, d, case in (("P+QU_h", pquh_element(h), CaseTag.V), ("Q+PU_h", qpuh_element(h), CaseTag.VI)):
            cert = builtin_certificate_PQUh(h) if case is CaseTag.V else swap_certificate(builtin_certificate_PQUh(-h), -h)
            rep = compute_index(d, cert, IndexOptions(probe=False))
            good = rep.index == 0 and rep.case is case and rep.defect is not None and rep.defect < DEFECT_TOL
            ok &= good
            rows.append(f"{name} h={h:g}: case {rep.case.value} index {rep.index}")
    return ok, "; ".join(rows)


# -- 4: Toeplitz battery -------------------------------------------------------------------------


def toeplitz_oracle(k: int, n: int = TOEPLITZ_TRUNCATION, tol: float = 1e-8):
    """``dim ker - dim coker`` of ``e^{ik theta} P + Q`` from finite Fourier sections.

    In the basis ``e_m = e^{i m theta}`` the operator sends ``e_m`` to
    ``e_{m+k}`` for ``m >= 0`` and fixes ``e_m`` for ``m < 0``.  Kernel
    vectors are sought among interior modes ``|m| < n - |k|`` with the
    codomain extended by ``|k|``; cokernel vectors among interior
    codomain modes, tested against the images of the whole window.
    Because the operator moves modes by at most ``|k|``, these interior
    counts agree with those of the infinite operator.
    """
    inner = n - abs(k)
    dom = np.arange(-n, n)
    cod = np.arange(-n - abs(k), n + abs(k))
    M = np.zeros((cod.size, dom.size))
    for j, m in enumerate(dom):
        M[np.searchsorted(cod, m + k if m >= 0 else m), j] = 1.0
    dom_in = np.abs(dom) < inner
    cod_in = np.abs(cod) < inner
    sv_ker = np.linalg.svd(M[:, dom_in], compute_uv=False)
    ker = int(np.sum(dom_in) - np.sum(sv_ker > tol))
    sv_cok = np.linalg.svd(M[cod_in, :], compute_uv=False)
    coker = int(np.sum(cod_in) - np.sum(sv_cok > tol))
    return ker - coker


def toeplitz_element(k, rho_prime=0.5):
    return riesz_combination(winding_exp(k, rho_prime), constant(1.0, rho_prime))


def criterion_4():
    rows, ok = [], True
    for k in range(-3, 4):
        rep = index_formula_B(toeplitz_element(k))
        oracle = toeplitz_oracle(k)
        good = rep.index == -k and oracle == -k
        ok &= good
        rows.append(f"k={k}: {rep.index}/{oracle}")
    return ok, "formula/oracle " + ", ".join(rows)


# -- 5: winding engine -------------------------------------------------------------------------


def random_laurent(rng, max_degree=8, max_pole=4):
    """Coefficients (highest power first) and pole order, nonvanishing on the circle."""
    while True:
        deg = int(rng.integers(1, max_degree + 1))
        coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        if np.abs(np.polyval(coeffs, np.exp(1j * np.linspace(0, TWO_PI, 4096)))).min() > 0.05:
            return coeffs, int(rng.integers(0, max_pole + 1))


def criterion_5(seed=0, n=100):
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(n):
        coeffs, pole = random_laurent(rng)
        seg = CurveSegment(lambda th: np.polyval(coeffs, np.exp(1j * th)) * np.exp(-1j * pole * th), 0.0, TWO_PI)
        winding = arg_increment(seg) / TWO_PI
        oracle = int(np.sum(np.abs(np.roots(coeffs)) < 1.0)) - pole
        bad += abs(winding - oracle) > 1e-9
    return bad == 0, f"{n - bad}/{n} Laurent polynomials match the zero count"


# -- 6: case exemplars -----------------------------------------------------------------------------


EXEMPLARS = (("case1", "I", -1), ("case3_mult", "III", 0), ("case3_composite", "III", -1))


def criterion_6():
    rows, ok = [], True
    for name, case, expected in EXEMPLARS:
        inst = bundled(name)
        rep = compute_index(inst.element, inst.certificate(), inst.options(probe=False))
        got_case = None if rep.case is None else rep.case.value
        ok &= rep.index == expected and got_case == case
        rows.append(f"{name}: case {got_case} index {rep.index} (expected {case}, {expected})")
    return ok, "; ".join(rows)


# -- 7: trichotomy -----------------------------------------------------------------------------------


def _generator_from_corners(c, rho_prime):
    """Generator with corners ``c`` ordered as ``CORNER_KEYS``: (+,+0), (+,-0), (-,+0), (-,-0)."""
    pp, pm, mp, mm = c
    return Generator(
        step_blend((pp + mp) / 2, (pm + mm) / 2, rho_prime),
        step_blend((pp - mp) / 2, (pm - mm) / 2, rho_prime),
    )


def _random_corners(rng, pattern):
    """Corner values of ``b0, b1`` with ``|b1/b0|`` below or above 1 per ``pattern``."""
    b0 = np.exp(rng.uniform(-0.5, 0.5, 4) + 2j * np.pi * rng.uniform(size=4))
    ratio = np.where(pattern, rng.uniform(0.2, 0.8, 4), rng.uniform(1.25, 5.0, 4))
    return b0, b0 * ratio * np.exp(2j * np.pi * rng.uniform(size=4))


def random_instance(rng, rho_prime=0.5):
    """One seeded instance and an optional certificate.

    Three families: multiplication operators (cases I-IV, diagonal
    certificates), general generators (any corner pattern, no
    certificate) and ``X (P + Q U_h)``, ``X (Q + P U_h)`` for random
    invertible ``X`` (cases V, VI, built-in certificates).
    """
    h = float(rng.choice([0.5, 1.0, 2.0]) * rng.choice([-1.0, 1.0]))
    osc = OscillationSpec(h, 2.0 * rho_prime)
    kind = int(rng.integers(0, 3))
    if kind == 0:
        side = rng.integers(0, 2, 2).astype(bool)
        b0, b1 = _random_corners(rng, np.array([side[0], side[1], side[0], side[1]]))
        b0[2:], b1[2:] = b0[:2], b1[:2]
        d = ExtendedElement(_generator_from_corners(b0, rho_prime), _generator_from_corners(b1, rho_prime), osc, "mult")
        case = classify_case(d.corner_data())
        cert = diagonal_certificate(d, case.value) if case in (CaseTag.III, CaseTag.IV) else None
        return d, cert
    if kind == 1:
        b0, b1 = _random_corners(rng, rng.integers(0, 2, 4).astype(bool))
        return ExtendedElement(_generator_from_corners(b0, rho_prime), _generator_from_corners(b1, rho_prime), osc, "gen"), None
    # X = a P + b Q with nonvanishing a, b: invertible matrix symbol diag-like in the Riesz basis
    a = step_blend(*np.exp(rng.uniform(-0.5, 0.5, 2) + 2j * np.pi * rng.uniform(size=2)), rho_prime) * winding_exp(int(rng.integers(-2, 3)), rho_prime)
    b = step_blend(*np.exp(rng.uniform(-0.5, 0.5, 2) + 2j * np.pi * rng.uniform(size=2)), rho_prime)
    x = riesz_combination(a, b)
    p, q = projection_p(rho_prime), projection_q(rho_prime)
    if rng.integers(0, 2):
        d = ExtendedElement(x * p, x * q, osc, "X(P+QU_h)")
        cert = builtin_certificate_PQUh(h)
    else:
        d = ExtendedElement(x * q, x * p, osc, "X(Q+PU_h)")
        cert = swap_certificate(builtin_certificate_PQUh(-h), -h)
    return d, left_multiply_certificate(cert, x)


def criterion_7(seed=0, n=500):
    rng = np.random.default_rng(seed)
    opt = IndexOptions(probe=False)
    counts, mixed, worst_decay, violations = {}, 0, np.inf, []
    for i in range(n):
        d, cert = random_instance(rng)
        corners = d.corner_data()
        if any(compare(*corners[k], opt.margin) == "=" for k in CORNER_KEYS):
            continue
        rep = compute_index(d, cert, opt)
        if rep.verdict.overall is Overall.FREDHOLM:
            if rep.case is None or not rep.case.is_admissible:
                violations.append(f"#{i} Fredholm with case {rep.case}")
            counts[rep.case.value] = counts.get(rep.case.value, 0) + 1
        if rep.case is CaseTag.MIXED:
            mixed += 1
            probe = finite_section_probe(d.symbol_pair(), d.h, opt.probe_truncations, opt.probe_q, opt.margin)
            worst_decay = min(worst_decay, probe.decay_ratio)
            if probe.decay_ratio < MIXED_DECAY:
                violations.append(f"#{i} Mixed with sigma_min decay {probe.decay_ratio:.3g}")
    certified = sum(counts.values())
    detail = (
        f"{certified} certified Fredholm {dict(sorted(counts.items()))}; {mixed} Mixed, "
        f"weakest decay {worst_decay:.3g}x"
    )
    if violations:
        detail += "; violations: " + ", ".join(violations[:5])
    return not violations and certified > 0 and mixed > 0, detail


# -- 8: invariances ----------------------------------------------------------------------------------


def _index_of(inst):
    return compute_index(inst.element, inst.certificate(), inst.options(probe=False)).index


def criterion_8():
    bad, checked = [], 0
    for name in bundled_names():
        inst = bundled(name)
        base = _index_of(inst)
        if base is None:
            continue
        variants = {f"lambda={lam}": scaled(inst, lam) for lam in (2, 1j, -3)}
        variants["rho'/2"] = with_rho_prime(inst, inst.spec["rho_prime"] / 2)
        tol = inst.options().tol
        variants["tol/2"] = with_tolerances(inst, tol=tol / 2)
        for label, v in variants.items():
            checked += 1
            got = _index_of(v)
            if got != base:
                bad.append(f"{name} {label}: {got} != {base}")
    return not bad, f"{checked - len(bad)}/{checked} variants keep the index" + ("; " + ", ".join(bad) if bad else "")


# -- 9: the printed certificate and its correction ------------------------------------------------


def criterion_9(store=None):
    t = np.linspace(-3, 3, 601)
    disp = np.linalg.det(displayed_w1_tilde(t))
    closed = 1 - np.exp(2 * np.pi * t)
    det_err = float((np.abs(disp - closed) / np.maximum(1.0, np.abs(closed))).max())
    det0 = abs(np.linalg.det(displayed_w1_tilde(np.array([0.0])))[0])
    rows, ok = [f"printed det matches 1 - e^(2 pi t) to relative {det_err:.2g}, |det(0)| = {det0:.2g}"], det_err < 1e-10 and det0 < 1e-14
    with tempfile.TemporaryDirectory() as tmp:
        where = store or tmp
        for h in H_VALUES:
            cert = builtin_certificate_PQUh(h, CERT_TOL, store=where)
            rep = verify_certificate(cert, pquh_element(h), tol=CERT_TOL)
            path = os.path.join(where, f"pquh_h{h:g}.cert")
            header = read_header(path) if os.path.exists(path) else {}
            persisted = "corrected" in header.get("provenance", "")
            reloaded = verify_certificate(load_certificate(path), pquh_element(h), tol=1e-4).accepted if persisted else False
            ok &= rep.accepted and persisted and reloaded and "1 - e^(2 pi t)" in cert.provenance
            rows.append(f"h={h:g}: residual {max(rep.residual_e0, rep.residual_e1):.2g}, persisted {persisted}, reload {reloaded}")
    return ok, "; ".join(rows)


# -- 10: quantization -----------------------------------------------------------------------------------


def random_b_element(rng, rho_prime=0.5):
    def coef():
        jump = step_blend(*(rng.normal(size=2) + 1j * rng.normal(size=2)), rho_prime)
        trig = trig_polynomial({k: complex(*rng.normal(size=2)) * 0.5 ** abs(k) for k in range(-2, 3)}, rho_prime)
        return jump + trig

    return Generator(coef(), coef())


def criterion_10(seed=0, n=100):
    rng = np.random.default_rng(seed)
    worst, done, tries = 0.0, 0, 0
    while done < n and tries < 50 * n:
        tries += 1
        b = random_b_element(rng)
        if check_conditions_B(b).overall is not Overall.FREDHOLM:
            continue
        br = bracket_B(b)
        bracket = br["delta_plus"] - br["delta_minus"] + br["delta_line"]
        worst = max(worst, abs(bracket - TWO_PI * np.rint(bracket / TWO_PI)))
        done += 1
    return done == n and worst < QUANT_TOL, f"{done} Fredholm elements, worst distance to 2 pi Z {worst:.3g} (limit {QUANT_TOL:.3g})"


CRITERIA = (
    (1, "inverse identity on exact-shift grids", criterion_1),
    (2, "helper determinant display", criterion_2),
    (3, "P+QU_h and Q+PU_h have index 0", criterion_3),
    (4, "Toeplitz battery", criterion_4),
    (5, "winding engine vs zero count", criterion_5),
    (6, "case I and III exemplars", criterion_6),
    (7, "trichotomy on random instances", criterion_7),
    (8, "robustness invariances", criterion_8),
    (9, "printed certificate correction", criterion_9),
    (10, "bracket quantization", criterion_10),
)


def run_all(seed=0):
    """Yield ``(number, name, ok, detail)`` for every criterion."""
    for num, name, fn in CRITERIA:
        kwargs = {"seed": seed} if "seed" in fn.__code__.co_varnames[: fn.__code__.co_argcount] else {}
        with np.errstate(over="ignore"):
            ok, detail = fn(**kwargs)
        yield num, name, bool(ok), detail
