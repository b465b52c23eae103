"""P + Q U_h: the printed factorization, its repair, and the index.

Run: python demos/02_pquh_certificate.py
"""
import numpy as np

from oscindex.factorization import (
    builtin_certificate_PQUh,
    displayed_w1_tilde,
    pquh_element,
    verify_certificate,
)
from oscindex.index import IndexOptions, compute_index
from oscindex.opnum import (
    Factor,
    GridSpec,
    certificate_chain,
    identity_matrix,
    pquh_factor,
    printed_inverse_factor,
    residual_identity,
)

h = 1.0

# The printed w1~ is singular at t = 0: det = 1 - e^{2 pi t}.
for t in (-1.0, 0.0, 1.0):
    det = np.linalg.det(displayed_w1_tilde(np.array([t])))[0]
    print(f"det w1~({t:+.0f}) = {det.real:+.6f}   1 - e^(2 pi t) = {1 - np.exp(2 * np.pi * t):+.6f}")

# The built-in certificate notices this and rebuilds w1, s1 from ker/ran of A(t).
cert = builtin_certificate_PQUh(h)
print("\nprovenance:", cert.provenance)
rep = verify_certificate(cert, pquh_element(h))
print("accepted:", rep.accepted, " residuals:", f"{rep.residual_e0:.1e} {rep.residual_e1:.1e}")
print("infinity type:", rep.infinity_type, " implied case:", rep.implied_case)

# Operator-level checks on an exact-shift grid (no interpolation anywhere).
grid = GridSpec(6.0, 8, h)
inv = residual_identity([pquh_factor(h), printed_inverse_factor(h)], [Factor(identity_matrix)], grid)
lhs, rhs = certificate_chain(cert, h)
print(f"\n(P+QU_h)(m0) * printed inverse - I : {inv:.2e}")
print(f"w1^-1 (P+QU_h)(m0) s1 - (e0 + e1 T_h): {residual_identity(lhs, rhs, grid):.2e}")

# And the case V pipeline gives index 0.
out = compute_index(pquh_element(h), cert, IndexOptions(probe=False))
print(f"\ncase {out.case.value}, index {out.index}, defect {out.defect:.1e}")
for key, val in out.breakdown.items():
    print(f"  {key:24s} {val / (2 * np.pi):+.6f} x 2pi")
