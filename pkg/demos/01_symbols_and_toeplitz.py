"""Symbols of elements of B and the index formula on Toeplitz-type operators.

Run: python demos/01_symbols_and_toeplitz.py
"""
import numpy as np

from oscindex.geometry import constant, winding_exp
from oscindex.index import bracket_B, index_formula_B
from oscindex.symbols import riesz_combination, s_symbol, singular

rp = 0.5

# The matrix symbol of S on the line: a unitary involution with det -1.
t = np.array([-np.inf, -1.0, 0.0, 1.0, np.inf])
S = s_symbol(t)
print("Sigma(t) at t = -inf, -1, 0, 1, +inf")
for ti, m in zip(t, S):
    print(f"  t = {ti:5}:", np.round(m, 4).tolist())
print("det Sigma:", np.round(np.linalg.det(S), 12))
print("index of S:", index_formula_B(singular(rp)).index)

# e^{ik psi} P + Q for a few k; psi is the flattened angle (frozen near m0).
print("\nk   delta+/2pi   delta-/2pi   line/2pi   index")
for k in range(-3, 4):
    b = riesz_combination(winding_exp(k, rp), constant(1.0, rp))
    br = {key: v / (2 * np.pi) for key, v in bracket_B(b).items()}
    rep = index_formula_B(b)
    print(f"{k:2d}  {br['delta_plus']:10.6f}  {br['delta_minus']:10.6f}  {br['delta_line']:9.6f}  {rep.index:5d}")
