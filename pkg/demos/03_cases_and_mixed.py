"""Walk through the bundled instances, then probe a Mixed corner pattern.

Run: python demos/03_cases_and_mixed.py
"""

from oscindex.fredholm import finite_section_probe
from oscindex.index import compute_index
from oscindex.instances import bundled, bundled_names

print(f"{'instance':18s} {'status':13s} {'case':14s} index")
for name in bundled_names():
    inst = bundled(name)
    rep = compute_index(inst.element, inst.certificate(), inst.options(probe=False))
    case = "-" if rep.case is None else rep.case.value
    print(f"{name:18s} {rep.status:13s} {case:14s} {rep.index}")

# The Mixed instance has strict corner comparisons, yet d(m0) is not invertible;
# plain finite sections show the smallest singular value collapsing.
d = bundled("mixed").element
mixed = finite_section_probe(d.symbol_pair(), d.h, (32, 64, 128, 256), q=4)
print("\nMixed instance, plain sections:")
for n, s in zip(mixed.truncations, mixed.plain_sigma_min):
    print(f"  n = {n:3d}   sigma_min = {s:.3e}")

# For comparison, P + Q U_h: adapted sections stay bounded below.
d = bundled("pquh").element
probe = finite_section_probe(d.symbol_pair(), d.h, (32, 64, 128, 256), q=4)
print("\nP + Q U_h, adapted sections:")
for n, s in zip(probe.truncations, probe.sigma_min):
    print(f"  n = {n:3d}   sigma_min = {s:.3e}")
print("\nfirst/last ratio, Mixed:", f"{mixed.plain_sigma_min[0] / mixed.plain_sigma_min[-1]:.2e}")
print("first/last ratio, P + Q U_h:", f"{probe.sigma_min[0] / probe.sigma_min[-1]:.3f}")
