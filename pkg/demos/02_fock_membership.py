"""Membership of NC rational functions in the Fock space.

Membership, boundedness, and analyticity across the boundary are all
equivalent to spr(A) < 1 for a minimal realization (A, b, c).  The demo
runs the test on three representatives and shows the certificates: the
joint spectral radius, the analyticity radius, the Fock norm on the
positive side, and a pencil-singular point at norm 1/spr on the negative
side.  Szego kernel representations close the loop.
"""

import numpy as np

import ncfock as nf

cases = [
    ("1 + z1 + z1*z2", 2, "polynomial"),
    ("inv(1 - z1)", 1, "geometric series at the boundary"),
    ("inv(1 - 0.5*z1*z2 - 0.5*z2*z1)", 2, "bounded rational"),
]

for text, d, label in cases:
    r = nf.minimize(nf.from_expression(text, d))
    result = nf.is_in_fock(r)
    print(f"{label}: {text}")
    print(f"  verdict = {result.verdict!r}, spr = {result.spr:.12g}, "
          f"analyticity radius = {result.radius}")
    if result.in_h2:
        print(f"  Fock norm = {result.h2_norm:.12g}")
    else:
        print(f"  witness at row norm {result.witness_row_norm:.12g} with "
              f"sigma_min(pencil) = {result.witness_sigma_min:.3g}")
    print()

# -- kernels -------------------------------------------------------------------

f = nf.minimize(nf.from_expression("inv(1 - 0.5*z1*z2 - 0.5*z2*z1)", 2))
kernel = nf.kernel_from_realization(f)
print("kernel point row norm:", kernel.Z.row_norm())
print("kernel coefficients reproduce the Taylor table:",
      nf.kernel_coefficients(kernel, 5).allclose(nf.taylor_table(f, 5),
                                                 tol=1e-9))

# the reproducing property <K{Z,y,v}, p> = y* p(Z) v
p = nf.NCPolynomial(2, {(): 1.0, (1, 2): 2.0})
print("reproducing value:", nf.reproduce(kernel, p))

# norms: three unit coefficients give sqrt(3); the fixture telescopes to 2
print("\n||1 + z1 + z1*z2|| =",
      nf.h2_norm(nf.minimize(nf.from_expression("1 + z1 + z1*z2", 2))),
      "(= sqrt(3))")
print("||f||^2            =", nf.h2_norm(f) ** 2, "(= 2 exactly)")
