"""Inner-outer factorization of NC polynomials with certificates.

The outer factor q of p matches the multiplier autocorrelations of p and
maximizes the constant term; the inner factor is the rational quotient
p q^{-1}.  Both are certified: q through the radius-of-convergence test on
its inverse, the quotient through an exact Gram (isometry) test.
"""

import numpy as np

import ncfock as nf
from ncfock.factorization import factor_identity_table

# -- the worked d = 2 example ---------------------------------------------------

p = nf.NCPolynomial(2, {(): 1.0, (1,): 1.0, (1, 2): 1.0})
print("p = 1 + z1 + z1*z2")
print("autocorrelations:", nf.autocorrelations(p))

result = nf.outer_factor(p, seed=0)
q = result.outer
print("\nouter factor q:")
for word, value in q.items():
    print(f"  {word or 'empty'}: {value.real:.12f}")
print("q(0)^2 =", result.q0 ** 2, " (the real cubic root 1.75487766...)")
print("autocorrelation residual:", result.residual)
print("outer certificate:", bool(result.outer_certificate),
      "| spr of q^{-1} realization:",
      result.outer_certificate.spr_inverse)
print("inner certificate:", bool(result.inner_certificate),
      "| defects:", result.inner_certificate.unit_defect,
      result.inner_certificate.orthogonality_defect)
print("inner * outer reproduces p:",
      factor_identity_table(result, p).allclose(p, tol=1e-7))

# -- a symmetric degree-2 polynomial that is not outer ---------------------------

P = nf.NCPolynomial(2, {(): 1.0, (1, 2): -1.0, (2, 1): -1.0})
print("\nP = 1 - z1*z2 - z2*z1")
res = nf.outer_factor(P, seed=0)
print("outer factor has constant term sqrt(2):", res.q0)
print("its z1*z2 coefficient is -1/sqrt(2):", res.outer.coeff((1, 2)).real)
print("P itself outer?",
      bool(nf.is_outer_rational(nf.minimize(nf.from_polynomial(P)))))
print("|T_P| (hereditary level bound):", len(nf.hereditary_tree(P)))

# -- one-variable sanity: the classical Blaschke flip ----------------------------

pp = nf.NCPolynomial(1, {(): 1.0, (1,): -2.0})   # root at 0.5, inside
flip = nf.outer_factor(pp, seed=0)
print("\n1 - 2 z has outer factor with coefficients",
      [np.round(flip.outer.coeff((1,) * k), 10) for k in range(2)],
      "(root reflected to 2)")
