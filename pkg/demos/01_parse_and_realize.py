"""Parse NC rational expressions and compile them to minimal realizations.

Walks the front end: tokenize/parse, pretty-print, polynomial detection,
evaluation at matrix points, and the state-space compile with minimization.
"""

import numpy as np

import ncfock as nf

# -- parsing and round trips -------------------------------------------------

text = "z1^3 * inv(z2*inv(z1) + 2) - 7*z2*z1*z2"
ast = nf.parse(text, d=2)
print("input:     ", text)
print("formatted: ", nf.format_expr(ast))

poly_text = "1 + z1 + z1*z2"
poly = nf.as_polynomial(nf.parse(poly_text, 2), 2)
print(f"\n{poly_text!r} is a polynomial of degree {poly.degree}:")
for word, value in poly.items():
    print(f"  coefficient of {word or 'the empty word'}: {value}")

# -- evaluation at a matrix point ---------------------------------------------

Z1 = np.array([[0, 1], [0, 0]], dtype=complex)
Z2 = np.array([[0, 0], [1, 0]], dtype=complex)
value = nf.eval_ast(nf.parse("z1*z2", 2), [Z1, Z2])
print("\nz1*z2 at the partial isometry pair:\n", value.real)

# -- realizations --------------------------------------------------------------

f_text = "inv(1 - 0.5*z1*z2 - 0.5*z2*z1)"
raw = nf.from_expression(f_text, 2)
minimal = nf.minimize(raw)
print(f"\n{f_text!r}: compiled size {raw.n}, minimal size {minimal.n}")
print("value at 0:", minimal.value_at_zero().real)

table = nf.taylor_table(minimal, 4)
print("Taylor coefficient of z1*z2:      ", table.coeff((1, 2)).real)
print("Taylor coefficient of z1*z2*z1*z2:", table.coeff((1, 2, 1, 2)).real)

# realization evaluation agrees with structural evaluation
X = nf.MatrixTuple(0.2 * np.stack([Z1 + 0.1 * np.eye(2), Z2]))
lhs = nf.evaluate(minimal, X)
rhs = nf.eval_ast(nf.parse(f_text, 2), X)
print("pencil vs structural evaluation agree:",
      np.allclose(lhs, rhs, atol=1e-12))

# the JSON wire format round-trips exactly
back = nf.realization_from_json(nf.realization_to_json(minimal))
print("JSON round trip exact:", np.array_equal(back.A, minimal.A))
