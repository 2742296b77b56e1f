"""Inner-outer factorization of NC polynomials and the rational certificates.

The outer factor q of a polynomial p is the polynomial with deg q <= deg p,
q(0) > 0 maximal, whose multiplier autocorrelations match those of p
(q(L)* q(L) = p(L)* p(L)).  The solver is a multistart Gauss-Newton on the
autocorrelation equations; correctness is carried by the certificates, not
by the solver: every returned q passes the rational outerness test and the
quotient p q^{-1} passes the isometry (innerness) test.

Outerness of a rational r with minimal realization (A, b, c) is decided by
the radius of convergence of the series of r^{-1} at 0: r is outer iff the
minimal realization of r^{-1} has joint spectral radius <= 1.  Innerness is
an exact Gram condition computed through one left Stein solve.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import CertificationError, SpectralRadiusError
from .realization import (
    Realization,
    _krylov_basis,
    from_polynomial,
    invert,
    minimize,
    mul,
    taylor_table,
)
from .spectral import SPR_BOUNDARY_TOL, spr, stein_solve
from .words import NCPolynomial, suffixes, words_up_to


def autocorrelations(p):
    """gamma -> sum_w conj(p_w) p_{w gamma}, the L^gamma coefficient of
    p(L)* p(L); the empty-word entry is ||p||_2^2."""
    table = {}
    support = list(p.coeffs.items())
    for w, value in support:
        lw = len(w)
        for wg, value_g in support:
            if len(wg) >= lw and wg[:lw] == w:
                gamma = wg[lw:]
                table[gamma] = table.get(gamma, 0.0) + np.conj(value) * value_g
    return {g: complex(v) for g, v in table.items() if v != 0}


def hereditary_tree(p):
    """All suffixes of support words of p; |T_p| bounds the variety level."""
    if p.is_zero():
        raise ValueError("hereditary tree of the zero polynomial")
    tree = set()
    for word in p.coeffs:
        tree.update(suffixes(word))
    return tree


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

@dataclass
class OuterResult:
    """Outcome of the rational outerness test.

    outer is True iff the minimal realization of r^{-1} has
    spr <= 1 + 1e-9; values within 1e-9 of 1 set ``indeterminate``.
    A vanishing value at zero short-circuits to False (the pair (0, y)
    then sits in the singularity locus).
    """

    outer: bool
    spr_inverse: float
    indeterminate: bool = False
    value_at_zero: complex = 0.0
    reason: str = ""

    def __bool__(self):
        return self.outer


def is_outer_rational(r, tol=SPR_BOUNDARY_TOL):
    gamma = r.value_at_zero()
    scale = max(np.linalg.norm(r.b) * np.linalg.norm(r.c), 1.0)
    if abs(gamma) <= 1e-12 * scale:
        return OuterResult(outer=False, spr_inverse=float("inf"),
                           value_at_zero=gamma,
                           reason="value at zero is zero")
    r_inv = minimize(invert(r))
    s = spr(r_inv.A)
    return OuterResult(outer=bool(s <= 1.0 + tol), spr_inverse=s,
                       indeterminate=bool(abs(s - 1.0) <= tol),
                       value_at_zero=gamma,
                       reason=f"spr of inverse realization = {s:.12g}")


@dataclass
class InnerResult:
    """Outcome of the isometry test for a bounded rational multiplier.

    With Q the left Stein solution Q - sum A_j* Q A_j = b b*, the
    multiplier is inner iff c* Q c = 1 and Q c is orthogonal to
    span{A^g c : |g| >= 1}.  Both defects are reported.
    """

    inner: bool
    unit_defect: float
    orthogonality_defect: float
    tol: float

    def __bool__(self):
        return self.inner


def is_inner(r, tol=1e-7):
    s = spr(r.A)
    if s >= 1.0 - SPR_BOUNDARY_TOL:
        raise SpectralRadiusError(
            f"not a bounded multiplier: spr(A) = {s:.12g}")
    Q = stein_solve(r.A, np.outer(r.b, np.conj(r.b)), side="left",
                    check_spr=False)
    Qc = Q @ r.c
    unit = complex(np.conj(r.c) @ Qc)
    unit_defect = abs(unit - 1.0)
    # orthonormal basis of span{A^g c : |g| >= 1} = span_j A_j K,
    # K the controllability space
    K = _krylov_basis(r.A, r.c, 1e-12)
    shifted = np.hstack([r.A[j] @ K for j in range(r.d)]) if K.size else K
    if shifted.size:
        Qbasis, sing, _ = np.linalg.svd(shifted, full_matrices=False)
        rank = int(np.sum(sing > 1e-12 * sing[0])) if sing.size else 0
        U = Qbasis[:, :rank]
        ortho_defect = float(np.linalg.norm(U.conj().T @ Qc)
                             / max(np.linalg.norm(Qc), 1e-300))
    else:
        ortho_defect = 0.0
    return InnerResult(inner=bool(unit_defect <= tol and ortho_defect <= tol),
                       unit_defect=float(unit_defect),
                       orthogonality_defect=ortho_defect, tol=tol)


# ---------------------------------------------------------------------------
# Outer factor of an NC polynomial
# ---------------------------------------------------------------------------

@dataclass
class FactorizationResult:
    outer: NCPolynomial
    inner: Realization
    residual: float
    q0: float
    outer_certificate: OuterResult
    inner_certificate: InnerResult
    candidates_tried: int = 0
    diagnostics: dict = field(default_factory=dict)


def _pack(words, q0, coeffs):
    x = [q0]
    for w in words:
        x.extend((coeffs[w].real, coeffs[w].imag))
    return np.array(x)


def _unpack(d, words, x):
    table = {(): complex(x[0])}
    for k, w in enumerate(words):
        table[w] = complex(x[1 + 2 * k], x[2 + 2 * k])
    return NCPolynomial(d, table)


def _autocorr_residual(q, target, gammas):
    auto = autocorrelations(q)
    out = []
    for g in gammas:
        diff = auto.get(g, 0.0) - target.get(g, 0.0)
        if g == ():
            out.append(diff.real)
        else:
            out.extend((diff.real, diff.imag))
    return np.array(out)


def autocorrelation_mismatch(p, q):
    """Max absolute difference between the autocorrelation tables."""
    ap, aq = autocorrelations(p), autocorrelations(q)
    return max(
        (abs(ap.get(g, 0.0) - aq.get(g, 0.0)) for g in set(ap) | set(aq)),
        default=0.0)


def outer_factor(p, n_starts=8, seed=0, tol=1e-8, inner_tol=1e-7):
    """Spectral factorization p = (inner) * q with q an NC outer polynomial.

    Solves autocorrelations(q) = autocorrelations(p) over the full support
    of words of length <= deg p with q(0) real, by Levenberg-Marquardt from
    the start q = p plus ``n_starts`` randomized starts; among residual-
    feasible solutions, candidates are taken in decreasing q(0) and the
    first one certified outer with an isometric quotient wins.
    """
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    d, deg = p.d, p.degree
    words = [w for w in words_up_to(d, deg) if w != ()]
    gammas = list(words_up_to(d, deg))
    target = autocorrelations(p)
    norm_p = p.l2_norm()

    def residual(x):
        return _autocorr_residual(_unpack(d, words, x), target, gammas)

    rng = np.random.default_rng(seed)
    p0 = abs(p.coeff(()))
    starts = [_pack(words, p0 if p0 > 0 else norm_p / 2,
                    {w: p.coeff(w) for w in words})]
    # outer factors maximize the constant term, so bias deterministic
    # starts toward mass on the empty word
    for frac in (0.05, 0.2, 0.5):
        starts.append(_pack(words, norm_p,
                            {w: frac * p.coeff(w) for w in words}))
    for _ in range(n_starts):
        jitter = {w: p.coeff(w)
                  + norm_p * 0.5 * (rng.standard_normal()
                                    + 1j * rng.standard_normal())
                  for w in words}
        starts.append(_pack(words, norm_p * rng.uniform(0.3, 1.2), jitter))

    solutions = []
    for x0 in starts:
        fit = least_squares(residual, x0, method="lm", xtol=1e-15,
                            ftol=1e-15, gtol=1e-15, max_nfev=4000)
        res = float(np.linalg.norm(residual(fit.x), np.inf))
        if res > max(tol, 1e-10 * norm_p ** 2):
            continue
        q = _unpack(d, words, fit.x)
        if q.coeff(()).real < 0:
            q = q * (-1.0)
        solutions.append((float(q.coeff(()).real), res, q))

    # dedupe near-identical solutions, largest constant term first
    solutions.sort(key=lambda t: -t[0])
    unique = []
    for q0, res, q in solutions:
        if any(q.allclose(other, tol=1e-6) for _, _, other in unique):
            continue
        unique.append((q0, res, q))

    p_real = from_polynomial(p)
    diagnostics = {"solutions": len(unique), "starts": len(starts)}
    for q0, res, q in unique:
        if q0 <= 0:
            continue
        q_real = minimize(from_polynomial(q))
        outer_cert = is_outer_rational(q_real)
        if not outer_cert:
            continue
        theta = minimize(mul(p_real, invert(from_polynomial(q))))
        inner_cert = is_inner(theta, tol=inner_tol)
        if not inner_cert:
            continue
        return FactorizationResult(
            outer=q, inner=theta, residual=res, q0=q0,
            outer_certificate=outer_cert, inner_certificate=inner_cert,
            candidates_tried=len(unique), diagnostics=diagnostics)
    raise CertificationError(
        "no autocorrelation solution passed the outerness and innerness "
        "certificates", diagnostics=diagnostics)


def factor_identity_table(result, p, extra=4):
    """Taylor table of inner * outer, for checking against p."""
    return taylor_table(
        mul(result.inner, from_polynomial(result.outer)), p.degree + extra)
