"""Joint spectral radius, Stein equations, and boundary singular points.

The completely positive map of a tuple A is Ad_{A,A*}(P) = sum_j A_j P A_j*.
Its matrization M = sum_j conj(A_j) kron A_j satisfies vec(Ad(P)) = M vec(P)
under column-stacking vec, and the joint (outer) spectral radius is

    spr(A) = lim_k || Ad^(k)(I) ||^(1/2k) = sqrt(rho(M)).

Two routes are implemented: ``matrized`` (dense eigenvalues of M, guarded
against spuriously large eigenvalues of near-nilpotent M) and ``iterate``
(scaling-normalized repeated squaring of M, which evaluates the defining
norm limit at K = 2^48 applications).
"""

from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatchError,
    JointlyNilpotentError,
    SpectralRadiusError,
)
from .realization import MatrixTuple, Realization

SPR_BOUNDARY_TOL = 1e-9


# ---------------------------------------------------------------------------
# Vectorization calculus
# ---------------------------------------------------------------------------

def vec(Z):
    """Column-stacking vectorization: vec([[1,2],[3,4]]) = (1, 3, 2, 4)."""
    return np.asarray(Z, dtype=complex).reshape(-1, order="F")


def unvec(z, nrows, ncols=None):
    if ncols is None:
        ncols = nrows
    return np.asarray(z, dtype=complex).reshape((nrows, ncols), order="F")


def matrize(pairs):
    """Matrization of X -> sum_j A_j X B_j, namely sum_j B_j^T kron A_j."""
    pairs = [(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))
             for A, B in pairs]
    A0, B0 = pairs[0]
    out = np.zeros((A0.shape[0] * B0.shape[1], A0.shape[1] * B0.shape[0]),
                   dtype=complex)
    for A, B in pairs:
        out += np.kron(B.T, A)
    return out


def _as_tuple_array(A):
    if isinstance(A, Realization):
        A = A.A
    elif isinstance(A, MatrixTuple):
        A = A.X
    A = np.asarray(A, dtype=complex)
    if A.ndim == 2:
        A = A[None, :, :]
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise DimensionMismatchError("expected a d x n x n tuple of matrices")
    return A


class CPMap:
    """The completely positive map Ad_{A,A*} with a cached matrization."""

    def __init__(self, A):
        self.A = _as_tuple_array(A)

    @property
    def n(self):
        return self.A.shape[1]

    def __call__(self, P):
        P = np.asarray(P, dtype=complex)
        return np.einsum("jab,bc,jdc->ad", self.A, P, np.conj(self.A))

    def adjoint(self, P):
        """The dual map P -> sum_j A_j* P A_j."""
        P = np.asarray(P, dtype=complex)
        return np.einsum("jba,bc,jcd->ad", np.conj(self.A), P, self.A)

    @cached_property
    def matrization(self):
        return matrize([(Aj, np.conj(Aj).T) for Aj in self.A])

    @cached_property
    def adjoint_matrization(self):
        return matrize([(np.conj(Aj).T, Aj) for Aj in self.A])


# ---------------------------------------------------------------------------
# Joint spectral radius
# ---------------------------------------------------------------------------

def _squared_power_estimate(M, squarings):
    """rho(M) estimate from || M^K || at K = 2^squarings, with per-step
    normalization and an accumulated log so nothing over- or underflows.

    Per-step scaling uses the Frobenius norm (any submultiplicative norm
    washes out in the K-th root); the final norm of Ad^(K)(I) is the
    spectral norm of the unvectorized image, faithful to the definition.
    Exactly nilpotent powers return 0.
    """
    norm = float(np.linalg.norm(M))
    if norm == 0:
        return 0.0
    B = M / norm
    log_acc = float(np.log(norm))
    for _ in range(squarings):
        B = B @ B
        s = float(np.linalg.norm(B))
        if s == 0:
            return 0.0
        if not np.isfinite(s):
            raise ArithmeticError("power estimate lost finiteness")
        B /= s
        log_acc = 2.0 * log_acc + float(np.log(s))
    K = float(2 ** squarings)
    n = int(round(np.sqrt(M.shape[0])))
    image = unvec(B @ vec(np.eye(n)), n)
    wnorm = float(np.linalg.norm(image, 2))
    if wnorm == 0:
        return 0.0
    return float(np.exp((log_acc + np.log(wnorm)) / K))


def _dominant_abs_eigenvalue(M):
    if M.shape[0] <= 400:
        return float(np.max(np.abs(np.linalg.eigvals(M))))
    # power iteration; the dominant eigenvalue of a CP matrization is real
    # and nonnegative, so plain normalized iteration is well-posed
    rng = np.random.default_rng(0)
    n = int(round(np.sqrt(M.shape[0])))
    v = vec(np.eye(n)) + 1e-3 * rng.standard_normal(M.shape[0])
    v /= np.linalg.norm(v)
    rho_prev = 0.0
    for _ in range(20000):
        w = M @ v
        rho = np.linalg.norm(w)
        if rho == 0:
            return 0.0
        v = w / rho
        if abs(rho - rho_prev) <= 1e-13 * max(rho, 1e-300):
            break
        rho_prev = rho
    return float(rho)


def spr(A, method="matrized"):
    """Joint (outer) spectral radius of a matrix tuple.

    method "matrized": sqrt of the classical spectral radius of
    sum_j conj(A_j) kron A_j.  method "iterate": sqrt of the norm-limit
    estimate from repeated squaring.  Jointly nilpotent tuples return 0.
    """
    A = _as_tuple_array(A)
    M = CPMap(A).matrization
    norm = np.linalg.norm(M, 2)
    if norm == 0:
        return 0.0
    if method == "iterate":
        return float(np.sqrt(_squared_power_estimate(M, 48)))
    if method != "matrized":
        raise ValueError(f"unknown spr method {method!r}")
    # probe for (near-)nilpotency first: dense eigenvalues of a nilpotent
    # matrix come back at roundoff^(1/n^2) scale, far above the truth
    probe_squarings = max(int(np.ceil(np.log2(max(M.shape[0], 4)))) + 3, 8)
    rho_probe = _squared_power_estimate(M, probe_squarings)
    if rho_probe < 1e-8 * norm:
        return float(np.sqrt(max(rho_probe, 0.0)))
    rho = _dominant_abs_eigenvalue(M)
    return float(np.sqrt(min(rho, rho_probe) if rho < 0.05 * norm else rho))


# ---------------------------------------------------------------------------
# Stein equations
# ---------------------------------------------------------------------------

def stein_solve(A, Q0, side="right", check_spr=True):
    """Solve the Stein equation of the CP map of A.

    side "right": P with P - sum_j A_j P A_j* = Q0  (P = sum_m Ad^(m)(Q0))
    side "left":  Q with Q - sum_j A_j* Q A_j = Q0

    Solved through the matrized linear system with iterative refinement;
    requires spr(A) < 1 - 1e-9.
    """
    A = _as_tuple_array(A)
    Q0 = np.asarray(Q0, dtype=complex)
    if Q0.shape != (A.shape[1], A.shape[1]):
        raise DimensionMismatchError("Q0 must be n x n")
    if check_spr:
        s = spr(A)
        if s >= 1.0 - SPR_BOUNDARY_TOL:
            raise SpectralRadiusError(
                f"Stein equation needs spr(A) < 1 (got spr = {s:.12g})")
    cp = CPMap(A)
    M = cp.matrization if side == "right" else cp.adjoint_matrization
    if side not in ("right", "left"):
        raise ValueError(f"unknown side {side!r}")
    K = np.eye(M.shape[0], dtype=complex) - M
    q = vec(Q0)
    x = np.linalg.solve(K, q)
    for _ in range(2):
        resid = q - K @ x
        if np.linalg.norm(resid) <= 1e-16 * np.linalg.norm(q):
            break
        x = x + np.linalg.solve(K, resid)
    P = unvec(x, A.shape[1])
    if np.linalg.norm(Q0 - Q0.conj().T) <= 1e-12 * max(np.linalg.norm(Q0), 1e-300):
        P = (P + P.conj().T) / 2.0
    return P


# ---------------------------------------------------------------------------
# Similarity to a strict row contraction (multi-variable Rota-Strang)
# ---------------------------------------------------------------------------

def row_norm(A):
    A = _as_tuple_array(A)
    return float(np.linalg.norm(np.hstack(list(A)), 2))


def similarity_to_contraction(A, margin):
    """Invertible S and W = S^{-1} A S with row_norm(W) <= spr(A) + margin.

    With tau = spr(A) + margin, the Gram matrix G solving
    G - Ad_{A/tau}(G) = I gives S = G^{1/2}; then
    sum_j W_j W_j* = tau^2 (I - G^{-1}), strictly below tau^2.
    As margin -> 0 the row norm approaches spr(A).
    """
    A = _as_tuple_array(A)
    s = spr(A)
    if s >= 1.0:
        raise SpectralRadiusError(
            f"similarity to a contraction needs spr(A) < 1 (got {s:.12g})")
    if not (0.0 < margin < 1.0 - s):
        raise ValueError("margin must lie in (0, 1 - spr(A))")
    tau = s + margin
    G = stein_solve(A / tau, np.eye(A.shape[1], dtype=complex),
                    side="right", check_spr=False)
    G = (G + G.conj().T) / 2.0
    w, V = np.linalg.eigh(G)
    w = np.maximum(w, 1e-300)
    S = (V * np.sqrt(w)) @ V.conj().T
    S_inv = (V / np.sqrt(w)) @ V.conj().T
    W = np.stack([S_inv @ Aj @ S for Aj in A])
    return S, MatrixTuple(W)


# ---------------------------------------------------------------------------
# Boundary singular points
# ---------------------------------------------------------------------------

def _perron_eigenmatrix(M, n):
    """Hermitian Perron eigenmatrix of the CP matrization M, sign-normalized."""
    w, V = np.linalg.eig(M)
    rho = np.max(np.abs(w))
    candidates = np.where(np.abs(w) >= (1.0 - 1e-6) * rho)[0]
    idx = candidates[np.argmax(w[candidates].real)]
    P = unvec(V[:, idx], n)
    herm = (P + P.conj().T) / 2.0
    anti = (P - P.conj().T) / 2.0j
    P = herm if np.linalg.norm(herm) >= np.linalg.norm(anti) else anti
    evals = np.linalg.eigvalsh(P)
    if evals[np.argmax(np.abs(evals))] < 0:
        P = -P
    return P / np.linalg.norm(P)


def _co_isometry_point(A, rho):
    """Singular point for a tuple whose Perron fixed point is positive definite."""
    n = A.shape[1]
    P = _perron_eigenmatrix(CPMap(A).matrization, n)
    w, V = np.linalg.eigh(P)
    trace = float(np.trace(P).real)
    threshold = 1e-9 * max(trace, float(w[-1]))
    if w[0] > threshold:
        sqrtP = (V * np.sqrt(w)) @ V.conj().T
        inv_sqrtP = (V / np.sqrt(w)) @ V.conj().T
        Y = np.stack([inv_sqrtP @ (Aj / rho) @ sqrtP for Aj in A])
        return np.conj(Y) / rho, None
    keep = V[:, w > threshold]
    if keep.shape[1] == 0:
        keep = V[:, [int(np.argmax(w))]]
    return None, keep


def boundary_singularity(r, tol=1e-8):
    """A point Z with ||Z|| = 1/spr(A) where the minimal pencil is singular.

    Accepts a Realization (only its A-tuple matters) or a raw tuple.  The
    construction finds the Perron fixed point P >= 0 of Ad_{A,A*}/spr^2; if
    P is positive definite, Y = P^{-1/2} (A/spr) P^{1/2} is a row
    co-isometry and Z = conj(Y)/spr kills the pencil.  A singular P is an
    invariant subspace: compress and recurse, padding the recursive point
    with zeros.  Jointly nilpotent tuples (polynomials) are rejected.
    """
    A = _as_tuple_array(r)
    rho = spr(A)
    scale = max(row_norm(A), 1.0)
    if rho <= 1e-12 * scale:
        raise JointlyNilpotentError(
            "spr(A) = 0: the tuple is jointly nilpotent (a polynomial), "
            "whose pencil is everywhere invertible")

    def build(Asub, depth):
        rho_sub = spr(Asub)
        Z, keep = _co_isometry_point(Asub, rho_sub)
        if Z is not None:
            return Z
        if depth <= 0 or keep.shape[1] >= Asub.shape[1]:
            raise ArithmeticError("boundary singularity recursion failed")
        inner = build(np.stack([keep.conj().T @ Aj @ keep for Aj in Asub]),
                      depth - 1)
        m = inner.shape[1]
        Z = np.zeros((Asub.shape[0], Asub.shape[1], Asub.shape[1]),
                     dtype=complex)
        Z[:, :m, :m] = inner
        return Z

    Z = build(A, A.shape[1])
    point = MatrixTuple(Z)
    L = np.eye(A.shape[1] * point.n, dtype=complex)
    for j in range(A.shape[0]):
        L -= np.kron(A[j], point[j])
    sigma_min = float(np.linalg.svd(L, compute_uv=False)[-1])
    if abs(point.row_norm() - 1.0 / rho) > tol or sigma_min > tol:
        raise ArithmeticError(
            f"boundary singularity certificate failed at tol {tol:g}: "
            f"row_norm = {point.row_norm():.12g}, 1/spr = {1.0 / rho:.12g}, "
            f"sigma_min(L) = {sigma_min:.3g}")
    return point
