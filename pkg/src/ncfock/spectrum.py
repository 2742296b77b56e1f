"""Spectra of bounded rational multipliers: membership, scans, sampling,
variety witnesses, and the spectral-continuity probe.

lambda lies in the spectrum of r(L) iff the minimal realization of
(r - lambda)^{-1} has joint spectral radius >= 1 (with r(0) = lambda an
immediate zero-level singularity).  The scan decides every grid cell by
that deterministic test; random finite-level eigenvalue sampling provides
the complementary lower bound, and sigma_0 / sigma_pm classification of
spectrum cells follows the outerness of r - lambda.

For rational multipliers the spectrum coincides with the essential
spectrum and is connected, so no separate essential-spectrum computation
exists here; the index dichotomy is the sigma_0 / sigma_pm split.  True
sigma_0 points sit exactly on the spr = 1 knife edge, so they usually
surface as ``indeterminate`` cells rather than decisive sigma_0 tags.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NCFockError, SpectralRadiusError
from .factorization import is_outer_rational
from .realization import (
    MatrixTuple,
    add,
    as_matrix_tuple,
    const,
    evaluate,
    from_polynomial,
    invert,
    minimize,
)
from .spectral import SPR_BOUNDARY_TOL, boundary_singularity, spr
from .words import NCPolynomial, words_up_to

CLASS_RESOLVENT = "resolvent"
CLASS_SIGMA0 = "sigma_0"
CLASS_SIGMAPM = "sigma_pm"
CLASS_INDET = "indeterminate"
CLASS_SPECTRUM = "spectrum"          # member tag of an unclassified scan


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------

@dataclass
class SpectrumMembership:
    verdict: str                      # "spectrum" or "resolvent"
    spr_value: float = None           # spr of the minimal inverse realization
    indeterminate: bool = False       # |spr - 1| within the knife-edge band
    zero_level: bool = False          # decided by r(0) = lambda
    witness: MatrixTuple = None       # pencil-singular point, spectrum side

    def __bool__(self):
        return self.verdict == "spectrum"


def _require_bounded(r):
    s = spr(r.A)
    if s >= 1.0 - SPR_BOUNDARY_TOL:
        raise SpectralRadiusError(
            f"not a bounded multiplier: spr(A) = {s:.12g}")
    return s


def _is_constant(r_min):
    return r_min.n == 1 and float(np.max(np.abs(r_min.A))) <= 1e-12


def contains_lambda(r, lam, want_witness=False):
    """Decide lambda in sigma(r(L)) for a minimal bounded realization.

    Returns "spectrum" immediately when r(0) = lambda; otherwise forms the
    minimal realization of (r - lambda)^{-1} (size <= N + 2) and returns
    "resolvent" iff its joint spectral radius is < 1 - 1e-9.  Values within
    1e-9 of 1 keep the spectrum verdict but set ``indeterminate``.
    """
    _require_bounded(r)
    return _membership(r, lam, want_witness)


def _membership(r, lam, want_witness=False):
    lam = complex(lam)
    gamma = r.value_at_zero()
    if abs(gamma - lam) <= 1e-12 * max(1.0, abs(lam)):
        return SpectrumMembership(verdict="spectrum", zero_level=True,
                                  witness=MatrixTuple.zeros(r.d, 1)
                                  if want_witness else None)
    shifted = add(r, const(-lam, r.d))
    inv = minimize(invert(shifted, check=False))
    s = spr(inv.A)
    if s < 1.0 - SPR_BOUNDARY_TOL:
        return SpectrumMembership(verdict="resolvent", spr_value=s)
    witness = None
    if want_witness:
        try:
            witness = boundary_singularity(inv, tol=1e-6)
        except (NCFockError, ArithmeticError):
            witness = None
    return SpectrumMembership(verdict="spectrum", spr_value=s,
                              indeterminate=bool(abs(s - 1.0)
                                                 <= SPR_BOUNDARY_TOL),
                              witness=witness)


# ---------------------------------------------------------------------------
# Grid scan
# ---------------------------------------------------------------------------

@dataclass
class SpectrumScan:
    """Grid-membership result; row 0 is the top of the rectangle (max Im)."""

    rect: tuple                       # (re_min, re_max, im_min, im_max)
    resolution: float
    centers_re: np.ndarray            # increasing, length = columns
    centers_im: np.ndarray            # decreasing, length = rows
    member: np.ndarray                # bool, rows x columns
    classes: np.ndarray               # object array of class tags
    classified: bool = False

    def member_points(self):
        """Complex centers of the cells marked spectrum."""
        rows, cols = np.nonzero(self.member)
        return self.centers_re[cols] + 1j * self.centers_im[rows]

    def center(self, row, col):
        return complex(self.centers_re[col], self.centers_im[row])


def _cell_decision(r_min, lam, classify):
    try:
        membership = _membership(r_min, lam)
    except NCFockError:
        return False, CLASS_INDET
    if not membership:
        return False, CLASS_RESOLVENT
    if membership.indeterminate:
        return True, CLASS_INDET
    if not classify:
        return True, CLASS_SPECTRUM
    shifted = add(r_min, const(-lam, r_min.d))
    try:
        outer = is_outer_rational(shifted)
    except NCFockError:
        return True, CLASS_INDET
    if outer.indeterminate:
        return True, CLASS_INDET
    return True, (CLASS_SIGMA0 if outer.outer else CLASS_SIGMAPM)


def grid_scan(r, rect, resolution, classify=True, jobs=None):
    """Scan a rectangle of the complex plane for spectrum membership.

    Each cell center gets the deterministic resolvent test; spectrum cells
    are tagged sigma_0 when r - lambda is outer (index 0) and sigma_pm when
    it has an inner factor.  Cell errors and knife-edge values are tagged
    indeterminate.  A constant multiplier (spectrum = one point) marks
    exactly the cell containing its value.
    """
    re_min, re_max, im_min, im_max = map(float, rect)
    if re_max <= re_min or im_max <= im_min or resolution <= 0:
        raise ValueError("empty scan rectangle")
    cols = int(round((re_max - re_min) / resolution))
    rows = int(round((im_max - im_min) / resolution))
    centers_re = re_min + (np.arange(cols) + 0.5) * resolution
    centers_im = im_max - (np.arange(rows) + 0.5) * resolution
    member = np.zeros((rows, cols), dtype=bool)
    classes = np.full((rows, cols), CLASS_RESOLVENT, dtype=object)

    r_min = minimize(r)
    _require_bounded(r_min)
    if _is_constant(r_min):
        mu = r_min.value_at_zero()
        col = int(np.floor((mu.real - re_min) / resolution))
        row = int(np.floor((im_max - mu.imag) / resolution))
        if 0 <= row < rows and 0 <= col < cols:
            member[row, col] = True
            classes[row, col] = CLASS_SIGMAPM
        return SpectrumScan(rect=(re_min, re_max, im_min, im_max),
                            resolution=resolution, centers_re=centers_re,
                            centers_im=centers_im, member=member,
                            classes=classes, classified=classify)

    cells = [(i, j) for i in range(rows) for j in range(cols)]

    def work(cell):
        i, j = cell
        lam = complex(centers_re[j], centers_im[i])
        return _cell_decision(r_min, lam, classify)

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, cells))
    else:
        results = [work(cell) for cell in cells]
    for (i, j), (is_member, tag) in zip(cells, results):
        member[i, j] = is_member
        classes[i, j] = tag
    return SpectrumScan(rect=(re_min, re_max, im_min, im_max),
                        resolution=resolution, centers_re=centers_re,
                        centers_im=centers_im, member=member, classes=classes,
                        classified=classify)


# ---------------------------------------------------------------------------
# Finite-level eigenvalue sampling
# ---------------------------------------------------------------------------

def _haar_unitary(rng, n):
    gauss = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(gauss)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_row_contraction(rng, d, n, kind="gaussian"):
    """Random point of the closed row ball.

    kind "co-isometry": an exact row co-isometry (slice of a Haar unitary),
    row norm exactly 1.  kind "unitary": Haar unitaries times a random
    row-contractive diagonal scaling with a boundary-biased radius; their
    eigenvalues sit on circles, which covers the boundary of spectra well.
    kind "single": one scaled Haar unitary component, the rest zero.
    kind "gaussian": a uniform random direction with boundary-biased radius.
    """
    if kind == "co-isometry":
        gauss = rng.standard_normal((n * d, n * d)) \
            + 1j * rng.standard_normal((n * d, n * d))
        Q, _ = np.linalg.qr(gauss)
        block = Q[:n, :]
        return MatrixTuple(np.stack(
            [block[:, j * n:(j + 1) * n] for j in range(d)]))
    radius = rng.random() ** (1.0 / (2.0 * d * n * n))
    if kind == "unitary":
        weights = rng.random(d)
        scales = radius * np.sqrt(weights / weights.sum())
        return MatrixTuple(np.stack(
            [scales[j] * _haar_unitary(rng, n) for j in range(d)]))
    if kind == "single":
        j_star = int(rng.integers(d))
        X = np.zeros((d, n, n), dtype=complex)
        X[j_star] = radius * _haar_unitary(rng, n)
        return MatrixTuple(X)
    X = rng.standard_normal((d, n, n)) + 1j * rng.standard_normal((d, n, n))
    norm = np.linalg.norm(np.hstack(list(X)), 2)
    return MatrixTuple(X * (radius / norm))


_SAMPLE_KINDS = ("co-isometry", "single", "unitary", "gaussian")


def finite_spectrum_sample(r, level_max=None, samples=1000, seed=0):
    """Eigenvalues of r(Z) over random closed-ball points of levels
    1..level_max (default: minimal size + 2).  Returns (eigenvalues, levels).

    Draws cycle through exact-boundary co-isometries, scaled Haar unitaries
    (single component and joint), and scaled Gaussian directions.
    """
    r_min = minimize(r)
    _require_bounded(r_min)
    if level_max is None:
        level_max = r_min.n + 2
    rng = np.random.default_rng(seed)
    per_level = max(samples // level_max, 1)
    eigs, levels = [], []
    for n in range(1, level_max + 1):
        for k in range(per_level):
            kind = _SAMPLE_KINDS[k % len(_SAMPLE_KINDS)]
            Z = random_row_contraction(rng, r_min.d, n, kind=kind)
            value = evaluate(r_min, Z)
            for eig in np.linalg.eigvals(value):
                eigs.append(complex(eig))
                levels.append(n)
    return np.array(eigs, dtype=complex), np.array(levels, dtype=int)


# ---------------------------------------------------------------------------
# Variety witnesses
# ---------------------------------------------------------------------------

@dataclass
class VarietyWitness:
    Z: MatrixTuple
    y: np.ndarray
    residual: float
    level: int


def _eval_any(f, Z):
    if isinstance(f, NCPolynomial):
        return f.evaluate(Z)
    return evaluate(f, Z)


def witness_residual(f, Z, y):
    """||y* f(Z)|| for a unit-normalized left vector y."""
    Z = as_matrix_tuple(Z)
    y = np.asarray(y, dtype=complex).reshape(-1)
    y = y / np.linalg.norm(y)
    return float(np.linalg.norm(np.conj(y) @ _eval_any(f, Z)))


def certify_witness(f, Z, y, tol=1e-8):
    """Validate a singularity-locus pair (Z, y); raises on failure."""
    Z = as_matrix_tuple(Z)
    if Z.row_norm() > 1.0 + 1e-9:
        raise ValueError(f"witness point outside the closed ball "
                         f"(row norm {Z.row_norm():.6g})")
    res = witness_residual(f, Z, y)
    if res > tol:
        raise ValueError(f"witness residual {res:.3g} exceeds {tol:g}")
    return VarietyWitness(Z=Z, y=np.asarray(y, dtype=complex),
                          residual=res, level=Z.n)


def _project_ball(X):
    norm = np.linalg.norm(np.hstack(list(X)), 2)
    return X if norm <= 1.0 else X / norm


def _sigma_min(f, X):
    return float(np.linalg.svd(_eval_any(f, MatrixTuple(X)),
                               compute_uv=False)[-1])


def variety_witness_search(f, level, attempts=8, seed=0, iters=50,
                           tol=1e-8):
    """Best-effort search for (Z, y) with y* f(Z) = 0 at a fixed level.

    Projected gradient descent on sigma_min(f(Z)) over the closed row ball
    (finite-difference gradient, backtracking line search), followed by a
    Gauss-Newton polish of (Z, y) jointly.  Failure to find a witness is not
    a proof of emptiness; the certified negative route is the outerness test.
    """
    d = f.d
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(attempts, 1)):
        Z = random_row_contraction(rng, d, level).X
        # -- projected gradient phase
        step = 0.2
        value = _sigma_min(f, Z)
        for _ in range(iters):
            grad = np.zeros_like(Z)
            h = 1e-6 * max(1.0, np.linalg.norm(Z.ravel(), np.inf))
            for idx in np.ndindex(*Z.shape):
                for part, delta in ((1.0, h), (1.0j, h)):
                    Zp = Z.copy()
                    Zp[idx] += part * delta
                    diff = (_sigma_min(f, Zp) - value) / delta
                    if part == 1.0:
                        grad[idx] += diff
                    else:
                        grad[idx] += 1j * diff
            gnorm = np.linalg.norm(grad.ravel())
            if gnorm < 1e-14 or value <= tol * 0.1:
                break
            improved = False
            t = step
            for _ in range(20):
                cand = _project_ball(Z - t * grad / gnorm)
                cand_value = _sigma_min(f, cand)
                if cand_value < value - 1e-4 * t * gnorm:
                    Z, value, improved = cand, cand_value, True
                    step = min(t * 2.0, 0.5)
                    break
                t /= 2.0
            if not improved:
                break
        # -- Gauss-Newton polish on (Z, y)
        Z, value = _polish_witness(f, Z, tol)
        if best is None or value < best[1]:
            best = (Z, value)
        if value <= tol:
            break
    Z, value = best
    if value > tol:
        return None
    point = MatrixTuple(Z)
    F = _eval_any(f, point)
    _, _, Vh = np.linalg.svd(F.conj().T)
    y = np.conj(Vh[-1])
    return VarietyWitness(Z=point, y=y, residual=witness_residual(f, point, y),
                          level=level)


def _polish_witness(f, Z, tol, steps=60):
    """Least-squares polish of (Z, y) jointly on the residual
    [y* f(Z), |y|^2 - 1], keeping Z inside the closed ball."""
    from scipy.optimize import least_squares

    shape = Z.shape
    n = shape[1]
    nz = Z.size

    F0 = _eval_any(f, MatrixTuple(Z))
    _, _, Vh = np.linalg.svd(F0.conj().T)
    y0 = np.conj(Vh[-1])

    def split(x):
        Zc = (x[:nz] + 1j * x[nz:2 * nz]).reshape(shape)
        y = x[2 * nz:2 * nz + n] + 1j * x[2 * nz + n:]
        return Zc, y

    def join(Zc, y):
        return np.concatenate([Zc.ravel().real, Zc.ravel().imag,
                               y.real, y.imag])

    def residual(x):
        Zc, y = split(x)
        Zc = _project_ball(Zc)
        row = np.conj(y) @ _eval_any(f, MatrixTuple(Zc))
        return np.concatenate([row.real, row.imag,
                               [np.vdot(y, y).real - 1.0]])

    fit = least_squares(residual, join(Z, y0), method="trf", xtol=1e-15,
                        ftol=1e-15, gtol=1e-15, max_nfev=steps)
    Zp, _ = split(fit.x)
    Zp = _project_ball(Zp)
    return Zp, _sigma_min(f, Zp)


# ---------------------------------------------------------------------------
# Continuity probe (Theorem-B diagnostic)
# ---------------------------------------------------------------------------

def hausdorff_distance(points_a, points_b):
    """Hausdorff distance between two finite sets of complex points."""
    a = np.asarray(points_a, dtype=complex).ravel()
    b = np.asarray(points_b, dtype=complex).ravel()
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return float("inf")
    dist = np.abs(a[:, None] - b[None, :])
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


@dataclass
class ContinuityProbe:
    scales: tuple
    distances: list
    rect: tuple
    resolution: float
    details: dict = field(default_factory=dict)


def continuity_probe(r, rect, resolution, scales=(1e-1, 1e-2, 1e-3),
                     degree=3, seed=0, classify=False, jobs=None):
    """Hausdorff distance between the scan of r and scans of perturbed
    copies, one per noise scale.

    Each perturbation adds independent uniform complex noise of modulus
    <= eps to every Taylor coefficient of word length <= degree, then
    re-realizes and re-minimizes.  Distances are reported as a diagnostic
    table; spectral continuity predicts decay but no rate.
    """
    r_min = minimize(r)
    base = grid_scan(r_min, rect, resolution, classify=classify, jobs=jobs)
    base_points = base.member_points()
    rng = np.random.default_rng(seed)
    words = list(words_up_to(r_min.d, degree))
    distances = []
    for eps in scales:
        noise = {}
        for w in words:
            radius = eps * np.sqrt(rng.random())
            phase = 2.0 * np.pi * rng.random()
            noise[w] = radius * np.exp(1j * phase)
        if eps == 0:
            noise = {w: 0.0 for w in words}
        perturbed = minimize(add(r_min, from_polynomial(
            NCPolynomial(r_min.d, noise))))
        scan = grid_scan(perturbed, rect, resolution, classify=classify,
                         jobs=jobs)
        distances.append(hausdorff_distance(base_points,
                                            scan.member_points()))
    return ContinuityProbe(scales=tuple(scales), distances=distances,
                           rect=tuple(map(float, rect)),
                           resolution=float(resolution))


# ---------------------------------------------------------------------------
# Artifact formats: CSV and PGM
# ---------------------------------------------------------------------------

def _fmt15(x):
    return f"{x:.15g}"


def scan_to_csv(scan):
    """Rows ``re, im, member, class`` in row-major top-left order."""
    lines = ["re,im,member,class"]
    rows, cols = scan.member.shape
    for i in range(rows):
        for j in range(cols):
            lines.append(",".join([
                _fmt15(scan.centers_re[j]), _fmt15(scan.centers_im[i]),
                "1" if scan.member[i, j] else "0", str(scan.classes[i, j]),
            ]))
    return "\n".join(lines) + "\n"


def scan_to_pgm(scan):
    """Binary 8-bit PGM: spectrum 0, resolvent 255, indeterminate 128."""
    rows, cols = scan.member.shape
    img = np.full((rows, cols), 255, dtype=np.uint8)
    img[scan.member] = 0
    img[scan.classes == CLASS_INDET] = 128
    header = f"P5\n{cols} {rows}\n255\n".encode("ascii")
    return header + img.tobytes()


def samples_to_csv(eigs, levels):
    lines = ["re,im,level"]
    for eig, level in zip(eigs, levels):
        lines.append(",".join([_fmt15(eig.real), _fmt15(eig.imag),
                               str(int(level))]))
    return "\n".join(lines) + "\n"
