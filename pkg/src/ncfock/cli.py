"""Command-line front end: parser -> realization -> analyses, with JSON/CSV/PGM
artifacts.

Every subcommand takes either ``-d N "expression"`` or ``--realization
path.json`` (exactly one input source).  Randomized subcommands take
``--seed`` (default 0) and are byte-deterministic for a fixed seed.  Module
errors exit 1 with a machine-readable JSON object {"error": {"code",
"message"}}; usage errors exit 2.

Report numbers are printed with 15 significant digits.  Realization JSON
files keep full float precision so that feeding ``realize`` output back
through ``--realization`` reproduces analyses byte-identically.
"""

import argparse
import json
import sys
from math import isinf

import numpy as np

from . import expr as ex
from . import factorization as fz
from . import fock
from . import realization as rz
from . import spectral
from . import spectrum as sp
from .errors import NCFockError


def _round15(obj):
    if isinstance(obj, float):
        if isinf(obj) or np.isnan(obj):
            return repr(obj)
        return float(f"{obj:.15g}")
    if isinstance(obj, complex):
        return {"re": _round15(obj.real), "im": _round15(obj.imag)}
    if isinstance(obj, dict):
        return {k: _round15(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round15(v) for v in obj]
    return obj


def _emit(obj, path=None):
    text = json.dumps(_round15(obj), indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_exact(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _load_realization(args):
    if args.realization:
        if args.expression is not None:
            raise NCFockError("give an expression or --realization, not both")
        with open(args.realization) as handle:
            return rz.realization_from_json(json.load(handle))
    if args.expression is None:
        raise NCFockError("an expression (with -d) or --realization is required")
    if args.d is None:
        raise NCFockError("-d is required with an expression")
    return rz.from_expression(args.expression, args.d)


def _ast_json(node):
    if isinstance(node, ex.Scalar):
        return {"scalar": {"re": node.value.real, "im": node.value.imag}}
    if isinstance(node, ex.Variable):
        return {"variable": node.index}
    if isinstance(node, ex.Sum):
        return {"sum": [_ast_json(t) for t in node.terms]}
    if isinstance(node, ex.Product):
        return {"product": [_ast_json(f) for f in node.factors]}
    if isinstance(node, ex.Inverse):
        return {"inverse": _ast_json(node.operand)}
    if isinstance(node, ex.Negate):
        return {"negate": _ast_json(node.operand)}
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_parse(args):
    node = ex.parse(args.expression, args.d)
    out = {"formatted": ex.format_expr(node), "ast": _ast_json(node)}
    try:
        poly = ex.as_polynomial(node, args.d)
        out["polynomial"] = poly.to_json_obj()
        out["degree"] = poly.degree
    except NCFockError:
        out["polynomial"] = None
    _emit(out, args.out)
    return 0


def _cmd_realize(args):
    r = _load_realization(args)
    if args.minimize:
        r = rz.minimize(r, tol=args.tol)
    _emit_exact(rz.realization_to_json(r), args.out)
    return 0


def _cmd_eval(args):
    r = _load_realization(args)
    with open(args.point) as handle:
        Z = rz.matrix_tuple_from_json(json.load(handle))
    value = rz.evaluate(r, Z)
    _emit({"value": [[{"re": v.real, "im": v.imag} for v in row]
                     for row in value.tolist()]}, args.out)
    return 0


def _cmd_spr(args):
    r = _load_realization(args)
    r_min = rz.minimize(r)
    _emit({"spr": spectral.spr(r_min.A, method=args.method),
           "n_minimal": r_min.n}, args.out)
    return 0


def _cmd_norm(args):
    r = rz.minimize(_load_realization(args))
    _emit({"h2_norm": fock.h2_norm(r)}, args.out)
    return 0


def _membership_json(result):
    out = {
        "verdict": {"in": "in_H2", "not_in": "not_in_H2",
                    "boundary": "boundary_indeterminate"}[result.verdict],
        "in_h2": result.in_h2,
        "spr": result.spr,
        "radius": "inf" if isinf(result.radius) else result.radius,
    }
    if result.h2_norm is not None:
        out["h2_norm"] = result.h2_norm
    if result.witness is not None:
        out["witness"] = rz.matrix_tuple_to_json(result.witness)
        out["witness_row_norm"] = result.witness_row_norm
        out["witness_sigma_min"] = result.witness_sigma_min
    return out


def _cmd_member(args):
    r = rz.minimize(_load_realization(args))
    _emit(_membership_json(fock.is_in_fock(r)), args.out)
    return 0


def _cmd_kernel(args):
    r = rz.minimize(_load_realization(args))
    kernel = fock.kernel_from_realization(r)
    _emit({
        "Z": rz.matrix_tuple_to_json(kernel.Z),
        "y": [{"re": v.real, "im": v.imag} for v in kernel.y.tolist()],
        "v": [{"re": v.real, "im": v.imag} for v in kernel.v.tolist()],
        "row_norm": kernel.Z.row_norm(),
    }, args.out)
    return 0


def _cmd_factor(args):
    node = ex.parse(args.expression, args.d)
    poly = ex.as_polynomial(node, args.d)
    result = fz.outer_factor(poly, n_starts=args.starts, seed=args.seed)
    _emit({
        "outer": result.outer.to_json_obj(),
        "inner": rz.realization_to_json(result.inner),
        "q0": result.q0,
        "q0_squared": result.q0 ** 2,
        "autocorrelation_residual": result.residual,
        "outer_certified": bool(result.outer_certificate),
        "outer_spr_inverse": result.outer_certificate.spr_inverse,
        "inner_certified": bool(result.inner_certificate),
        "inner_unit_defect": result.inner_certificate.unit_defect,
        "inner_orthogonality_defect":
            result.inner_certificate.orthogonality_defect,
    }, args.out)
    return 0


def _cmd_outer_test(args):
    r = rz.minimize(_load_realization(args))
    cert = fz.is_outer_rational(r)
    _emit({"outer": cert.outer, "spr_inverse": cert.spr_inverse,
           "indeterminate": cert.indeterminate, "reason": cert.reason},
          args.out)
    return 0


def _cmd_inner_test(args):
    r = rz.minimize(_load_realization(args))
    cert = fz.is_inner(r, tol=args.tol)
    _emit({"inner": cert.inner, "unit_defect": cert.unit_defect,
           "orthogonality_defect": cert.orthogonality_defect,
           "tol": cert.tol}, args.out)
    return 0


def _cmd_boundary_sing(args):
    r = rz.minimize(_load_realization(args))
    Z = spectral.boundary_singularity(r, tol=args.tol)
    L = rz.pencil(r, Z)
    _emit({
        "Z": rz.matrix_tuple_to_json(Z),
        "row_norm": Z.row_norm(),
        "one_over_spr": 1.0 / spectral.spr(r.A),
        "sigma_min": float(np.linalg.svd(L, compute_uv=False)[-1]),
    }, args.out)
    return 0


def _parse_rect(text):
    parts = [float(t) for t in text.split(",")]
    if len(parts) != 4:
        raise NCFockError("--rect needs re_min,re_max,im_min,im_max")
    return tuple(parts)


def _cmd_spectrum_scan(args):
    r = rz.minimize(_load_realization(args))
    scan = sp.grid_scan(r, _parse_rect(args.rect), args.res,
                        classify=not args.no_classify, jobs=args.jobs)
    prefix = args.out or "spectrum"
    with open(prefix + ".csv", "w") as handle:
        handle.write(sp.scan_to_csv(scan))
    with open(prefix + ".pgm", "wb") as handle:
        handle.write(sp.scan_to_pgm(scan))
    _emit({"cells": int(scan.member.size),
           "members": int(scan.member.sum()),
           "csv": prefix + ".csv", "pgm": prefix + ".pgm"})
    return 0


def _cmd_spectrum_sample(args):
    r = rz.minimize(_load_realization(args))
    eigs, levels = sp.finite_spectrum_sample(
        r, level_max=args.levels, samples=args.samples, seed=args.seed)
    text = sp.samples_to_csv(eigs, levels)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
        _emit({"samples": int(len(eigs)), "csv": args.out})
    else:
        sys.stdout.write(text)
    return 0


def _cmd_variety_search(args):
    if args.expression is not None and args.d is not None:
        node = ex.parse(args.expression, args.d)
        try:
            f = ex.as_polynomial(node, args.d)
        except NCFockError:
            f = rz.minimize(rz.from_ast(node, args.d))
    else:
        f = rz.minimize(_load_realization(args))
    witness = sp.variety_witness_search(
        f, level=args.level, attempts=args.attempts, seed=args.seed,
        tol=args.tol)
    if witness is None:
        _emit({"found": False, "level": args.level}, args.out)
    else:
        _emit({
            "found": True, "level": witness.level,
            "Z": rz.matrix_tuple_to_json(witness.Z),
            "y": [{"re": v.real, "im": v.imag} for v in witness.y.tolist()],
            "residual": witness.residual,
        }, args.out)
    return 0


def _cmd_continuity_probe(args):
    r = rz.minimize(_load_realization(args))
    scales = tuple(float(s) for s in args.scales.split(","))
    probe = sp.continuity_probe(r, _parse_rect(args.rect), args.res,
                                scales=scales, seed=args.seed,
                                jobs=args.jobs)
    _emit({"scales": list(probe.scales), "distances": list(probe.distances),
           "rect": list(probe.rect), "resolution": probe.resolution},
          args.out)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_source_args(sub, expression=True):
    if expression:
        sub.add_argument("expression", nargs="?", default=None,
                         help="NC rational expression over z1..zd")
    sub.add_argument("-d", "--vars", dest="d", type=int, default=None,
                     help="number of NC variables")
    sub.add_argument("--realization", default=None,
                     help="path to a realization JSON file")
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for randomized procedures")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ncfock",
        description="NC rational functions in the Fock space: realizations, "
                    "membership, factorization, spectra.")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("parse", help="parse and echo an expression")
    s.add_argument("expression")
    s.add_argument("-d", "--vars", dest="d", type=int, required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(func=_cmd_parse)

    s = subs.add_parser("realize", help="compile to a realization JSON")
    _add_source_args(s)
    s.add_argument("--minimize", action="store_true")
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(func=_cmd_realize)

    s = subs.add_parser("eval", help="evaluate at a matrix tuple JSON")
    _add_source_args(s)
    s.add_argument("--point", required=True,
                   help="path to a matrix tuple JSON file")
    s.set_defaults(func=_cmd_eval)

    s = subs.add_parser("spr", help="joint spectral radius of the minimal A")
    _add_source_args(s)
    s.add_argument("--method", choices=["matrized", "iterate"],
                   default="matrized")
    s.set_defaults(func=_cmd_spr)

    s = subs.add_parser("norm", help="Fock-space (H^2) norm")
    _add_source_args(s)
    s.set_defaults(func=_cmd_norm)

    s = subs.add_parser("member", help="Theorem-A membership verdict")
    _add_source_args(s)
    s.set_defaults(func=_cmd_member)

    s = subs.add_parser("kernel", help="Szego kernel datum {Z, y, v}")
    _add_source_args(s)
    s.set_defaults(func=_cmd_kernel)

    s = subs.add_parser("factor", help="inner-outer factorization of a polynomial")
    s.add_argument("expression")
    s.add_argument("-d", "--vars", dest="d", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--starts", type=int, default=8)
    s.add_argument("--out", default=None)
    s.set_defaults(func=_cmd_factor)

    s = subs.add_parser("outer-test", help="rational outerness certificate")
    _add_source_args(s)
    s.set_defaults(func=_cmd_outer_test)

    s = subs.add_parser("inner-test", help="isometry (innerness) certificate")
    _add_source_args(s)
    s.add_argument("--tol", type=float, default=1e-7)
    s.set_defaults(func=_cmd_inner_test)

    s = subs.add_parser("boundary-sing",
                        help="pencil-singular point at norm 1/spr")
    _add_source_args(s)
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=_cmd_boundary_sing)

    s = subs.add_parser("spectrum-scan", help="grid scan to CSV + PGM")
    _add_source_args(s)
    s.add_argument("--rect", required=True,
                   help="re_min,re_max,im_min,im_max")
    s.add_argument("--res", type=float, required=True)
    s.add_argument("--no-classify", action="store_true")
    s.add_argument("--jobs", type=int, default=None)
    s.set_defaults(func=_cmd_spectrum_scan)

    s = subs.add_parser("spectrum-sample",
                        help="finite-level eigenvalue sampling to CSV")
    _add_source_args(s)
    s.add_argument("--levels", type=int, default=None)
    s.add_argument("--samples", type=int, default=1000)
    s.set_defaults(func=_cmd_spectrum_sample)

    s = subs.add_parser("variety-search",
                        help="search Sing_n(f) for a witness (Z, y)")
    _add_source_args(s)
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--attempts", type=int, default=8)
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=_cmd_variety_search)

    s = subs.add_parser("continuity-probe",
                        help="Theorem-B perturbation diagnostic")
    _add_source_args(s)
    s.add_argument("--rect", required=True)
    s.add_argument("--res", type=float, required=True)
    s.add_argument("--scales", default="1e-1,1e-2,1e-3")
    s.add_argument("--jobs", type=int, default=None)
    s.set_defaults(func=_cmd_continuity_probe)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NCFockError as err:
        _emit_exact({"error": {"code": err.code, "message": str(err)}})
        return 1
    except OSError as err:
        _emit_exact({"error": {"code": "io-error", "message": str(err)}})
        return 1


if __name__ == "__main__":
    sys.exit(main())
