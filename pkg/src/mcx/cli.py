"""Command-line front end: ``mcx <group> <verb> ...``.

Every command writes a JSON verification report (stdout or ``--out``).
Exit status: 0 when every check passes, 1 when any check does not, 2 for
usage errors and unreadable input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import convexbody as cb
from . import matrange as mr
from .checks import Check
from .mixedsets import (
    MixedTuple,
    NoFiniteMaximalDilation,
    NonMemberError,
    NotMaximalInputError,
    dilate_to_maximal,
    is_maximal,
    mixed_member,
    witness_dilation,
)
from .numkernel import NumericalError, matrix_to_json
from .pencil import HermitianPencil, MatrixTuple, ShapeError, eval_pencil, spectrahedron_member
from .report import RunConfig, VerificationReport, digest, emit_curves, kp_curves, reproduce_all, subquadratic_trace

DOMAIN_ERRORS = (cb.GeometryError, NonMemberError, NotMaximalInputError, NoFiniteMaximalDilation, NumericalError,
                 ShapeError)


class UsageError(Exception):
    pass


# --- input helpers ----------------------------------------------------------

def load_json(src: str, what: str) -> dict:
    """Read JSON from a file path, or parse ``src`` itself if it starts with '{'."""
    if src.lstrip().startswith("{"):
        text, where = src, f"inline {what}"
    else:
        try:
            text, where = Path(src).read_text(), src
        except OSError as exc:
            raise UsageError(f"cannot read {what} file {src!r}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {where} at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def parse_vector(text: str, what: str = "vector") -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"{what} must be comma-separated numbers, got {text!r}") from exc


def _parse(loader, obj, what):
    try:
        return loader(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid {what}: {exc}") from exc


def load_tuple(src):
    return _parse(MatrixTuple.from_json, load_json(src, "tuple"), "tuple")


def load_mixed(src):
    return _parse(MixedTuple.from_json, load_json(src, "mixed tuple"), "mixed tuple")


def load_pencil(src):
    return _parse(HermitianPencil.from_json, load_json(src, "pencil"), "pencil")


def load_body(src):
    return _parse(cb.body_from_json, load_json(src, "body"), "body")


def _check(name, topic, inputs, status, evidence, tol=None) -> Check:
    return Check(name, topic, inputs, status, evidence, tol or {})


def _verdict_status(ok: bool, margin: float | None = None, band: float | None = None) -> str:
    if margin is not None and band is not None and abs(margin) <= band:
        return "boundary-uncertain"
    return "pass" if ok else "fail"


# --- command implementations ------------------------------------------------

def cmd_pencil(args, cfg):
    P, Z = load_pencil(args.pencil), load_tuple(args.tuple)
    inputs = {"pencil": digest(P.to_json()), "tuple": digest(Z.to_json())}
    if args.verb == "eval":
        L = eval_pencil(P, Z, cfg.tol)
        w = np.linalg.eigvalsh(L)
        return _check("pencil-eval", "pencil-evaluation", inputs, "pass",
                      {"value": matrix_to_json(L), "min_eigenvalue": float(w[0]), "max_eigenvalue": float(w[-1])})
    res = spectrahedron_member(P, Z, cfg.tol)
    return _check("pencil-member", "spectrahedron-membership", inputs,
                  _verdict_status(res.is_psd, res.margin, 10 * cfg.tol.psd_tol),
                  {"member": res.is_psd, "margin": res.margin}, cfg.tol.to_dict())


def cmd_mixed(args, cfg):
    t = load_mixed(args.input)
    inputs = {"tuple": t.to_json()}
    if args.verb == "member":
        res = mixed_member(t, cfg.tol)
        return _check("mixed-member", "mixed-membership", inputs,
                      _verdict_status(res.is_psd, res.margin, 10 * cfg.tol.psd_tol),
                      {"member": res.is_psd, "margin": res.margin}, cfg.tol.to_dict())
    if args.verb == "maximal":
        v = is_maximal(t, cfg.tol)
        status = "boundary-uncertain" if v.boundary_uncertain else ("pass" if v.is_maximal else "fail")
        return _check("mixed-maximal", "maximality-criterion", inputs, status, v.summary(), cfg.tol.to_dict())
    if args.verb == "witness":
        w = witness_dilation(t, cfg.tol)
        margin = mixed_member(w.dilated, cfg.tol).margin
        comp = w.dilated.compress(t.level).max_entry_distance(t)
        ok = margin >= -1e-9 and comp <= 1e-9 and w.nontriviality > 1e-9
        return _check("mixed-witness", "maximality-criterion", inputs, "pass" if ok else "fail",
                      {"failed_condition": w.failed_condition, "nontriviality": w.nontriviality,
                       "witness_margin": margin, "compression_error": comp, "witness": w.dilated.to_json()},
                      cfg.tol.to_dict())
    out, shift = dilate_to_maximal(t, args.delta, cfg.tol)
    defect = float(np.linalg.norm(np.eye(out.level) - out.sum_square()))
    maximal = is_maximal(out, cfg.tol, with_witness=False).is_maximal
    back = out.compress(t.level).max_entry_distance(t)
    ok = defect <= 1e-9 and maximal and back <= 2 * args.delta
    return _check("mixed-dilate", "maximal-dilation", {**inputs, "delta": args.delta}, "pass" if ok else "fail",
                  {"sumsquare_defect": defect, "maximal": maximal, "compression_distance": back,
                   "preprocessing_shift": shift, "dilation": out.to_json()}, cfg.tol.to_dict())


def cmd_geom(args, cfg):
    K = load_body(args.body)
    lam = parse_vector(args.point, "point")
    inputs = {"body": K.descriptor(), "point": lam}
    if args.verb == "classify":
        direction = parse_vector(args.direction, "direction") if args.direction else None
        rep = cb.classify_point(K, lam, direction)
        d = rep.to_dict()
        return _check("geom-classify", "extreme-point-classes", inputs, "pass" if d["chain_consistent"] else "fail", d)
    if not args.direction:
        raise UsageError("--direction is required")
    direction = parse_vector(args.direction, "direction")
    S = cb.standard_position(K, lam, direction, n2d=cfg.n_directions, nsphere=cfg.n_sphere)
    if args.verb == "stdpos":
        return _check("geom-stdpos", "standard-position", {**inputs, "direction": direction}, "pass", S.evidence())
    if not args.x:
        raise UsageError("give at least one --x point of the shadow")
    xs = np.array([parse_vector(x, "x") for x in args.x])
    F = cb.defining_function(S, xs)
    return _check("geom-F", "defining-function", {**inputs, "direction": direction, "x": xs}, "pass",
                  {"x": xs, "F": F, "standard_position": S.evidence()})


def cmd_range(args, cfg):
    v = args.verb
    if v == "refute":
        r = mr.refute_dilation_kp(args.p, args.a, args.b, args.beta)
        return _check("range-refute", "kp-refutation", {"p": args.p, "a": args.a, "b": args.b, "beta": args.beta},
                      "pass" if r["found"] and r["margin"] > 0 else "fail", r)
    if v == "search":
        K = load_body(args.body)
        res = mr.aep_dilation_search(K)
        return _check("range-search", "dilation-search", {"body": K.descriptor()}, "pass", res)
    A = load_tuple(args.tuple)
    inputs = {"tuple": digest(A.to_json())}
    if v == "support":
        c = parse_vector(args.direction, "direction")
        val, vec = mr.matrix_range_support(A, c)
        return _check("range-support", "matrix-range", {**inputs, "direction": c}, "pass",
                      {"support": val, "eigenvector": [[z.real, z.imag] for z in vec]})
    if v == "wmax":
        K = load_body(args.body)
        res = mr.wmax_membership(K, A, tol=cfg.tol.psd_tol)
        status = "pass" if res.member else "fail"
        if res.status == "boundary-uncertain" and not res.member:
            status = "boundary-uncertain"
        return _check("range-wmax", "wmax-membership", {**inputs, "body": K.descriptor()}, status,
                      res._asdict(), cfg.tol.to_dict())
    lam = parse_vector(args.point, "point")
    direction = parse_vector(args.direction, "direction")
    cert = mr.paraboloid_bound(A, lam, direction, seed=cfg.seed, tol=cfg.tol)
    return _check("range-paraboloid", "paraboloid-bound", {**inputs, "point": lam, "direction": direction},
                  "pass" if cert.verified else "fail", cert.to_dict(), cfg.tol.to_dict())


def cmd_kp(args, cfg):
    if args.verb == "radius":
        r = cb.disk_in_kp_radius(args.p, args.c)
        return _check("kp-radius", "disk-containment", {"p": args.p, "c": args.c},
                      "pass" if r["passed"] else "fail", r, {"margin": 1e-12})
    if args.verb == "bound":
        r = cb.scalability_lower_bound(args.p, args.c)
        ok = r["agrees"] and r["holds_above"] and r["fails_below"]
        return _check("kp-bound", "non-scalability", {"p": args.p, "c": args.c}, "pass" if ok else "fail", r,
                      {"threshold": 1e-9})
    kinds = [k for k in ("radius", "bound", "subquadratic") if getattr(args, k)]
    if not kinds:
        raise UsageError("kp curve needs at least one of --radius, --bound, --subquadratic")
    cs = [float(x) for x in parse_vector(args.c_values, "c-values")] if args.c_values else [1e-2, 1e-3]
    curves = kp_curves(args.p, cs)
    written = {}
    if "radius" in kinds:
        written["kp_radius"] = emit_curves("kp_radius", curves["kp_radius"], args.csv_dir)
    if "bound" in kinds:
        written["kp_bound"] = emit_curves("kp_bound", curves["kp_bound"], args.csv_dir)
    if "subquadratic" in kinds:
        written["subquadratic"] = emit_curves(f"subquadratic_p{args.p}", subquadratic_trace(args.p, cfg.r0, cfg.radius_steps),
                                              args.csv_dir)
    return _check("kp-curve", "kp-curves", {"p": args.p, "c": cs, "kinds": kinds}, "pass", {"csv": written})


# --- parser -----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mcx", description="Matrix convex sets: maximality, dilations, extreme-point classifiers.")
    p.add_argument("--config", help="RunConfig JSON (default: $MCX_CONFIG)")
    p.add_argument("--out", help="report path (default: stdout)")
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    pen = sub.add_parser("pencil", help="evaluate a pencil or test spectrahedron membership")
    pen.add_argument("verb", choices=["eval", "member"])
    pen.add_argument("--pencil", required=True)
    pen.add_argument("--tuple", required=True)

    mix = sub.add_parser("mixed", help="mixed row contractions")
    mix.add_argument("verb", choices=["member", "maximal", "dilate", "witness"])
    mix.add_argument("--in", dest="input", required=True)
    mix.add_argument("--delta", type=float, default=1e-3)

    geo = sub.add_parser("geom", help="convex bodies and extreme-point classes")
    geo.add_argument("verb", choices=["classify", "stdpos", "F"])
    geo.add_argument("--body", required=True)
    geo.add_argument("--point", required=True, help="comma-separated; write --point=-1,0 for negatives")
    geo.add_argument("--direction")
    geo.add_argument("--x", action="append", help="shadow point (comma-separated); repeatable")

    rng = sub.add_parser("range", help="matrix ranges and W^max")
    rng.add_argument("verb", choices=["support", "wmax", "paraboloid", "search", "refute"])
    rng.add_argument("--tuple")
    rng.add_argument("--body")
    rng.add_argument("--point")
    rng.add_argument("--direction")
    rng.add_argument("--p", type=float, default=1.5)
    rng.add_argument("--a", type=float)
    rng.add_argument("--b", type=float, default=0.0)
    rng.add_argument("--beta", type=float, default=0.0)

    kp = sub.add_parser("kp", help="closed forms for the bodies |x|^p <= y <= 1")
    kp.add_argument("verb", choices=["radius", "bound", "curve"])
    kp.add_argument("--p", type=float, default=1.5)
    kp.add_argument("--c", type=float, default=0.01)
    kp.add_argument("--c-values")
    kp.add_argument("--radius", action="store_true")
    kp.add_argument("--bound", action="store_true")
    kp.add_argument("--subquadratic", action="store_true")
    kp.add_argument("--csv-dir")

    rep = sub.add_parser("reproduce-all", help="run every acceptance check")
    rep.add_argument("--seed", type=int)
    rep.add_argument("--csv-dir")
    rep.add_argument("--timings", action="store_true", help="record wall times (reports stop being byte-identical)")
    rep.add_argument("--out", dest="rep_out")
    return p


REQUIRED = {
    ("range", "support"): ("tuple", "direction"),
    ("range", "wmax"): ("tuple", "body"),
    ("range", "paraboloid"): ("tuple", "point", "direction"),
    ("range", "search"): ("body",),
    ("range", "refute"): ("a",),
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        try:
            cfg = RunConfig.load(args.config)
        except (OSError, ValueError, TypeError) as exc:
            raise UsageError(f"bad config: {exc}") from exc
        for flag in REQUIRED.get((args.group, getattr(args, "verb", None)), ()):
            if getattr(args, flag) is None:
                raise UsageError(f"{args.group} {args.verb} needs --{flag}")
        out = args.out
        if args.group == "reproduce-all":
            if args.seed is not None:
                cfg.seed = args.seed
            if args.csv_dir:
                cfg.csv_dir = args.csv_dir
            cfg.timings = cfg.timings or args.timings
            out = args.rep_out or out or cfg.report_path
            cfg.report_path = out
            report = reproduce_all(cfg)
        else:
            handler = {"pencil": cmd_pencil, "mixed": cmd_mixed, "geom": cmd_geom, "range": cmd_range,
                       "kp": cmd_kp}[args.group]
            report = VerificationReport(cfg, f"{args.group} {args.verb}")
            try:
                report.add(handler(args, cfg))
            except DOMAIN_ERRORS as exc:
                report.add(_check(f"{args.group}-{args.verb}", "input-validation", {}, "fail",
                                  {"error": type(exc).__name__, "message": str(exc)}))
        report.write(out)
        return report.exit_code()
    except UsageError as exc:
        print(f"mcx: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
