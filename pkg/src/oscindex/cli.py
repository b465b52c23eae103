"""Command line front end.

Exit codes: 0 success, 2 not Fredholm, 3 indeterminate or inconclusive,
4 input error.  ``selftest`` exits 1 when any criterion fails.

Certificate store layout (``--store``, default ``.oscindex-store``)::

    <store>/<instance hash>.cert       verified certificate table
    <store>/<instance hash>.json       the report that accepted it
    <store>/pquh_h<h>.cert             built-in P + Q U_h certificates

A cached certificate is used when neither ``--cert`` nor the instance
provides one.  Tables are interpolated, so cached certificates are
verified at ``CACHE_VERIFY_TOL``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .certfile import load_certificate, save_certificate
from .factorization import CertificateError, builtin_certificate_PQUh, swap_certificate, verify_certificate
from .fredholm import CaseTag, Overall, classify_case, compare, corner_invertibility
from .index import (
    IndexOptions,
    _REDUCE,
    _det_line,
    _det_of,
    _is_pquh,
    _orient,
    case_curves,
    compute_index,
    scalar_curve_increment,
)
from .instances import InstanceError, load
from .opnum import GridSpec, SupportError, factorization_chain, residual_identity
from .symbols import t_from_u
from .winding import CurveSegment, CurveTouchesZero, RefinementError, dump_segment_csv

EXIT_OK, EXIT_FAIL, EXIT_NOT_FREDHOLM, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3, 4
CACHE_VERIFY_TOL = 1e-4


def _emit(payload: dict, out):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _options(inst, args) -> IndexOptions:
    return inst.options(tol=args.tol, margin=args.margin)


def _exit_for(overall: Overall) -> int:
    return {Overall.FREDHOLM: EXIT_OK, Overall.NOT_FREDHOLM: EXIT_NOT_FREDHOLM}.get(overall, EXIT_INCONCLUSIVE)


def _cache_paths(store, key):
    return os.path.join(store, f"{key}.cert"), os.path.join(store, f"{key}.json")


def _certificate(inst, args):
    """Certificate from ``--cert``, the instance, or the store, with its verification tolerance."""
    if args.cert:
        return load_certificate(args.cert), CACHE_VERIFY_TOL, "file"
    cert = inst.certificate()
    if cert is not None:
        return cert, None, "instance"
    path, _ = _cache_paths(args.store, inst.hash)
    if args.store and os.path.exists(path):
        return load_certificate(path), CACHE_VERIFY_TOL, "store"
    return None, None, None


# -- subcommands ------------------------------------------------------------------------


def cmd_classify(inst, args):
    d = inst.element
    margin = inst.options(margin=args.margin).margin
    corners = d.corner_data()
    case = classify_case(corners, margin)
    rows = corners.as_table()
    for row in rows:
        row["comparison"] = compare(complex(*row["a"]), complex(*row["b"]), margin)
    payload = {
        "tool": "oscindex",
        "version": __version__,
        "instance_hash": inst.hash,
        "label": inst.label,
        "corners": rows,
        "corner_invertibility": {f"{c},{s}": v for (c, s), v in corner_invertibility(corners, margin).items()},
        "case": case.value,
    }
    _emit(payload, args.out)
    if case is CaseTag.MIXED:
        return EXIT_NOT_FREDHOLM
    return EXIT_INCONCLUSIVE if case is CaseTag.INDETERMINATE else EXIT_OK


def cmd_check(inst, args):
    cert, vtol, _ = _certificate(inst, args)
    opt = _options(inst, args)
    if vtol is not None:
        opt.verify_tol = vtol
    rep = compute_index(inst.element, cert, opt)
    payload = {
        "tool": "oscindex",
        "version": __version__,
        "instance_hash": inst.hash,
        "label": inst.label,
        "case": None if rep.case is None else rep.case.value,
        "verdict": rep.verdict.to_dict(),
    }
    _emit(payload, args.out)
    return _exit_for(rep.verdict.overall)


def cmd_index(inst, args):
    cert, vtol, source = _certificate(inst, args)
    opt = _options(inst, args)
    if vtol is not None:
        opt.verify_tol = vtol
    rep = compute_index(inst.element, cert, opt)
    payload = rep.to_dict(inst.hash)
    payload["label"] = inst.label
    payload["options"] = opt.to_dict()
    if source is not None:
        payload["certificate_source"] = source
    _emit(payload, args.out)
    if args.store and rep.index is not None and rep.certificate is not None and rep.certificate.get("accepted"):
        _persist(inst, cert, payload, args.store)
    return _exit_for(rep.verdict.overall)


def _persist(inst, cert, payload, store):
    os.makedirs(store, exist_ok=True)
    cpath, rpath = _cache_paths(store, inst.hash)
    if cert is None:
        # built-in certificate chosen by the pipeline
        d = inst.element
        if _is_pquh(d):
            cert = builtin_certificate_PQUh(d.h, store=store)
        else:
            cert = swap_certificate(builtin_certificate_PQUh(-d.h, store=store), -d.h)
    save_certificate(cert, cpath)
    with open(rpath, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_verify_cert(inst, args):
    cert, vtol, source = _certificate(inst, args)
    if cert is None:
        raise InstanceError("no certificate: pass --cert or add one to the instance")
    d = inst.element
    tol = vtol or inst.options().verify_tol
    rep = verify_certificate(cert, d, tol=tol)
    payload = {
        "tool": "oscindex",
        "version": __version__,
        "instance_hash": inst.hash,
        "label": inst.label,
        "certificate_source": source,
        "provenance": cert.provenance,
        "form": cert.form,
        "l": cert.l,
        "verify_tol": tol,
        "report": rep.to_dict(),
    }
    if d.h != 0:
        grid = GridSpec(args.grid_T, args.grid_q, d.h)
        lhs, rhs = factorization_chain(cert, d)
        try:
            res = residual_identity(lhs, rhs, grid, seed=args.seed)
            payload["operator_residual"] = {"T": args.grid_T, "q": args.grid_q, "seed": args.seed, "sup_norm": res}
        except SupportError as exc:
            payload["operator_residual"] = {"error": str(exc)}
    _emit(payload, args.out)
    return EXIT_OK if rep.accepted else EXIT_INCONCLUSIVE


def cmd_dump_curves(inst, args):
    d = inst.element
    cert, vtol, _ = _certificate(inst, args)
    opt = _options(inst, args)
    corners = d.corner_data()
    case = classify_case(corners, opt.margin)
    if not case.is_admissible:
        raise InstanceError(f"corner pattern {case.value}: no case pipeline to dump")
    work, target = (d.swapped(), _REDUCE[case]) if case in _REDUCE else (d, case)
    os.makedirs(args.out, exist_ok=True)
    files = []
    for curve in case_curves(work, target):
        _, _, segs = scalar_curve_increment(curve, work.osc, work.rho_prime, opt)
        for seg, part in zip(segs, ("near_plus", "far", "near_minus")):
            name = f"{_slug(curve.name)}_{part}.csv"
            dump_segment_csv(seg, os.path.join(args.out, name), max_step=opt.tol)
            files.append(name)
    lines = {}
    if target is CaseTag.I:
        lines["line_det_B0"] = _det_line(work.b0)
    else:
        if cert is None and target is CaseTag.V and _is_pquh(work):
            cert = builtin_certificate_PQUh(work.h)
        elif cert is not None and case in _REDUCE:
            cert = swap_certificate(cert, d.h)
        if cert is not None:
            cert = _orient(cert, target)
            lines["line_det_w1"] = lambda u: _det_of(cert.w1)(t_from_u(u))
            lines["line_det_s1"] = lambda u: _det_of(cert.s1)(t_from_u(u))
    for name, f in lines.items():
        dump_segment_csv(CurveSegment(f, -1.0, 1.0, name, "compactified-u"), os.path.join(args.out, name + ".csv"), max_step=opt.tol)
        files.append(name + ".csv")
    _emit({"case": case.value, "pipeline": target.value, "files": files, "instance_hash": inst.hash}, None)
    return EXIT_OK


def _slug(name):
    name = name.replace("+", "plus").replace("-", "minus")
    return "_".join("".join(ch if ch.isalnum() else " " for ch in name).split())


def cmd_selftest(args):
    from .acceptance import run_all

    ok = True
    for num, name, passed, detail in run_all(seed=args.seed):
        ok &= passed
        print(f"[{'PASS' if passed else 'FAIL'}] {num:2d} {name}: {detail}", flush=True)
    return EXIT_OK if ok else EXIT_FAIL


# -- entry point ------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="oscindex", description="Fredholm checks and index of b0 + b1 U_h.")
    p.add_argument("--version", action="version", version=f"oscindex {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", help="instance JSON file or bundled:<name>")
    common.add_argument("--tol", type=float, default=None, help="largest angular step of the winding engine")
    common.add_argument("--margin", type=float, default=None, help="corner modulus comparison margin")
    common.add_argument("--out", default=None, help="output file (directory for dump-curves)")
    common.add_argument("--cert", default=None, help="certificate table file")
    common.add_argument("--store", default=".oscindex-store", help="certificate store directory ('' disables)")
    common.add_argument("--grid-T", dest="grid_T", type=float, default=6.0, help="half width of the operator grid")
    common.add_argument("--grid-q", dest="grid_q", type=int, default=8, help="grid steps per shift")
    common.add_argument("--seed", type=int, default=0, help="seed of the test function family")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("classify", "corner table and case"),
        ("check", "Fredholm verdict"),
        ("index", "full index report"),
        ("verify-cert", "verify a factorization certificate"),
        ("dump-curves", "write the pipeline curves as CSV"),
    ):
        sub.add_parser(name, parents=[common], help=helptext)
    st = sub.add_parser("selftest", help="run the acceptance battery")
    st.add_argument("--seed", type=int, default=0)
    return p


_COMMANDS = {
    "classify": cmd_classify,
    "check": cmd_check,
    "index": cmd_index,
    "verify-cert": cmd_verify_cert,
    "dump-curves": cmd_dump_curves,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return cmd_selftest(args)
    if args.command == "dump-curves" and not args.out:
        print("error: dump-curves needs --out DIR", file=sys.stderr)
        return EXIT_INPUT
    try:
        inst = load(args.instance)
        with np.errstate(over="ignore"):
            return _COMMANDS[args.command](inst, args)
    except (InstanceError, CertificateError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CurveTouchesZero, RefinementError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
