"""Command line front end: scan, verify, soule, field-info.

Exit codes: 0 success, 1 mathematical failure (failed identity, inert prime
where a split one is required), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from sympy import primerange

from . import __version__
from .analytic import MIN_BITS
from .quadfield import InertPrime, RamifiedPrime, UnsupportedField, make_field, residue_transversal, split_prime, splitting_type

log = logging.getLogger("ellsoule")

SCHEMA = 1
CHUNK = 1024
PRECISION_ENV = "ELLSOULE_PRECISION"
CONVENTION = "pi = unit/conjugate associate with b > 0, largest a, then smallest b"


class UsageError(Exception):
    pass


# --- scan ---------------------------------------------------------------------------


def scan_chunk(d: int, lo: int, hi: int) -> list[dict]:
    """Records for split primes p in [lo, hi)."""
    from .padic import frobenius_generates_test, purely_local_test

    ctx = make_field(d)
    out = []
    for p in primerange(max(lo, 5), hi):
        if splitting_type(ctx, p) != "split":
            continue
        sp = split_prime(ctx, p)
        out.append({
            "p": p,
            "pi": [sp.pi.a, sp.pi.b],
            "purely_local_pibar": purely_local_test(sp, "pibar"),
            "purely_local_pi": purely_local_test(sp, "pi"),
            "frobenius_generates": frobenius_generates_test(sp),
        })
    return out


def run_scan(d: int, max_p: int, threads: int = 1) -> dict:
    make_field(d)
    t0 = time.perf_counter()
    bounds = [(lo, min(lo + CHUNK, max_p + 1)) for lo in range(0, max_p + 1, CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(scan_chunk, [d] * len(bounds), *zip(*bounds)))
    else:
        parts = [scan_chunk(d, lo, hi) for lo, hi in bounds]
    records = sorted((r for part in parts for r in part), key=lambda r: r["p"])
    by_test = {
        key: [r["p"] for r in records if not r[key]]
        for key in ("purely_local_pibar", "purely_local_pi", "frobenius_generates")
    }
    failures = [r for r in records if not (r["purely_local_pibar"] and r["purely_local_pi"])]
    return {
        "schema": SCHEMA,
        "tool": "ellsoule",
        "version": __version__,
        "d": d,
        "range": [5, max_p],
        "convention": CONVENTION,
        "records": records,
        "counter_examples": failures,
        "failures_by_test": by_test,
        "timing": {"seconds": round(time.perf_counter() - t0, 3), "workers": threads},
    }


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    tmp = f"{path}.partial"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def scan_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["p", "pi_a", "pi_b", "purely_local_pibar", "purely_local_pi", "frobenius_generates"])
    for r in report["records"]:
        w.writerow([r["p"], *r["pi"], r["purely_local_pibar"], r["purely_local_pi"], r["frobenius_generates"]])
    return buf.getvalue()


def cmd_scan(args) -> int:
    report = run_scan(args.field, args.max, args.threads)
    if args.out and args.out.endswith(".csv"):
        _write(args.out, scan_csv(report))
    elif args.out:
        _write(args.out, json.dumps(report, indent=1) + "\n")
    ce = report["failures_by_test"]
    print(f"d={args.field} split primes <= {args.max}: {len(report['records'])}")
    print(f"purely-local failures (pi_bar side): {ce['purely_local_pibar']}")
    print(f"purely-local failures (pi side): {ce['purely_local_pi']}")
    print(f"time {report['timing']['seconds']} s")
    return 0


# --- verify ---------------------------------------------------------------------------


SUITES = ("distribution", "galois", "cross", "norm", "lemma32", "lemma33", "all")


def cmd_verify(args) -> int:
    from .analytic import make_lattice
    from .identities import reports_to_json, run_suite

    lat = make_lattice(make_field(args.field), args.precision)
    reports = run_suite(lat, args.suite, seed=args.seed)
    if not reports:
        raise UsageError(f"suite {args.suite!r} has no checks for d={args.field}")
    for r in reports:
        print(r.summary())
    if args.out:
        _write(args.out, reports_to_json(reports) + "\n")
    return 0 if all(r.passed for r in reports) else 1


# --- soule ----------------------------------------------------------------------------


def _parse_m(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"m must look like '3,3', not {text!r}") from None
    return a, b


def cmd_soule(args) -> int:
    from .characters import AdmissibilityError, surjectivity_verdict

    facts = {}
    if args.config:
        with open(args.config) as fh:
            facts = json.load(fh).get("facts", {})
    try:
        v = surjectivity_verdict(args.field, args.p, args.m, args.ideal, trials=args.trials,
                                 facts=facts, bits=args.precision)
    except AdmissibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        _write(args.out, v.to_json() + "\n")
    print(f"d={v.d} p={v.p} m={v.m}: {v.verdict.value}")
    return 0


# --- field-info -----------------------------------------------------------------------


def cmd_field_info(args) -> int:
    from .padic import frobenius_generates_test, hensel_embed, purely_local_test

    ctx = make_field(args.field)
    print(f"K = Q(sqrt(-{ctx.d}))  w = {'(1+sqrt(-d))/2' if ctx.omega_kind == 'half' else 'sqrt(-d)'}"
          f"  disc = {ctx.discriminant}  w_K = {ctx.w_K}")
    print("units: " + ", ".join(str(u) for u in ctx.units))
    if args.p is None:
        return 0
    kind = splitting_type(ctx, args.p)
    if kind != "split":
        print(f"p = {args.p} is {kind} in K; a split prime is required")
        return 1
    sp = split_prime(ctx, args.p)
    emb = hensel_embed(sp, 1)
    print(f"p = {sp.p} = ({sp.pi})({sp.pi_bar})")
    print(f"i1(w) = {emb.r1} mod {sp.p}   i2(w) = {emb.r2} mod {sp.p}")
    print(f"transversal of (O_K/p)^x / units: {len(residue_transversal(ctx, sp))} elements")
    print(f"purely local: pi_bar side {purely_local_test(sp, 'pibar')}, pi side {purely_local_test(sp, 'pi')}")
    print(f"frobenius generates: {frobenius_generates_test(sp)}")
    return 0


# --- entry point --------------------------------------------------------------------------


def _precision(text: str) -> int:
    bits = int(text)
    if bits < MIN_BITS:
        raise argparse.ArgumentTypeError(f"precision {bits} is below the minimum of {MIN_BITS} bits")
    return bits


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    return _precision(raw) if raw else 256


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ellsoule", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"ellsoule {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("scan", help="purely-local prime scan")
    s.add_argument("--field", type=int, required=True)
    s.add_argument("--max", type=int, required=True)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_scan)

    v = sub.add_parser("verify", help="numerical identity checks")
    v.add_argument("--field", type=int, required=True)
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--precision", type=_precision, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    so = sub.add_parser("soule", help="mod-p surjectivity verdict")
    so.add_argument("--field", type=int, required=True)
    so.add_argument("--p", type=int, required=True)
    so.add_argument("--m", type=_parse_m, required=True)
    so.add_argument("--ideal")
    so.add_argument("--trials", type=int, default=5)
    so.add_argument("--precision", type=_precision, default=None)
    so.add_argument("--config", help="JSON file with a 'facts' object of class-number facts")
    so.add_argument("--out")
    so.set_defaults(func=cmd_soule)

    fi = sub.add_parser("field-info", help="field and prime summary")
    fi.add_argument("--field", type=int, required=True)
    fi.add_argument("--p", type=int)
    fi.set_defaults(func=cmd_field_info)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if getattr(args, "precision", 1) is None:
            args.precision = _default_precision()
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be positive")
        return args.func(args)
    except (UsageError, UnsupportedField, argparse.ArgumentTypeError, ValueError) as exc:
        if isinstance(exc, (InertPrime, RamifiedPrime)):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
