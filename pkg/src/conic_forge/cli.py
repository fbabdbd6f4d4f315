"""Command-line entry points.

    conic-forge verify-hpt     [--prime P] [--exhaustive-bound Q]
    conic-forge build-example  [--prime P] [--seed S] [--retries R] [--bundle-out FILE]
    conic-forge brauer         GRAPH_FILE
    conic-forge check-bundle   BUNDLE_FILE [--factors FILE]

Every report is a JSON record embedding its run manifest; identical manifests
give byte-identical reports (timings are opt-in for that reason).  Exit codes:
0 pass, 1 checklist failure, 2 input error, 3 retries exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

from . import __version__

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_RETRIES = 3

THREADS_ENV = "CONIC_FORGE_THREADS"


class InputError(ValueError):
    pass


@dataclass
class RunManifest:
    command: str
    primes: list
    seed: int | None = None
    retries: int | None = None
    inputs: dict = field(default_factory=dict)
    version: str = __version__
    threads: int = 1
    timings: dict | None = None

    def to_record(self) -> dict:
        rec = asdict(self)
        if rec["timings"] is None:
            del rec["timings"]
        return rec


def file_digest(path: str) -> str:
    with open(path, "rb") as fh:
        return "sha256:" + hashlib.sha256(fh.read()).hexdigest()


def read_input(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _jsonable(obj):
    from .gf import FieldElement
    from .poly import MultiPoly, ProjPoint

    if isinstance(obj, ProjPoint):
        return list(obj.coords)
    if isinstance(obj, MultiPoly):
        return obj.format()
    if isinstance(obj, FieldElement):
        return int(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(_jsonable(x) for x in obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, indent=2, default=_jsonable) + "\n"


def emit(record: dict, args, text: str | None = None):
    out = dumps(record)
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    if args.text:
        sys.stdout.write(text if text is not None else render_text(record))
    elif not getattr(args, "output", None):
        sys.stdout.write(out)


def render_text(record: dict) -> str:
    lines = []
    m = record.get("manifest", {})
    lines.append(f"{m.get('command', '?')}  primes={m.get('primes')}  version={m.get('version')}")
    for c in record.get("checks", []):
        lines.append(f"  [{c['status']:>12}] {c['name']}")
    if "ch0" in record:
        for b in record["ch0"].get("bullets", []):
            lines.append(f"  [{b['status']:>12}] ch0: {b['name']}")
    if "brauer" in record and isinstance(record["brauer"], dict):
        b = record["brauer"]
        if "order_of_quotient" in b:
            lines.append(f"  Brauer quotient order: {b['order_of_quotient']}")
    if "verdict" in record:
        lines.append(f"verdict: {record['verdict']}")
    return "\n".join(lines) + "\n"


# -- commands ---------------------------------------------------------------------------------

def cmd_verify_hpt(args) -> int:
    from .hpt_fixture import NoSqrt2, build, verify_all

    manifest = RunManifest("verify-hpt", [args.prime], threads=thread_cap(),
                           inputs={"exhaustive_bound": args.exhaustive_bound})
    try:
        inst = build(args.prime)
    except NoSqrt2 as exc:
        raise InputError(str(exc)) from exc
    start = time.perf_counter()
    report = verify_all(inst, exhaustive_bound=args.exhaustive_bound, timings=args.timings)
    if args.timings:
        manifest.timings = {"total": round(time.perf_counter() - start, 3)}
    record = {"manifest": manifest.to_record(), **report}
    emit(record, args)
    return EXIT_PASS if report["verdict"] == "pass" else EXIT_FAIL


def cmd_build_example(args) -> int:
    from .pipeline import RetriesExhausted, build_with_retries, verify_checklist

    if args.prime < 37:
        raise InputError("build-example needs a prime >= 37")
    _check_prime(args.prime)
    if args.retries < 0:
        raise InputError("--retries must be non-negative")
    manifest = RunManifest("build-example", [args.prime], seed=args.seed, retries=args.retries,
                           threads=thread_cap())
    log: list = []
    start = time.perf_counter()
    try:
        ex = build_with_retries(args.prime, args.seed, args.retries, log)
    except RetriesExhausted as exc:
        record = {"manifest": manifest.to_record(), "verdict": "retries_exhausted", "error": str(exc),
                  "retry_log": exc.log}
        emit(record, args, text=f"retries exhausted after {len(exc.log)} attempts\n")
        return EXIT_RETRIES
    built = time.perf_counter()
    report = verify_checklist(ex, seed=args.seed, timings=args.timings)
    if args.timings:
        manifest.timings = {"build": round(built - start, 3), "verify": round(time.perf_counter() - built, 3)}
    if args.bundle_out:
        with open(args.bundle_out, "w", encoding="utf-8") as fh:
            fh.write(ex.N.dumps() + "\n")
    record = {"manifest": manifest.to_record(), "retry_log": log, "setup": ex.setup.to_record(),
              "instance": ex.instance.to_record(), "bundle": ex.N.to_record(),
              "shape": [list(r) for r in ex.N.entry_degree_shape()], **report}
    emit(record, args)
    return EXIT_PASS if report["verdict"] == "pass" else EXIT_FAIL


def cmd_brauer(args) -> int:
    from .brauer import BrauerError, DiscriminantGraph, compute_H

    text = read_input(args.graph)
    manifest = RunManifest("brauer", [], threads=thread_cap(), inputs={"graph": file_digest(args.graph)})
    try:
        G = DiscriminantGraph.loads(text)
        res = compute_H(G)
    except BrauerError as exc:
        raise InputError(f"{type(exc).__name__}: {exc}") from exc
    record = {"manifest": manifest.to_record(), "graph": G.to_record(), "brauer": res}
    summary = (f"basis of H: {', '.join(res['basis'])}\n"
               f"order of H: {res['order_H']}\n"
               f"order of H / <(1,...,1)>: {res['order_of_quotient']}\n")
    emit(record, args, text=summary)
    return EXIT_PASS


def load_bundle(text: str):
    """A bundle record: {p, variables, entries (upper triangle)} or {p, variables, matrix (full)}."""
    from .conic import GradedConicBundle, NotGradedFree, NotSymmetric
    from .poly import MultiPoly, PolyError, parse

    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    try:
        p = int(rec["p"])
        variables = tuple(rec["variables"])
        if "matrix" in rec:
            rows = [[parse(s, variables, p) for s in row] for row in rec["matrix"]]
            rows = [[e if not e.is_zero() else MultiPoly.zero(variables, p) for e in row] for row in rows]
            return GradedConicBundle(tuple(tuple(r) for r in rows), tuple(rec.get("type") or ()))
        return GradedConicBundle.from_record(rec)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed bundle record: missing or bad field {exc}") from exc
    except (NotGradedFree, NotSymmetric, PolyError, ArithmeticError) as exc:
        raise InputError(f"{type(exc).__name__}: {exc}") from exc


def load_factors(text: str, variables: Sequence[str], p: int):
    from .poly import PolyError, parse

    try:
        rec = json.loads(text)
        items = rec["factors"] if isinstance(rec, dict) else rec
        return [(str(f.get("name", f"F{k}")), parse(f["poly"], variables, p)) if isinstance(f, dict)
                else (f"F{k}", parse(f, variables, p)) for k, f in enumerate(items)]
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    except (KeyError, TypeError, PolyError, ArithmeticError) as exc:
        raise InputError(f"malformed factors file: {exc}") from exc


def check_bundle(M, factors=None, seed: int = 0, max_degree: int = 18, budget: int = 400) -> dict:
    """Generic checks on a bundle over P^3: rank loci, discriminant factors and their covers."""
    from .conic import discriminant, minor
    from .linalg import empty_locus_degree
    from .pipeline import WitnessNotFound, check_record, finite_locus, split_witnesses, verdict
    from .poly import proportional

    p = M.p
    rng = random.Random(seed)
    det = discriminant(M)
    checks = []
    info = {"type": list(M.dtype), "discriminant_degree": det.degree, "nvars": len(M.variables)}
    if det.is_zero():
        checks.append(check_record("discriminant_nonzero", "fail", {}, p))
        return {"info": info, "checks": checks, "verdict": "fail"}
    checks.append(check_record("discriminant_nonzero", "pass", {}, p))
    D = empty_locus_degree([e for e in M.upper() if not e.is_zero()], max_degree)
    checks.append(check_record("rank0_locus_empty", "pass" if D is not None else "fail", {"saturation_degree": D}, p))
    if len(M.variables) == 4 and M.size == 3:
        E = M.entries
        mins = [minor(E, r, c) for r in ((0, 1), (0, 2), (1, 2)) for c in ((0, 1), (0, 2), (1, 2))]
        res = finite_locus(mins, rng, max_degree + 12)
        checks.append(check_record("rank1_locus_finite", "pass" if res["finite"] else "fail", res, p))
    if not factors:
        info["note"] = ("no factorisation supplied: with an irreducible discriminant the quotient "
                        "of H by the diagonal is trivial")
        return {"info": info, "checks": checks, "verdict": verdict(checks)}
    prod = factors[0][1]
    for _, f in factors[1:]:
        prod = prod * f
    ok, c = proportional(det, prod)
    checks.append(check_record("factorisation", "pass" if ok else "fail",
                               {"scalar": int(c) if ok else None, "factors": [n for n, _ in factors]}, p))
    if not ok:
        return {"info": info, "checks": checks, "verdict": "fail"}
    wit = {}
    good = True
    for name, f in factors:
        if len(M.variables) == 4:
            fin = finite_locus(f.gradient(), rng, max_degree)
        else:
            fin = {"finite": None}
        try:
            w = split_witnesses(M, f, p, random.Random(seed + 7), budget)
            wit[name] = {"singular_locus_finite": fin["finite"], **{k: list(v.coords) for k, v in w.items()}}
        except WitnessNotFound as exc:
            wit[name] = {"singular_locus_finite": fin["finite"], "error": str(exc)}
            good = False
    checks.append(check_record("double_cover_nontrivial", "pass" if good else "inconclusive", wit, p))
    return {"info": info, "checks": checks, "verdict": verdict(checks)}


def cmd_check_bundle(args) -> int:
    text = read_input(args.bundle)
    M = load_bundle(text)
    inputs = {"bundle": file_digest(args.bundle)}
    factors = None
    if args.factors:
        factors = load_factors(read_input(args.factors), M.variables, M.p)
        inputs["factors"] = file_digest(args.factors)
    manifest = RunManifest("check-bundle", [M.p], seed=args.seed, threads=thread_cap(), inputs=inputs)
    report = check_bundle(M, factors, seed=args.seed)
    record = {"manifest": manifest.to_record(), **report}
    emit(record, args)
    return EXIT_PASS if report["verdict"] == "pass" else EXIT_FAIL


def _check_prime(p: int):
    from .gf import BadModulus, check_modulus

    try:
        check_modulus(p)
    except BadModulus as exc:
        raise InputError(str(exc)) from exc
    if p == 2:
        raise InputError("p must be odd")


# -- parser -----------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conic-forge", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--text", action="store_true", help="print a human-readable summary")
    common.add_argument("--output", "-o", help="write the JSON report to this file")
    common.add_argument("--timings", action="store_true", help="record wall-clock timings (breaks byte equality)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-hpt", parents=[common], help="build and verify the bidegree (2,2) example")
    p.add_argument("--prime", type=int, default=10007)
    p.add_argument("--exhaustive-bound", type=int, default=41,
                   help="run the exhaustive P^3 rank scan only for primes up to this bound")
    p.set_defaults(func=cmd_verify_hpt)

    p = sub.add_parser("build-example", parents=[common], help="construct and verify the type (7,1,1) bundle")
    p.add_argument("--prime", type=int, default=10007)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--retries", type=int, default=32)
    p.add_argument("--bundle-out", help="write the bundle N to this file")
    p.set_defaults(func=cmd_build_example)

    p = sub.add_parser("brauer", parents=[common], help="compute H and its quotient from a graph file")
    p.add_argument("graph")
    p.set_defaults(func=cmd_brauer)

    p = sub.add_parser("check-bundle", parents=[common], help="generic checks on a bundle file")
    p.add_argument("bundle")
    p.add_argument("--factors", help="JSON list of discriminant factors")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_bundle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    try:
        if args.command == "verify-hpt":
            _check_prime(args.prime)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
