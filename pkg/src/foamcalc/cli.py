"""Command-line front end.

Subcommands: validate, invariant, normalize, check, random, selftest.
Inputs are diagram DSL text (.foam) or JSON files carrying a "kind" field
(diagram, abstract_foam, zero_foam, braid_word).  Exit codes: 0 success,
1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .diagram import (
    DiagramError,
    SlicedDiagram,
    diagram_from_json,
    diagram_to_json,
    parse_diagram,
    planar_invariant,
    serialize_diagram,
    validate_diagram,
)
from .foam import (
    abstract_foam_from_json,
    abstract_invariant,
    assemble_fB,
    boundary_delta,
    gamma0,
    validate_abstract,
    zero_foam_from_json,
)
from .braid import word_from_json
from .matrix import matrix_to_json
from .moves import PreconditionFailed
from .normalize import (
    MoveCertificate,
    NormalizeError,
    certificate_from_json,
    certificate_to_json,
    check_certificate,
    diagram_digest,
    normal_target,
    normalize,
)
from .rings import RING_Q, RingError, RingSpec
from .samples import random_diagram
from .selftest import ALL_SUITES

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(ValueError):
    pass


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def load_input(path: str):
    """Returns ("diagram"|"abstract_foam"|"zero_foam"|"braid_word", object)."""
    text = _read_text(path)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: bad JSON: {exc}")
        kind = obj.get("kind")
        try:
            if kind == "diagram":
                return kind, diagram_from_json(obj)
            if kind == "abstract_foam":
                return kind, abstract_foam_from_json(obj)
            if kind == "zero_foam":
                return kind, zero_foam_from_json(obj)
            if kind == "braid_word":
                return kind, word_from_json(obj)
        except (DiagramError, RingError, KeyError, ValueError) as exc:
            raise InputError(f"{path}: {exc}")
        raise InputError(f"{path}: unknown kind {kind!r}")
    try:
        return "diagram", parse_diagram(text)
    except DiagramError as exc:
        raise InputError(f"{path}: {exc}")


def _write_out(payload: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(payload)
        if not payload.endswith("\n"):
            sys.stdout.write("\n")
        return
    # atomic write
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".foamcalc-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_validate(args) -> int:
    kind, obj = load_input(args.input)
    if kind == "diagram":
        issues = validate_diagram(obj)
    elif kind == "abstract_foam":
        issues = validate_abstract(obj)
    elif kind == "braid_word":
        from .braid import validate_word
        issues = validate_word(obj)
    else:
        issues = []
    if issues:
        for msg in issues:
            print(f"invalid: {msg}")
        return EXIT_FAIL
    print(f"ok: {kind} is valid")
    return EXIT_OK


def cmd_invariant(args) -> int:
    kind, obj = load_input(args.input)
    lines = []
    payload = {"kind": kind}
    if kind == "diagram":
        inv = planar_invariant(obj)
        lines.append(f"K1: {inv}")
        payload["K1"] = str(inv)
        if args.show_matrix:
            from .diagram import planar_fB
            fb = planar_fB(obj)
            lines.append(f"fB: {fb}")
            payload["fB"] = matrix_to_json(fb)
    elif kind == "abstract_foam":
        if obj.is_closed:
            inv = abstract_invariant(obj)
            lines.append(f"K1 mod sign: {inv}")
            payload["K1_mod_sign"] = str(inv)
            if args.show_matrix:
                fb = assemble_fB(obj)
                lines.append(f"fB: {fb.matrix}")
                payload["fB"] = matrix_to_json(fb.matrix)
        else:
            delta = boundary_delta(obj)
            lines.append(f"K0 boundary delta: {delta}")
            payload["K0_delta"] = delta.value
    elif kind == "zero_foam":
        val = gamma0(obj)
        lines.append(f"K0: {val}")
        payload["K0"] = val.value
    else:
        raise InputError("invariant expects a diagram, foam, or point set")
    if args.format == "json":
        _write_out(json.dumps(payload, indent=2), args.out)
    else:
        _write_out("\n".join(lines), args.out)
    return EXIT_OK


def cmd_normalize(args) -> int:
    kind, obj = load_input(args.input)
    if kind != "diagram":
        raise InputError("normalize expects a closed diagram")
    mono, cert = normalize(obj)
    inv = planar_invariant(obj)
    matched = mono.det() == inv.unit
    target = normal_target(obj.ring, mono)
    if args.verify:
        ok, diags = check_certificate(obj, target, cert)
        if not ok:
            print("certificate self-check failed: " + "; ".join(diags))
            return EXIT_FAIL
    circle_payload = {"kind": "circle", "ring": str(obj.ring), "rank": mono.rows,
                      "monodromy": matrix_to_json(mono),
                      "determinant": str(mono.det()), "invariant": str(inv)}
    base = args.out or "normalized"
    _write_out(json.dumps(circle_payload, indent=2), base + ".circle.json")
    _write_out(json.dumps(certificate_to_json(cert), indent=2), base + ".cert.json")
    _write_out(serialize_diagram(target), base + ".foam")
    print(f"normalized in {len(cert)} moves; det {mono.det()} "
          f"{'==' if matched else '!='} invariant {inv}")
    return EXIT_OK if matched else EXIT_FAIL


def cmd_check(args) -> int:
    kind0, d0 = load_input(args.start)
    kind1, d1 = load_input(args.end)
    if kind0 != "diagram" or kind1 != "diagram":
        raise InputError("check expects two diagrams")
    obj = json.loads(_read_text(args.certificate))
    cert = certificate_from_json(d0.ring, obj)
    ok, diags = check_certificate(d0, d1, cert)
    if ok:
        print(f"certificate accepted ({len(cert)} moves)")
        return EXIT_OK
    print("certificate rejected: " + "; ".join(diags))
    return EXIT_FAIL


def cmd_random(args) -> int:
    ring = RingSpec.parse(args.ring)
    d = random_diagram(ring, seed=args.seed, max_strands=args.max_strands,
                       max_rank=args.max_rank, max_ops=args.max_ops)
    if args.format == "json":
        _write_out(json.dumps(diagram_to_json(d), indent=2), args.out)
    else:
        _write_out(serialize_diagram(d), args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    names = set(args.suite) if args.suite else None
    if names:
        unknown = names - set(ALL_SUITES)
        if unknown:
            raise InputError(f"unknown suites: {sorted(unknown)}; "
                             f"available: {sorted(ALL_SUITES)}")
    from .selftest import run_suites
    ring = RingSpec.parse(args.ring) if args.ring else None
    results = run_suites(names, ring=ring, quick=args.quick)
    for r in results:
        print(r.line())
    payload = [{"suite": r.name, "passed": r.passed, "checks": r.checks,
                "seconds": round(r.seconds, 3), "detail": r.detail} for r in results]
    if args.out:
        _write_out(json.dumps(payload, indent=2), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="foamcalc",
        description="Exact invariants and certified rewriting for decorated foams")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=["text", "json"], default="text")
        sp.add_argument("--out", help="output path (default stdout)")

    sp = sub.add_parser("validate", help="type-check an input file")
    sp.add_argument("input")
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("invariant", help="compute the invariant of an input")
    sp.add_argument("input")
    sp.add_argument("--show-matrix", action="store_true",
                    help="also print the assembled cut automorphism")
    common(sp)
    sp.set_defaults(fn=cmd_invariant)

    sp = sub.add_parser("normalize", help="rewrite a closed diagram to one circle")
    sp.add_argument("input")
    sp.add_argument("--verify", action="store_true",
                    help="replay the emitted certificate before reporting")
    sp.add_argument("--out", help="output path prefix (default 'normalized')")
    sp.set_defaults(fn=cmd_normalize)

    sp = sub.add_parser("check", help="verify a move certificate")
    sp.add_argument("start")
    sp.add_argument("end")
    sp.add_argument("certificate")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("random", help="generate a seeded random closed diagram")
    sp.add_argument("--ring", default="Q")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-strands", type=int, default=3)
    sp.add_argument("--max-rank", type=int, default=3)
    sp.add_argument("--max-ops", type=int, default=3)
    common(sp)
    sp.set_defaults(fn=cmd_random)

    sp = sub.add_parser("selftest", help="run the built-in acceptance suites")
    sp.add_argument("--ring", help="run the suites over this ring only")
    sp.add_argument("--suite", action="append",
                    help="run only this suite (repeatable); "
                         f"one of {sorted(ALL_SUITES)}")
    sp.add_argument("--quick", action="store_true", help="reduced check counts")
    sp.add_argument("--out", help="write a JSON report here")
    sp.set_defaults(fn=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (InputError, FileNotFoundError, RingError, DiagramError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NormalizeError, PreconditionFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
