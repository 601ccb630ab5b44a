"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 resource cap, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from .chart import Chart, is_divisorial, orbit_type_table
from .config import Caps
from .divisorialify import (
    AddGerbeFactor,
    AddTrivialCoordinate,
    Atlas,
    abelianization_report,
    apply_step,
    coarse_smoothness,
    divisorial_certificate,
    divisorialification,
    functoriality_check,
)
from .errors import DestackifyError, InputError, InvariantViolation
from .ktheory import tor_report
from .serialize import atlas_from_json, atlas_to_json, dumps, hmodule_from_json, load_json
from .transforms import Root, sequence_to_json, step_to_json


def _group_str(factors: Sequence[int]) -> str:
    return " + ".join(f"Z/{d}" for d in factors) or "0"


def _set_str(s: Sequence[int]) -> str:
    return "{" + ",".join(map(str, s)) + "}"


def _chart_header(cid: str, c: Chart) -> str:
    divs = ", ".join(f"{lab.name}@{i}" for lab, i in c.divisors) or "-"
    chars = " ".join("(" + ",".join(map(str, chi)) + ")" for chi in c.characters)
    return f"chart {cid}: M = {_group_str(c.group.invariant_factors)}, characters {chars}, divisors {divs}"


def _load_atlas(path: str, caps: Caps) -> Atlas:
    atlas = atlas_from_json(load_json(path))
    atlas.check_caps(caps)
    return atlas


def _emit(text: str) -> None:
    sys.stdout.write(text)


def cmd_analyze(args: argparse.Namespace, caps: Caps) -> int:
    atlas = _load_atlas(args.file, caps)
    report = {}
    lines = []
    for cid, c in atlas.charts:
        rows = orbit_type_table(c, caps.max_table_dim)
        report[cid] = {"rows": rows, "divisorial": is_divisorial(c)}
        lines.append(_chart_header(cid, c))
        if c.dim > caps.max_table_dim:
            lines.append(f"  (n = {c.dim} > {caps.max_table_dim}: origin only)")
        lines.append(f"  {'nonzero':<16}{'stabilizer':<16}{'codim':>6}{'div_index':>11}")
        for r in rows:
            lines.append(
                f"  {_set_str(r['nonzero']):<16}{_group_str(r['stabilizer']):<16}{r['codim']:>6}{r['divisorial_index']:>11}"
            )
        lines.append(f"  divisorial: {'yes' if report[cid]['divisorial'] else 'no'}")
    _emit(dumps(report) if args.json else "\n".join(lines) + "\n")
    return 0


def cmd_run(args: argparse.Namespace, caps: Caps) -> int:
    atlas = _load_atlas(args.file, caps)
    final, seq = divisorialification(atlas, max_steps=args.max_steps, caps=caps)
    rounds = len(seq)
    if rounds > atlas.dim:
        raise InvariantViolation(f"{rounds} rounds exceed dimension {atlas.dim}")
    cert = divisorial_certificate(final)
    if args.rigidify:
        final, cert = abelianization_report(final, caps)
    out = {
        "rounds": rounds,
        "trace": sequence_to_json(seq),
        "atlas": atlas_to_json(final),
        "certificate": cert.to_json(),
    }
    if args.emit:
        Path(args.emit).write_text(dumps(out))
    if args.json:
        _emit(dumps(out))
        return 0
    lines = [f"rounds: {rounds} (dimension {atlas.dim})", f"charts: {len(final.charts)}"]
    for cid, c in final.charts:
        lines.append("  " + _chart_header(cid, c) + ("" if is_divisorial(c) else "  [not divisorial]"))
    lines.append(f"certificate: {cert.kind} {'holds' if cert.holds else 'FAILS'}")
    if args.trace:
        lines.append("trace:")
        lines.append(dumps(out["trace"]).rstrip("\n"))
    _emit("\n".join(lines) + "\n")
    return 0


def cmd_rigidify(args: argparse.Namespace, caps: Caps) -> int:
    atlas = _load_atlas(args.file, caps)
    final, cert = abelianization_report(atlas, caps)
    _emit(dumps({"atlas": atlas_to_json(final), "certificate": cert.to_json()}))
    return 0


def cmd_root(args: argparse.Namespace, caps: Caps) -> int:
    atlas = _load_atlas(args.file, caps)
    final, step, _ = apply_step(atlas, Root(args.divisor, args.order))
    final.check_caps(caps)
    _emit(dumps({"step": step_to_json(step), "atlas": atlas_to_json(final)}))
    return 0


def cmd_coarse(args: argparse.Namespace, caps: Caps) -> int:
    atlas = _load_atlas(args.file, caps)
    report = {}
    lines = []
    for cid, c in atlas.charts:
        smooth, basis = coarse_smoothness(c, caps)
        report[cid] = {"smooth": smooth, "hilbert_basis": [list(v) for v in basis]}
        lines.append(_chart_header(cid, c))
        lines.append("  hilbert basis: " + " ".join("(" + ",".join(map(str, v)) + ")" for v in basis))
        lines.append(f"  coarse space: {'smooth' if smooth else 'singular'}")
    _emit(dumps(report) if args.json else "\n".join(lines) + "\n")
    return 0


def cmd_tor(args: argparse.Namespace, caps: Caps) -> int:
    m = hmodule_from_json(load_json(args.file))
    report = tor_report(m, certify=args.certify)
    if args.json:
        _emit(dumps(report))
        return 0

    def mat(rows):
        return "[" + ", ".join("[" + ",".join(map(str, r)) + "]" for r in rows) + "]"

    lines = [
        f"A = {_group_str(report['group'])}, p = {report['p']}, |H| = {report['h']}",
        f"t0 (Tor_0): {mat(report['t0'])}",
        f"t1 (Tor_1): {mat(report['t1'])}",
        f"verdict: {report['verdict']}",
    ]
    if args.certify:
        cert = report["k0_certificate"]
        lines.append(f"K0 class trivial: {'yes' if cert['trivial'] else 'no'}")
        for part in cert["parts"]:
            lines.append(f"  part {_group_str(part['primary_part'])}: {part['argument']}")
            for pc in part["pieces"]:
                lines.append(
                    f"    piece {_group_str(pc['group'])}: t0 {mat(pc['t0'])} t1 {mat(pc['t1'])} "
                    f"{'isomorphic' if pc['isomorphic'] else 'NOT isomorphic'}"
                )
    _emit("\n".join(lines) + "\n")
    return 0


def parse_twist(text: str):
    kind, _, arg = text.partition(":")
    try:
        if kind == "trivial":
            return AddTrivialCoordinate(int(arg))
        if kind == "gerbe":
            factors = tuple(int(x) for x in arg.replace("x", ",").split(",") if x)
            if not factors or any(f < 1 for f in factors):
                raise ValueError
            return AddGerbeFactor(factors)
    except ValueError:
        pass
    raise InputError(f"bad twist {text!r}; use trivial:<k> or gerbe:<d1,d2,...>")


def cmd_check_functorial(args: argparse.Namespace, caps: Caps) -> int:
    atlas = _load_atlas(args.file, caps)
    twist = parse_twist(args.twist)
    ok = functoriality_check(atlas, twist, caps)
    _emit(dumps({"twist": args.twist, "functorial": ok}) if args.json else f"functorial under {args.twist}: {'yes' if ok else 'NO'}\n")
    if not ok:
        raise InvariantViolation("divisorialification does not commute with the twist")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="destackify", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--json", action="store_true", help="print canonical JSON instead of text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="orbit-type table of both indices")
    p.add_argument("file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("run", help="divisorialification")
    p.add_argument("file")
    p.add_argument("--rigidify", action="store_true")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--emit", metavar="PATH")
    p.add_argument("--max-steps", type=int, metavar="N")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("rigidify", help="rigidify a divisorial atlas")
    p.add_argument("file")
    p.set_defaults(func=cmd_rigidify)

    p = sub.add_parser("root", help="root stack along a divisor")
    p.add_argument("file")
    p.add_argument("--divisor", required=True)
    p.add_argument("--order", required=True, type=int)
    p.set_defaults(func=cmd_root)

    p = sub.add_parser("coarse", help="Hilbert basis of the invariant monoid")
    p.add_argument("file")
    p.set_defaults(func=cmd_coarse)

    p = sub.add_parser("tor", help="Tor_0 / Tor_1 actions")
    p.add_argument("file")
    p.add_argument("--certify", action="store_true", help="also certify K_0 triviality")
    p.set_defaults(func=cmd_tor)

    p = sub.add_parser("check-functorial", help="compare runs before and after a twist")
    p.add_argument("file")
    p.add_argument("--twist", required=True, help="trivial:<k> or gerbe:<d1,d2,...>")
    p.set_defaults(func=cmd_check_functorial)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        caps = Caps.from_env()
        if getattr(args, "max_steps", None) is not None and args.max_steps < 0:
            raise InputError("--max-steps must be >= 0")
        return args.func(args, caps)
    except DestackifyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
