"""Command-line front end: ``validate``, ``chains`` and ``export``.

Exit status is 0 for a well-formed architecture, 1 when violations were
found and 2 for usage, load or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys
from typing import Optional, Sequence

from .check import check
from .interceptors import find_chains
from .io import LoadError, RefusedExport, export_adl, export_dot, load
from .model import Architecture, Membrane, ModelError

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _read(path: str) -> Architecture:
    text = pathlib.Path(path).read_text(encoding="utf-8")
    return load(text)


def _check_options(args) -> dict:
    return {
        "multicast_mode": not args.no_multicast,
        "exact_types": args.exact_types,
        "warn_unbound": getattr(args, "warn_unbound", False),
    }


def cmd_validate(args) -> int:
    arch = _read(args.file)
    report = check(arch, **_check_options(args))
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        for v in report.violations + report.warnings:
            print(v)
    return EXIT_OK if report.well_formed else EXIT_VIOLATIONS


def cmd_chains(args) -> int:
    arch = _read(args.file)
    for path, elem in arch.walk():
        if not isinstance(elem, Membrane):
            continue
        for chain in find_chains(path, arch):
            members = " ".join(str(p) for p in chain.members)
            print(f"{chain.direction.value} {members} entry={chain.entry_itf} exit={chain.exit_itf}")
    return EXIT_OK


def cmd_export(args) -> int:
    arch = _read(args.file)
    if args.adl:
        try:
            text = export_adl(arch, check(arch, **_check_options(args)))
        except RefusedExport as exc:
            print(f"export refused: {', '.join(exc.codes)}", file=sys.stderr)
            return EXIT_VIOLATIONS
        target = args.adl
    else:
        text, target = export_dot(arch), args.dot
    pathlib.Path(target).write_text(text, encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcmcheck", description="Well-formedness checker for hierarchical component architectures.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def checking_flags(p):
        p.add_argument("--no-multicast", action="store_true", help="forbid shared binding sources entirely")
        p.add_argument("--exact-types", action="store_true", help="require identical signature sets on bindings")

    p = sub.add_parser("validate", help="check an architecture and report violations")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--warn-unbound", action="store_true", help="also warn about unbound client interfaces")
    checking_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("chains", help="list interceptor chains")
    p.add_argument("file")
    p.set_defaults(func=cmd_chains)

    p = sub.add_parser("export", help="write an ADL or DOT file")
    p.add_argument("file")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--adl", metavar="OUT.xml")
    target.add_argument("--dot", metavar="OUT.dot")
    checking_flags(p)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LoadError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
    except (OSError, ModelError) as exc:
        print(f"gcmcheck: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
