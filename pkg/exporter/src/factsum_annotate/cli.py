"""Command-line entry points: `export` raw text into the annotated-corpus
schema, `check` an annotated stream against the same schema rules.

Exit codes: 0 success, 1 usage problems, 2 data problems (check found
violations, or an exported record failed the built-in self-check), 3 the
requested annotator model cannot be loaded.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

from .annotators import BUILTIN_MODEL, ModelNotAvailable, load_annotator
from .exporter import ExportAbort, check_stream, export_stream

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MODEL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); keep codes ours
        raise UsageError(message)


@contextmanager
def _open_in(path: str):
    if path == "-":
        yield sys.stdin
    else:
        with open(path, "r", encoding="utf-8") as fh:
            yield fh


@contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def cmd_export(args) -> int:
    annotator = load_annotator(args.model)
    with _open_in(args.input) as src, _open_out(args.output) as dst:
        report = export_stream(annotator, src, dst, pairs=args.pairs)
    print(json.dumps(report.to_obj()), file=sys.stderr)
    return EXIT_OK


def cmd_check(args) -> int:
    with _open_in(args.input) as src:
        records, invalid, violations = check_stream(src, sys.stdout)
    print(f"checked {records} record(s): {invalid} invalid, {violations} violation(s)")
    return EXIT_OK if invalid == 0 else EXIT_DATA


def build_parser() -> _Parser:
    parser = _Parser(
        prog="factsum-annotate",
        description="Convert raw text corpora into the annotated-corpus schema.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("export", help="annotate raw records")
    sp.add_argument("--model", required=True,
                    help=f"annotator model name ({BUILTIN_MODEL!r} is built in)")
    sp.add_argument("--input", required=True, help="raw line-delimited JSON, - for stdin")
    sp.add_argument("--output", required=True, help="annotated output path, - for stdout")
    sp.add_argument("--pairs", action="store_true",
                    help="require a summary on every record and emit pairs")
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("check", help="validate an annotated stream")
    sp.add_argument("--input", default="-", help="annotated line-delimited JSON")
    sp.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"factsum-annotate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelNotAvailable as exc:
        print(f"factsum-annotate: error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ExportAbort as exc:
        print(f"factsum-annotate: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"factsum-annotate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
