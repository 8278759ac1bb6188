"""Command-line front door.

Exit codes form the scripting contract: 0 success or clean validation,
1 validation errors present, 2 parse failure, 3 I/O or usage failure.
With --format json a command writes exactly one JSON document to the
standard output stream; progress and notes go to the error stream.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analyze import corpus_stats
from .analyze import diff as diff_sheets
from .card import export_card, import_card
from .diagnostics import FactsheetParseError
from .model import Factsheet
from .render import RENDER_TARGETS, render
from .store import SLUG_RE
from .textfmt import (
    factsheet_to_dict,
    parse_canonical,
    serialize_canonical,
    skeleton_canonical,
)
from .validate import completeness, is_publishable, validate

OK, VALIDATION_ERRORS, PARSE_FAILURE, FAILURE = 0, 1, 2, 3


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    "argparse exits 2 on usage errors; the contract reserves 2 for parsing."

    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliFailure(FAILURE, f"{self.prog}: error: {message}")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliFailure(FAILURE, str(exc))


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliFailure(FAILURE, str(exc))


def _parse_sheet(path: str) -> Factsheet:
    text = _read_text(path)
    try:
        return parse_canonical(text)
    except FactsheetParseError as exc:
        raise CliFailure(PARSE_FAILURE,
                         "\n".join(f"{path}: {e}" for e in exc.errors))


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        _write_text(out_path, text)


def _emit_json(doc: object) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")


def _span_dict(span) -> dict | None:
    if span is None:
        return None
    return {"line": span.line, "column": span.column, "length": span.length}


def _diag_dict(d) -> dict:
    return {"code": d.code, "severity": d.severity.value, "message": d.message,
            "question_id": d.question_id, "span": _span_dict(d.span)}


def _completeness_dict(fs: Factsheet) -> dict:
    report = completeness(fs)
    return {"overall": report.overall,
            "dimensions": [{"dimension": s.dimension, "answered": s.answered,
                            "applicable": s.applicable, "ratio": s.ratio}
                           for s in report.scores]}


def cmd_new(args) -> int:
    if not SLUG_RE.fullmatch(args.id):
        raise CliFailure(FAILURE,
                         f"{args.id!r} is not a valid id (want [a-z0-9-], 1-64 chars)")
    path = Path(f"{args.id}.efs")
    if path.exists():
        raise CliFailure(FAILURE, f"{path} already exists, not overwriting")
    _write_text(str(path), skeleton_canonical())
    print(f"wrote {path}", file=sys.stderr)
    return OK


def cmd_validate(args) -> int:
    worst = OK
    results = []
    for path in args.files:
        try:
            fs = _parse_sheet(path)
        except CliFailure as exc:
            worst = max(worst, exc.code)
            if args.format == "json":
                results.append({"path": path, "error": exc.args[0]})
            else:
                print(exc.args[0], file=sys.stderr)
            continue
        diags = validate(fs)
        if any(d.severity.value == "error" for d in diags):
            worst = max(worst, VALIDATION_ERRORS)
        if args.format == "json":
            results.append({"path": path,
                            "diagnostics": [_diag_dict(d) for d in diags],
                            "completeness": _completeness_dict(fs),
                            "publishable": is_publishable(fs)})
            continue
        for d in diags:
            where = f" {d.question_id}:" if d.question_id else ""
            print(f"{path}: [{d.code}]{where} {d.message}")
        overall = completeness(fs).overall
        state = "publishable" if is_publishable(fs) else "not publishable"
        print(f"{path}: {len(diags)} finding(s), "
              f"completeness {overall:.0%}, {state}")
    if args.format == "json":
        _emit_json({"results": results})
    return worst


def cmd_render(args) -> int:
    fs = _parse_sheet(args.file)
    _emit(render(fs, args.target), args.output)
    return OK


def cmd_import_card(args) -> int:
    text = _read_text(args.file)
    try:
        report = import_card(text)
    except FactsheetParseError as exc:
        raise CliFailure(PARSE_FAILURE,
                         "\n".join(f"{args.file}: {e}" for e in exc.errors))
    canonical = serialize_canonical(report.factsheet)
    for note in report.notes:
        where = f" {note.question_id}:" if note.question_id else ""
        print(f"{args.file}: [{note.code}]{where} {note.message}",
              file=sys.stderr)
    if args.format == "json":
        _emit_json({"factsheet": factsheet_to_dict(report.factsheet),
                    "notes": [_diag_dict(n) for n in report.notes]})
        if args.output is not None:
            _write_text(args.output, canonical)
        return OK
    if args.output is None:
        sys.stdout.write(canonical)
    else:
        _write_text(args.output, canonical)
        print(f"wrote {args.output}", file=sys.stderr)
    return OK


def cmd_export_card(args) -> int:
    fs = _parse_sheet(args.file)
    _emit(export_card(fs), args.output)
    return OK


def cmd_diff(args) -> int:
    left = _parse_sheet(args.left)
    right = _parse_sheet(args.right)
    result = diff_sheets(left, right)
    if args.format == "json":
        _emit_json({"entries": [{"question_id": e.question_id,
                                 "status": e.status.value,
                                 "left": e.left, "right": e.right}
                                for e in result]})
        return OK
    changed = result.changed()
    if not changed:
        print("factsheets give the same answers")
        return OK
    for e in changed:
        print(f"{e.question_id}: {e.status.value}")
        if e.left is not None:
            print(f"  - {e.left}")
        if e.right is not None:
            print(f"  + {e.right}")
    return OK


def cmd_stats(args) -> int:
    root = Path(args.dir)
    if not root.is_dir():
        raise CliFailure(FAILURE, f"{root} is not a directory")
    sheets = [_parse_sheet(str(path)) for path in sorted(root.glob("*.efs"))]
    stats = corpus_stats(sheets)
    if args.format == "json":
        _emit_json(stats.to_dict())
        return OK
    print(f"sheets: {stats.sheet_count}")
    if stats.fill_rates:
        print("fill rates:")
        for qid, rate in stats.fill_rates.items():
            print(f"  {qid} {rate:.2f}")
    if stats.vocab_hists:
        print("vocabulary usage:")
        for qid, hist in stats.vocab_hists.items():
            for token, count in hist.items():
                print(f"  {qid} {token} {count}")
    return OK


def cmd_serve(args) -> int:
    if args.store is None:
        raise CliFailure(FAILURE,
                         "no store directory: pass --store or set EFS_STORE_DIR")
    from .service import serve
    from .store import StorageError
    try:
        serve(args.addr, args.store)
    except (StorageError, ValueError, OSError) as exc:
        raise CliFailure(FAILURE, str(exc))
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="efs", description="Evaluation factsheet toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p):
        p.add_argument("--format", choices=("human", "json"), default="human")

    p = sub.add_parser("new", help="write a commented factsheet skeleton")
    p.add_argument("id", help="sheet id; becomes <id>.efs")
    p.set_defaults(run=cmd_new)

    p = sub.add_parser("validate", help="check factsheets and report findings")
    p.add_argument("files", nargs="+")
    fmt(p)
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("render", help="render a factsheet document")
    p.add_argument("file")
    p.add_argument("--target", choices=RENDER_TARGETS, default="hypertext")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_render)

    p = sub.add_parser("import-card", help="convert a card file to canonical text")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    fmt(p)
    p.set_defaults(run=cmd_import_card)

    p = sub.add_parser("export-card", help="convert canonical text to a card")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_export_card)

    p = sub.add_parser("diff", help="compare two factsheets answer by answer")
    p.add_argument("left")
    p.add_argument("right")
    fmt(p)
    p.set_defaults(run=cmd_diff)

    p = sub.add_parser("stats", help="coverage statistics over a directory")
    p.add_argument("dir")
    fmt(p)
    p.set_defaults(run=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", default="127.0.0.1:8650")
    p.add_argument("--store", default=os.environ.get("EFS_STORE_DIR"))
    p.set_defaults(run=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.run(args)
    except CliFailure as exc:
        print(exc.args[0], file=sys.stderr)
        return exc.code
    except SystemExit as exc:
        return 0 if exc.code is None else int(exc.code)
    except KeyboardInterrupt:
        return FAILURE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
