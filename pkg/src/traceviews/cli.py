"""Command-line front end.

    traceviews compile SESSION.jsonl --out DIR [--strict] [--file-label NAME] [--gutter]
    traceviews grep PATTERN SESSION.jsonl [--index | --document] [-i]
    traceviews slice SESSION.jsonl RANGES
    traceviews stats SESSION.jsonl [--json]

Exit codes: 0 success, 1 strict-mode failure (compile) or no match (grep),
2 I/O or usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import tempfile
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from . import __version__
from .errors import PredicateError, SpanError, StrictModeError
from .ir import Document, NodeKind, ParseOptions
from .lexer import RecordKind, lex_stream
from .pipeline import compile_records, compile_source, read_source
from .predicate import build_regex_predicate
from .spans import LineSpan
from .views import emit_adaptive, emit_full, emit_ui, render_gutter, slice_span

MANIFEST_SCHEMA_VERSION = 1
FULL_VIEW_NAME = "full.txt"
UI_VIEW_NAME = "ui.txt"
GUTTER_VIEW_NAME = "full.gutter.txt"
MEDIA_DIR_NAME = "media"
MANIFEST_NAME = "manifest.json"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


@dataclass
class CompileManifest:
    source_path: str
    full_view_path: str
    ui_view_path: str
    media_dir: str
    total_lines: int
    section_count: int
    diagnostics: list[dict[str, Any]] = field(default_factory=list)
    tool_version: str = __version__
    schema_version: int = MANIFEST_SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, ensure_ascii=False) + "\n"


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _stdout(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def _err(message: str) -> None:
    print(f"traceviews: {message}", file=sys.stderr)


def _load(path: str) -> str:
    return read_source(path)


def cmd_compile(args: argparse.Namespace) -> int:
    try:
        source = _load(args.session)
    except OSError as exc:
        _err(f"cannot read {args.session}: {exc.strerror or exc}")
        return EXIT_ERROR

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=out))
    except OSError as exc:
        _err(f"cannot create output directory {out}: {exc.strerror or exc}")
        return EXIT_ERROR

    try:
        try:
            doc = compile_source(
                source,
                strict=args.strict,
                options=ParseOptions(media_dir=staging / MEDIA_DIR_NAME),
            )
        except StrictModeError as exc:
            _err(f"strict mode: {exc}")
            return EXIT_FAIL

        full = emit_full(doc)
        ui = emit_ui(doc, args.file_label)
        manifest = CompileManifest(
            source_path=str(args.session),
            full_view_path=FULL_VIEW_NAME,
            ui_view_path=UI_VIEW_NAME,
            media_dir=MEDIA_DIR_NAME,
            total_lines=doc.total_lines,
            section_count=len(doc.sections),
            diagnostics=[d.to_json() for d in doc.diagnostics],
        )
        _write_text(staging / FULL_VIEW_NAME, full.text)
        _write_text(staging / UI_VIEW_NAME, ui.text)
        if args.gutter:
            _write_text(staging / GUTTER_VIEW_NAME, render_gutter(doc))
        _write_text(staging / MANIFEST_NAME, manifest.to_json())

        # Publish: nothing lands in --out until every file is complete.
        for stale in (MEDIA_DIR_NAME, GUTTER_VIEW_NAME):
            target = out / stale
            if target.is_dir():
                shutil.rmtree(target)
            elif target.exists():
                target.unlink()
        for name in (MEDIA_DIR_NAME, GUTTER_VIEW_NAME, FULL_VIEW_NAME, UI_VIEW_NAME, MANIFEST_NAME):
            if (staging / name).exists():
                os.replace(staging / name, out / name)
    except OSError as exc:
        _err(f"cannot write to {out}: {exc.strerror or exc}")
        return EXIT_ERROR
    finally:
        shutil.rmtree(staging, ignore_errors=True)

    print(
        f"{out / FULL_VIEW_NAME}: {doc.total_lines} lines, {len(doc.sections)} sections, "
        f"{len(doc.diagnostics)} diagnostics"
    )
    return EXIT_OK


def _compile_for_query(path: str) -> Document:
    return compile_source(_load(path))


def cmd_grep(args: argparse.Namespace) -> int:
    try:
        predicate = build_regex_predicate(args.pattern, case_sensitive=not args.ignore_case)
    except PredicateError as exc:
        _err(str(exc))
        return EXIT_ERROR
    try:
        doc = _compile_for_query(args.session)
    except OSError as exc:
        _err(f"cannot read {args.session}: {exc.strerror or exc}")
        return EXIT_ERROR
    view = emit_adaptive(doc, predicate, "index" if args.index else "document", args.file_label)
    _stdout(view.text)
    return EXIT_OK if view.pointers else EXIT_FAIL


def cmd_slice(args: argparse.Namespace) -> int:
    try:
        span = LineSpan.parse(args.ranges)
    except SpanError as exc:
        _err(str(exc))
        return EXIT_ERROR
    try:
        doc = _compile_for_query(args.session)
    except OSError as exc:
        _err(f"cannot read {args.session}: {exc.strerror or exc}")
        return EXIT_ERROR
    try:
        text = slice_span(doc, span)
    except SpanError as exc:
        _err(str(exc))
        return EXIT_ERROR
    _stdout(text + "\n")
    return EXIT_OK


def session_stats(source: str) -> dict[str, Any]:
    records, lex_diags = lex_stream(source)
    record_counts = Counter(r.kind.value for r in records)
    filtered = [d for d in lex_diags if d.record_kind is not None]
    record_counts.update(d.record_kind.value for d in filtered)
    doc = compile_records(records, lex_diags)
    node_counts = Counter(n.node_kind.value for n in doc.nodes())
    full_lines = emit_full(doc).line_count
    ui_lines = emit_ui(doc).line_count
    return {
        "records": {kind.value: record_counts.get(kind.value, 0) for kind in RecordKind},
        "filtered_records": len(filtered),
        "nodes": {kind.value: node_counts.get(kind.value, 0) for kind in NodeKind},
        "sections": len(doc.sections),
        "total_lines": full_lines,
        "ui_lines": ui_lines,
        "ui_full_ratio": round(ui_lines / full_lines, 6) if full_lines else 0.0,
        "diagnostics": len(doc.diagnostics),
    }


def cmd_stats(args: argparse.Namespace) -> int:
    try:
        stats = session_stats(_load(args.session))
    except OSError as exc:
        _err(f"cannot read {args.session}: {exc.strerror or exc}")
        return EXIT_ERROR
    if args.json:
        _stdout(json.dumps(stats, indent=2) + "\n")
        return EXIT_OK
    lines = []
    for key, value in stats.items():
        if isinstance(value, dict):
            lines.extend(f"{key}.{sub}: {count}" for sub, count in value.items())
        elif isinstance(value, float):
            lines.append(f"{key}: {value:.4f}")
        else:
            lines.append(f"{key}: {value}")
    _stdout("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="traceviews",
        description="Compile agent-session JSONL logs into full, UI and adaptive views.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="write full.txt, ui.txt, media/ and manifest.json")
    p.add_argument("session")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--strict", action="store_true", help="abort on malformed input lines")
    p.add_argument("--file-label", default=FULL_VIEW_NAME, help="label used in pointers (default: full.txt)")
    p.add_argument("--gutter", action="store_true", help="also write full.gutter.txt with line numbers")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser(
        "grep",
        help="adaptive view: matching blocks with role tags and pointers",
        description="Patterns use Python `re` syntax and match anywhere in a line.",
    )
    p.add_argument("pattern")
    p.add_argument("session")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--index", action="store_true", help="flat list of matching blocks")
    mode.add_argument("--document", action="store_true", help="grouped by section (default)")
    p.add_argument("-i", "--ignore-case", action="store_true")
    p.add_argument("--file-label", default=FULL_VIEW_NAME)
    p.set_defaults(func=cmd_grep)

    p = sub.add_parser("slice", help="print full-view lines for ranges like 19-21,24-34")
    p.add_argument("session")
    p.add_argument("ranges")
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("stats", help="record, node and line counts")
    p.add_argument("session")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    for stream in (sys.stdout, sys.stderr):
        try:
            stream.reconfigure(encoding="utf-8", newline="\n")
        except (AttributeError, ValueError):
            pass
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
