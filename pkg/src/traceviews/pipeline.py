"""lex -> parse -> reassemble -> assign, in one call."""

from __future__ import annotations

from pathlib import Path

from .ir import DEFAULT_LAYOUT, Document, LayoutRules, ParseOptions, assign_lines, parse, reassemble_split_messages
from .lexer import Diagnostic, RawRecord, lex_stream


def compile_source(
    source: str,
    *,
    strict: bool = False,
    options: ParseOptions | None = None,
    layout: LayoutRules = DEFAULT_LAYOUT,
) -> Document:
    """Compile JSONL text to a line-assigned document.

    Lexer diagnostics come first in ``doc.diagnostics``, followed by parse
    and reassembly diagnostics.  Raises :class:`StrictModeError` in strict
    mode on malformed input.
    """
    records, lex_diags = lex_stream(source, strict=strict)
    return compile_records(records, lex_diags, options=options, layout=layout)


def compile_records(
    records: list[RawRecord],
    lex_diags: list[Diagnostic] = (),
    *,
    options: ParseOptions | None = None,
    layout: LayoutRules = DEFAULT_LAYOUT,
) -> Document:
    doc = parse(records, options)
    doc.diagnostics[:0] = lex_diags
    reassemble_split_messages(doc)
    return assign_lines(doc, layout)


def compile_file(path: str | Path, **kwargs) -> Document:
    return compile_source(read_source(path), **kwargs)


def read_source(path: str | Path) -> str:
    # newline="" keeps CRLF visible to the lexer, which strips it per line.
    with open(path, encoding="utf-8", errors="replace", newline="") as fh:
        return fh.read()

