"""Lower an assigned document into its views.

None of these functions touch the line map; they read it.  Every pointer
they print is built from node spans, so it resolves into the full view.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .errors import SpanError
from .ir import Document, Node, NodeKind, Section
from .lexer import Role
from .predicate import Predicate, match_lines
from .spans import LineSpan, Pointer

DEFAULT_FILE_LABEL = "file.txt"
MAX_HEADLINE_CHARS = 60
ELLIPSIS = "…"
SLICE_GAP_MARKER = "⋯"

DEFAULT_HEADLINE_PARAMS = {
    "Read": "file_path",
    "Edit": "file_path",
    "Write": "file_path",
    "NotebookEdit": "file_path",
    "Bash": "command",
    "Grep": "pattern",
    "Glob": "pattern",
    "WebFetch": "url",
}
_UNTRUNCATED_PARAMS = frozenset({"file_path"})


class ViewKind(str, Enum):
    FULL = "full"
    UI = "ui"
    ADAPTIVE_DOCUMENT = "adaptive_document"
    ADAPTIVE_INDEX = "adaptive_index"


@dataclass
class RenderedView:
    view_kind: ViewKind
    text: str
    source_total_lines: int
    pointers: list[tuple[str, LineSpan]] = field(default_factory=list)

    @property
    def line_count(self) -> int:
        return self.text.count("\n")


def _join(lines: list[str]) -> str:
    return "".join(line + "\n" for line in lines)


def emit_full(doc: Document) -> RenderedView:
    doc.require_assigned()
    return RenderedView(ViewKind.FULL, _join([entry.text for entry in doc.line_map]), doc.total_lines)


def render_gutter(doc: Document) -> str:
    """Full view with right-aligned ``<n> | `` prefixes, for human reading."""
    doc.require_assigned()
    width = len(str(doc.total_lines))
    return _join([f"{n:>{width}} | {entry.text}" for n, entry in enumerate(doc.line_map, 1)])


def _is_scalar(value: Any) -> bool:
    return isinstance(value, (str, int, float, bool))


def _scalar_text(value: Any) -> str:
    return value if isinstance(value, str) else json.dumps(value)


def _headline(node: Node, headline_params: dict[str, str]) -> str:
    params = node.tool_input if isinstance(node.tool_input, dict) else {}
    key = headline_params.get(node.tool_name or "")
    if key is None or not _is_scalar(params.get(key)):
        key = next((k for k, v in params.items() if _is_scalar(v)), None)
    if key is None:
        return "(no args)"
    text = _scalar_text(params[key])
    first, _, rest = text.partition("\n")
    if key not in _UNTRUNCATED_PARAMS and (len(first) > MAX_HEADLINE_CHARS or rest):
        first = first[:MAX_HEADLINE_CHARS] + ELLIPSIS
    elif rest:
        first += ELLIPSIS
    return f'"{first}"'


def tool_call_pointer(node: Node, paired_result: Node | None, file_label: str = DEFAULT_FILE_LABEL) -> Pointer:
    if node.span is None:
        raise ValueError("tool call has no assigned span")
    span = node.span
    if paired_result is not None and paired_result.span is not None:
        span = span.union(paired_result.span)
    return Pointer(span, file_label)


def summarize_tool_call(
    node: Node,
    paired_result: Node | None = None,
    file_label: str = DEFAULT_FILE_LABEL,
    headline_params: dict[str, str] | None = None,
) -> str:
    """One-line summary: ``* Read "src/config.py" (file.txt:19-21,24-34)``."""
    if node.node_kind is not NodeKind.TOOL_CALL:
        raise ValueError(f"expected a tool_call node, got {node.node_kind.value}")
    headline = _headline(node, DEFAULT_HEADLINE_PARAMS if headline_params is None else headline_params)
    return f"* {node.tool_name} {headline} {tool_call_pointer(node, paired_result, file_label)}"


@dataclass
class _UiGroup:
    role: Role
    items: list[tuple[str, list[str]]] = field(default_factory=list)


def emit_ui(
    doc: Document,
    file_label: str = DEFAULT_FILE_LABEL,
    *,
    max_block_lines: int | None = None,
    headline_params: dict[str, str] | None = None,
) -> RenderedView:
    """What the user saw: utterances, replies and one-line tool summaries.

    Thinking, tool results and system sections are dropped, tool calls become
    summaries, and adjacent assistant sections share one header.
    """
    doc.require_assigned()
    pointers: list[tuple[str, LineSpan]] = []
    groups: list[_UiGroup] = []
    for section in doc.sections:
        if section.role is Role.SYSTEM:
            continue
        if not (section.role is Role.ASSISTANT and groups and groups[-1].role is Role.ASSISTANT):
            groups.append(_UiGroup(section.role))
        group = groups[-1]
        for node in section.nodes:
            if node.node_kind in (NodeKind.USER, NodeKind.ASSISTANT):
                lines = list(node.content_lines)
                if max_block_lines is not None and len(lines) > max_block_lines:
                    pointer = Pointer(node.span, file_label)
                    pointers.append((str(pointer), pointer.span))
                    hidden = len(lines) - max_block_lines
                    lines = lines[:max_block_lines] + [f"[{ELLIPSIS} {hidden} more lines {pointer}]"]
                group.items.append(("text", lines))
            elif node.node_kind is NodeKind.TOOL_CALL:
                result = doc.result_for(node.tool_use_id)
                pointer = tool_call_pointer(node, result, file_label)
                pointers.append((str(pointer), pointer.span))
                group.items.append(
                    ("summary", [summarize_tool_call(node, result, file_label, headline_params)])
                )

    out: list[str] = []
    for group in groups:
        if not group.items:
            continue
        if out:
            out.append("")
        out.append(f"=== {group.role.value} ===")
        prev = None
        for kind, lines in group.items:
            if prev is not None and not (prev == kind == "summary"):
                out.append("")
            out.extend(lines)
            prev = kind
    return RenderedView(ViewKind.UI, _join(out), doc.total_lines, pointers)


def _block_title(node: Node) -> str:
    return node.role_tag + (f" {node.tool_name}" if node.tool_name else "")


def emit_adaptive(
    doc: Document,
    predicate: Predicate,
    modality: str = "document",
    file_label: str = DEFAULT_FILE_LABEL,
) -> RenderedView:
    """Project the trace through ``predicate``.

    Only blocks with at least one matching line appear, each under a pointer
    to the whole block and its role tag, followed by ``<line>: <text>`` for
    every match.  The document modality keeps section headers; the index
    modality is a flat list in line order.
    """
    doc.require_assigned()
    if modality not in ("document", "index"):
        raise ValueError(f"unknown modality {modality!r}")
    matched: list[tuple[Section, Node, list[tuple[int, str]]]] = []
    for section in doc.sections:
        for node in section.nodes:
            hits = match_lines(node, predicate)
            if hits:
                matched.append((section, node, hits))

    out: list[str] = []
    pointers: list[tuple[str, LineSpan]] = []
    layout = doc.layout
    if modality == "document":
        current: Section | None = None
        for section, node, hits in matched:
            if out:
                out.append("")
            if section is not current:
                out.append(layout.header(section))
                current = section
            pointer = Pointer(node.span, file_label)
            out.append(f"{pointer} {_block_title(node)}")
            out.extend(f"{n}: {text}" for n, text in hits)
            pointers.append((str(pointer), node.span))
        kind = ViewKind.ADAPTIVE_DOCUMENT
    else:
        for _, node, hits in sorted(matched, key=lambda item: item[1].span.start):
            if out:
                out.append("")
            pointer = Pointer(node.span, file_label)
            out.append(f"{_block_title(node)} {pointer}")
            out.extend(f"{n}: {text}" for n, text in hits)
            pointers.append((str(pointer), node.span))
        kind = ViewKind.ADAPTIVE_INDEX
    return RenderedView(kind, _join(out), doc.total_lines, pointers)


def slice_span(doc: Document, span: LineSpan) -> str:
    """Dereference a pointer: the full-view lines of each range, verbatim.

    Ranges are separated by a single ``⋯`` marker line.
    """
    doc.require_assigned()
    total = doc.total_lines
    for start, end in span.ranges:
        if end > total:
            raise SpanError(f"range {start}-{end} is outside the full view (total_lines={total})")
    chunks = ["\n".join(doc.line(n) for n in range(start, end + 1)) for start, end in span.ranges]
    return f"\n{SLICE_GAP_MARKER}\n".join(chunks)
