"""Typed, sectioned IR and the one-time line-number assignment.

Parsing turns lexed records into sections of nodes, normalizing each content
block on the way.  :func:`assign_lines` then renders every section header,
block delimiter, separator and content line in one sequential pass; the
resulting line map is the coordinate system all views point into.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterator, NamedTuple

from .errors import LineAssignmentError, UnassignedDocumentError
from .lexer import BlockType, ContentBlock, Diagnostic, RawRecord, Role
from .normalize import (
    DEFAULT_INTERNAL_TOOLS,
    DEFAULT_MARKUP_RULES,
    MediaArtifact,
    MarkupRule,
    compile_tool_input,
    extract_inline_media,
    is_internal_tool,
    strip_ansi_control,
    strip_harness_markup,
    strip_read_prefix,
)
from .spans import LineSpan


class NodeKind(str, Enum):
    USER = "user"
    ASSISTANT = "assistant"
    THINKING = "thinking"
    TOOL_CALL = "tool_call"
    TOOL_RESULT = "tool_result"
    SYSTEM = "system"


TEXT_KINDS = frozenset({NodeKind.USER, NodeKind.ASSISTANT})


@dataclass(eq=False)
class Node:
    node_kind: NodeKind
    content_lines: tuple[str, ...]
    tool_name: str | None = None
    tool_use_id: str | None = None
    tool_input: Any = None
    section_index: int = 0
    block_index: int = 0
    _span: LineSpan | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.content_lines = tuple(self.content_lines)
        if not self.content_lines:
            raise ValueError("a node has at least one content line")
        if any("\n" in line for line in self.content_lines):
            raise ValueError("content lines must not contain newlines")
        if self.node_kind is NodeKind.TOOL_CALL and not self.tool_name:
            raise ValueError("tool_call node requires tool_name")
        if self.node_kind is NodeKind.TOOL_RESULT and not self.tool_use_id:
            raise ValueError("tool_result node requires tool_use_id")

    @property
    def span(self) -> LineSpan | None:
        return self._span

    def assign_span(self, span: LineSpan) -> None:
        if self._span is not None:
            raise LineAssignmentError("node span is immutable once assigned")
        self._span = span

    @property
    def role_tag(self) -> str:
        return f"[{self.node_kind.value}]"


@dataclass(eq=False)
class Section:
    section_index: int
    role: Role
    nodes: list[Node]
    message_ids: list[str] = field(default_factory=list)
    source_index: int = -1


class StructuralKind(str, Enum):
    HEADER = "header"
    DELIMITER = "delimiter"
    BLANK = "blank"


@dataclass(frozen=True)
class Structural:
    """Owner of a scaffolding line (header, delimiter, separator)."""

    kind: StructuralKind
    section_index: int


class MappedLine(NamedTuple):
    owner: Node | Structural
    text: str


@dataclass(frozen=True)
class LayoutRules:
    """How the full view is laid out around node content."""

    header_format: str = "=== turn {number}: {role} ==="
    blank_between_sections: bool = True
    blank_after_section: bool = False
    blank_between_blocks: bool = True

    def header(self, section: Section) -> str:
        return self.header_format.format(number=section.section_index + 1, role=section.role.value)

    def needs_delimiter(self, node: Node) -> bool:
        # A text node opening its section is introduced by the header itself.
        return node.node_kind not in TEXT_KINDS or node.block_index > 0

    @staticmethod
    def delimiter(node: Node) -> str:
        if node.tool_name:
            return f"--- {node.node_kind.value}: {node.tool_name} ---"
        return f"--- {node.node_kind.value} ---"


DEFAULT_LAYOUT = LayoutRules()


@dataclass(frozen=True)
class ParseOptions:
    markup_rules: tuple[MarkupRule, ...] = DEFAULT_MARKUP_RULES
    internal_tools: frozenset[str] = DEFAULT_INTERNAL_TOOLS
    read_tools: frozenset[str] = frozenset({"Read"})
    media_dir: Path | None = None


@dataclass(eq=False)
class Document:
    sections: list[Section] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    media: list[MediaArtifact] = field(default_factory=list)
    layout: LayoutRules | None = None
    _line_map: tuple[MappedLine, ...] | None = field(default=None, repr=False)
    _results: dict[str, Node] | None = field(default=None, repr=False)

    @property
    def assigned(self) -> bool:
        return self._line_map is not None

    @property
    def line_map(self) -> tuple[MappedLine, ...]:
        if self._line_map is None:
            raise UnassignedDocumentError("document has no line assignment yet")
        return self._line_map

    @property
    def total_lines(self) -> int:
        return len(self.line_map)

    def require_assigned(self) -> None:
        if self._line_map is None:
            raise UnassignedDocumentError("views can only be lowered from a line-assigned document")

    def line(self, number: int) -> str:
        return self.line_map[number - 1].text

    def owner(self, number: int) -> Node | Structural:
        return self.line_map[number - 1].owner

    def nodes(self) -> Iterator[Node]:
        for section in self.sections:
            yield from section.nodes

    def structural_lines(self) -> set[int]:
        return {i for i, entry in enumerate(self.line_map, 1) if isinstance(entry.owner, Structural)}

    def result_for(self, tool_use_id: str | None) -> Node | None:
        if tool_use_id is None:
            return None
        if self._results is None:
            self._results = {}
            for node in self.nodes():
                if node.node_kind is NodeKind.TOOL_RESULT and node.tool_use_id is not None:
                    self._results.setdefault(node.tool_use_id, node)
        return self._results.get(tool_use_id)


def _content_lines(text: str) -> list[str]:
    """Split on LF and trim whitespace-only lines at both ends."""
    lines = text.split("\n")
    while lines and not lines[0].strip():
        lines.pop(0)
    while lines and not lines[-1].strip():
        lines.pop()
    return lines


class _Parser:
    def __init__(self, options: ParseOptions):
        self.opts = options
        self.diags: list[Diagnostic] = []
        self.sections: list[Section] = []
        self.media: list[MediaArtifact] = []
        self.tool_names: dict[str, str] = {}
        self.dropped_ids: set[str] = set()
        self.ordinal = 0

    def emit_section(self, role: Role, nodes: list[Node], rec: RawRecord) -> None:
        if not nodes:
            return
        ids = [rec.message_id] if rec.message_id else []
        self.sections.append(Section(len(self.sections), role, nodes, ids, rec.source_index))

    def image(self, block: ContentBlock, rec: RawRecord) -> str:
        self.ordinal += 1
        replaced, artifact = extract_inline_media(
            block, self.opts.media_dir, self.ordinal, self.diags, rec.source_index
        )
        if artifact is not None:
            self.media.append(artifact)
        return replaced.text

    def text_node(self, kind: NodeKind, text: str, rec: RawRecord, strip_markup: bool) -> Node | None:
        text = strip_ansi_control(text)
        if strip_markup:
            text, _ = strip_harness_markup(text, self.opts.markup_rules, self.diags, rec.source_index)
        lines = _content_lines(text)
        return Node(kind, tuple(lines)) if lines else None

    def tool_call(self, block: ContentBlock, rec: RawRecord) -> Node | None:
        name = block.tool_name or ""
        if is_internal_tool(name, self.opts.internal_tools):
            if block.tool_use_id:
                self.dropped_ids.add(block.tool_use_id)
            return None
        if block.tool_use_id:
            self.tool_names[block.tool_use_id] = name
        raw = block.tool_input_json or "{}"
        try:
            tool_input = json.loads(raw)
        except json.JSONDecodeError:
            tool_input = None
        rendered = compile_tool_input(raw, self.diags, rec.source_index)
        if tool_input is None:
            rendered = strip_ansi_control(rendered)
        lines = rendered[:-1].split("\n") if rendered.endswith("\n") else rendered.split("\n")
        return Node(NodeKind.TOOL_CALL, tuple(lines), tool_name=name, tool_use_id=block.tool_use_id, tool_input=tool_input)

    def tool_result(self, block: ContentBlock, rec: RawRecord) -> Node | None:
        use_id = block.tool_use_id
        if use_id in self.dropped_ids:
            return None
        name = self.tool_names.get(use_id or "")
        if name is None:
            self.diags.append(
                Diagnostic("warn", rec.source_index, f"tool_result {use_id!r} has no matching tool_use; kept")
            )
        if block.parts:
            pieces = [self.image(p, rec) if p.block_type is BlockType.IMAGE else p.text for p in block.parts]
            text = "\n".join(pieces)
        else:
            text = block.text
        text = strip_ansi_control(text)
        if name in self.opts.read_tools:
            text = strip_read_prefix(text)
        lines = _content_lines(text) or [""]
        return Node(NodeKind.TOOL_RESULT, tuple(lines), tool_name=name, tool_use_id=use_id)

    def record(self, rec: RawRecord) -> None:
        if rec.role is Role.SYSTEM:
            nodes = []
            for block in rec.content:
                text = self.image(block, rec) if block.block_type is BlockType.IMAGE else block.text
                node = self.text_node(NodeKind.SYSTEM, text, rec, strip_markup=True)
                if node:
                    nodes.append(node)
            self.emit_section(Role.SYSTEM, nodes, rec)
            return

        is_user = rec.role is Role.USER
        text_kind = NodeKind.USER if is_user else NodeKind.ASSISTANT
        # A user record alternates between utterance runs and tool-result
        # runs; result runs become assistant-role sections.
        run: list[Node] = []
        run_role = Role.USER
        for block in rec.content:
            btype = block.block_type
            node: Node | None
            if btype is BlockType.TOOL_RESULT:
                node = self.tool_result(block, rec)
            elif btype is BlockType.TOOL_USE:
                node = self.tool_call(block, rec)
            elif btype is BlockType.THINKING:
                node = self.text_node(NodeKind.THINKING, block.text, rec, strip_markup=False)
            elif btype is BlockType.IMAGE:
                node = Node(text_kind, (self.image(block, rec),))
            else:
                node = self.text_node(text_kind, block.text, rec, strip_markup=is_user)
            if node is None:
                continue
            role = Role.USER if is_user and node.node_kind is NodeKind.USER else Role.ASSISTANT
            if run and role is not run_role:
                self.emit_section(run_role, run, rec)
                run = []
            run_role = role
            run.append(node)
        self.emit_section(run_role, run, rec)


def _renumber(sections: list[Section]) -> list[Section]:
    for si, section in enumerate(sections):
        section.section_index = si
        for bi, node in enumerate(section.nodes):
            node.section_index = si
            node.block_index = bi
    return sections


def parse(records: list[RawRecord], options: ParseOptions | None = None) -> Document:
    """Lower lexed records to an unassigned :class:`Document`.

    Harness-markup-only user turns and internal tool calls (with their
    results) produce no nodes.  Tool results carried by user records become
    assistant-role sections of ``tool_result`` nodes.
    """
    parser = _Parser(options or ParseOptions())
    for rec in records:
        parser.record(rec)
    return Document(_renumber(parser.sections), parser.diags, parser.media)


def reassemble_split_messages(doc: Document) -> Document:
    """Merge adjacent assistant sections that share a message id."""
    if doc.assigned:
        raise LineAssignmentError("cannot restructure a line-assigned document")
    merged: list[Section] = []
    seen: set[str] = set()
    for section in doc.sections:
        prev = merged[-1] if merged else None
        ids = set(section.message_ids)
        if (
            prev is not None
            and section.role is Role.ASSISTANT
            and prev.role is Role.ASSISTANT
            and ids & set(prev.message_ids)
        ):
            prev.nodes.extend(section.nodes)
            prev.message_ids.extend(i for i in section.message_ids if i not in prev.message_ids)
            continue
        if section.role is Role.ASSISTANT and ids & seen:
            dup = ", ".join(sorted(ids & seen))
            doc.diagnostics.append(
                Diagnostic("warn", section.source_index, f"message id {dup} reappears in a non-adjacent section; not merged")
            )
        seen |= ids
        merged.append(section)
    doc.sections = _renumber(merged)
    doc._results = None
    return doc


def assign_lines(doc: Document, layout: LayoutRules = DEFAULT_LAYOUT) -> Document:
    """Number every full-view line, exactly once per document.

    Node spans cover content lines only; headers, delimiters and separators
    are owned by :class:`Structural` markers.
    """
    if doc.assigned:
        raise LineAssignmentError("line assignment occurs exactly once")
    entries: list[MappedLine] = []
    for section in doc.sections:
        si = section.section_index
        if si > 0 and layout.blank_between_sections:
            entries.append(MappedLine(Structural(StructuralKind.BLANK, si), ""))
        entries.append(MappedLine(Structural(StructuralKind.HEADER, si), layout.header(section)))
        for node in section.nodes:
            if node.block_index > 0 and layout.blank_between_blocks:
                entries.append(MappedLine(Structural(StructuralKind.BLANK, si), ""))
            if layout.needs_delimiter(node):
                entries.append(MappedLine(Structural(StructuralKind.DELIMITER, si), layout.delimiter(node)))
            start = len(entries) + 1
            entries.extend(MappedLine(node, line) for line in node.content_lines)
            node.assign_span(LineSpan.single(start, len(entries)))
        if layout.blank_after_section:
            entries.append(MappedLine(Structural(StructuralKind.BLANK, si), ""))
    doc.layout = layout
    doc._line_map = tuple(entries)
    return doc
