"""Compile agent-session JSONL logs into line-consistent views.

The full view is the canonical transcript; its physical line numbers are the
coordinates every pointer in the UI and adaptive views refers to.
"""

__version__ = "0.1.0"

from .errors import (
    LineAssignmentError,
    PredicateError,
    SpanError,
    StrictModeError,
    TraceviewsError,
    UnassignedDocumentError,
)
from .ir import (
    DEFAULT_LAYOUT,
    Document,
    LayoutRules,
    Node,
    NodeKind,
    ParseOptions,
    Section,
    assign_lines,
    parse,
    reassemble_split_messages,
)
from .lexer import ContentBlock, Diagnostic, RawRecord, RecordKind, Role, classify_record, lex_stream
from .normalize import (
    MarkupRule,
    MediaArtifact,
    compile_tool_input,
    extract_inline_media,
    is_internal_tool,
    strip_ansi_control,
    strip_harness_markup,
    strip_read_prefix,
)
from .pipeline import compile_file, compile_source
from .predicate import MATCH_ALL, MATCH_NOTHING, Predicate, RegexPredicate, build_regex_predicate, match_lines
from .spans import LineSpan, Pointer
from .views import RenderedView, ViewKind, emit_adaptive, emit_full, emit_ui, slice_span, summarize_tool_call

__all__ = [
    "DEFAULT_LAYOUT",
    "MATCH_ALL",
    "MATCH_NOTHING",
    "assign_lines",
    "build_regex_predicate",
    "classify_record",
    "compile_file",
    "compile_source",
    "compile_tool_input",
    "ContentBlock",
    "Diagnostic",
    "Document",
    "emit_adaptive",
    "emit_full",
    "emit_ui",
    "extract_inline_media",
    "is_internal_tool",
    "LayoutRules",
    "lex_stream",
    "LineAssignmentError",
    "LineSpan",
    "MarkupRule",
    "match_lines",
    "MediaArtifact",
    "Node",
    "NodeKind",
    "parse",
    "ParseOptions",
    "Pointer",
    "Predicate",
    "PredicateError",
    "RawRecord",
    "reassemble_split_messages",
    "RecordKind",
    "RegexPredicate",
    "RenderedView",
    "Role",
    "Section",
    "slice_span",
    "SpanError",
    "StrictModeError",
    "strip_ansi_control",
    "strip_harness_markup",
    "strip_read_prefix",
    "summarize_tool_call",
    "TraceviewsError",
    "UnassignedDocumentError",
    "ViewKind",
]
