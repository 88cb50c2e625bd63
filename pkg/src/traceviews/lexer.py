"""Tokenize a session JSONL log into typed records.

Accepted record shape::

    {"type": ..., "uuid"?: ..., "timestamp"?: ...,
     "message"?: {"id"?: ..., "role": ..., "content": str | [block, ...]}}

``system`` records may carry their text in a top-level ``content`` field and
``summary`` records in a top-level ``summary`` field.  Records without
conversational content are dropped here, each with a warn diagnostic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .errors import StrictModeError


class RecordKind(str, Enum):
    USER = "user"
    ASSISTANT = "assistant"
    SYSTEM = "system"
    SUMMARY = "summary"
    QUEUE_OPERATION = "queue_operation"
    FILE_HISTORY_SNAPSHOT = "file_history_snapshot"
    PROGRESS = "progress"
    API_ERROR = "api_error"
    UNKNOWN = "unknown"


class Role(str, Enum):
    USER = "user"
    ASSISTANT = "assistant"
    SYSTEM = "system"
    NONE = "none"


# Extensible: runtimes keep adding bookkeeping record types.  Anything not in
# RecordKind lands in UNKNOWN and is filtered too.
FILTERED_KINDS = frozenset(
    {
        RecordKind.QUEUE_OPERATION,
        RecordKind.FILE_HISTORY_SNAPSHOT,
        RecordKind.PROGRESS,
        RecordKind.API_ERROR,
        RecordKind.UNKNOWN,
    }
)

_KIND_BY_TAG = {kind.value: kind for kind in RecordKind if kind is not RecordKind.UNKNOWN}

_ROLE_BY_KIND = {
    RecordKind.USER: Role.USER,
    RecordKind.ASSISTANT: Role.ASSISTANT,
    RecordKind.SYSTEM: Role.SYSTEM,
    RecordKind.SUMMARY: Role.SYSTEM,
}


class BlockType(str, Enum):
    TEXT = "text"
    THINKING = "thinking"
    TOOL_USE = "tool_use"
    TOOL_RESULT = "tool_result"
    IMAGE = "image"


@dataclass(frozen=True)
class ContentBlock:
    """One content block of a record.

    For image blocks ``text`` holds the base64 payload and ``media_type`` the
    declared type.  A tool_result whose content was a list keeps the parts in
    ``parts`` (text and image blocks) so media inside results survive.
    """

    block_type: BlockType
    text: str = ""
    tool_name: str | None = None
    tool_input_json: str | None = None
    tool_use_id: str | None = None
    media_type: str | None = None
    parts: tuple[ContentBlock, ...] = ()

    def __post_init__(self) -> None:
        if self.block_type is BlockType.TOOL_USE and not self.tool_name:
            raise ValueError("tool_use block requires tool_name")
        if self.block_type is BlockType.TOOL_RESULT and not self.tool_use_id:
            raise ValueError("tool_result block requires tool_use_id")


@dataclass(frozen=True)
class RawRecord:
    kind: RecordKind
    role: Role
    source_index: int
    content: tuple[ContentBlock, ...] = ()
    message_id: str | None = None
    timestamp: str | None = None


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "warn" | "error"
    source_index: int
    message: str
    record_kind: RecordKind | None = field(default=None, compare=False)

    def to_json(self) -> dict[str, Any]:
        return {"severity": self.severity, "source_index": self.source_index, "message": self.message}


def classify_record(obj: dict[str, Any]) -> RecordKind:
    tag = obj.get("type")
    if not isinstance(tag, str):
        return RecordKind.UNKNOWN
    return _KIND_BY_TAG.get(tag.replace("-", "_"), RecordKind.UNKNOWN)


def _as_text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return json.dumps(value, ensure_ascii=False)


def _image_block(item: dict[str, Any]) -> ContentBlock:
    source = item.get("source") or {}
    return ContentBlock(
        BlockType.IMAGE,
        text=_as_text(source.get("data")),
        media_type=source.get("media_type"),
    )


def _tool_result_block(item: dict[str, Any], index: int, diags: list[Diagnostic]) -> ContentBlock:
    body = item.get("content")
    parts: list[ContentBlock] = []
    if isinstance(body, list):
        for part in body:
            if not isinstance(part, dict):
                parts.append(ContentBlock(BlockType.TEXT, text=_as_text(part)))
            elif part.get("type") == "image":
                parts.append(_image_block(part))
            elif part.get("type") == "text":
                parts.append(ContentBlock(BlockType.TEXT, text=_as_text(part.get("text"))))
            else:
                parts.append(ContentBlock(BlockType.TEXT, text=_as_text(part)))
        text = "\n".join(p.text for p in parts if p.block_type is BlockType.TEXT)
    else:
        text = _as_text(body)
    tool_use_id = item.get("tool_use_id")
    if not tool_use_id:
        diags.append(Diagnostic("warn", index, "tool_result without tool_use_id; assigned a placeholder id"))
        tool_use_id = f"<missing:{index}>"
    return ContentBlock(
        BlockType.TOOL_RESULT,
        text=text,
        tool_use_id=str(tool_use_id),
        parts=tuple(parts) if any(p.block_type is BlockType.IMAGE for p in parts) else (),
    )


def _content_blocks(content: Any, index: int, diags: list[Diagnostic]) -> list[ContentBlock]:
    if content is None:
        return []
    if isinstance(content, str):
        return [ContentBlock(BlockType.TEXT, text=content)]
    if not isinstance(content, list):
        diags.append(Diagnostic("warn", index, f"unsupported content of type {type(content).__name__}"))
        return []

    blocks: list[ContentBlock] = []
    for item in content:
        if isinstance(item, str):
            blocks.append(ContentBlock(BlockType.TEXT, text=item))
            continue
        if not isinstance(item, dict):
            diags.append(Diagnostic("warn", index, "skipped non-object content block"))
            continue
        btype = item.get("type")
        if btype == "text":
            blocks.append(ContentBlock(BlockType.TEXT, text=_as_text(item.get("text"))))
        elif btype == "thinking":
            blocks.append(ContentBlock(BlockType.THINKING, text=_as_text(item.get("thinking"))))
        elif btype == "redacted_thinking":
            continue
        elif btype == "tool_use":
            name = item.get("name") or "<unnamed>"
            raw_input = item.get("input", {})
            input_json = raw_input if isinstance(raw_input, str) else json.dumps(raw_input, ensure_ascii=False)
            blocks.append(
                ContentBlock(
                    BlockType.TOOL_USE,
                    tool_name=str(name),
                    tool_input_json=input_json,
                    tool_use_id=None if item.get("id") is None else str(item["id"]),
                )
            )
        elif btype == "tool_result":
            blocks.append(_tool_result_block(item, index, diags))
        elif btype == "image":
            blocks.append(_image_block(item))
        else:
            diags.append(Diagnostic("warn", index, f"skipped content block of unknown type {btype!r}"))
    return blocks


def _build_record(obj: dict[str, Any], kind: RecordKind, index: int, diags: list[Diagnostic]) -> RawRecord:
    message = obj.get("message")
    message_id = None
    if isinstance(message, dict):
        content = message.get("content")
        if message.get("id") is not None:
            message_id = str(message["id"])
    elif kind is RecordKind.SUMMARY:
        content = obj.get("summary")
    else:
        content = obj.get("content")
    timestamp = obj.get("timestamp")
    return RawRecord(
        kind=kind,
        role=_ROLE_BY_KIND.get(kind, Role.NONE),
        source_index=index,
        content=tuple(_content_blocks(content, index, diags)),
        message_id=message_id,
        timestamp=None if timestamp is None else str(timestamp),
    )


def lex_stream(source: str, *, strict: bool = False) -> tuple[list[RawRecord], list[Diagnostic]]:
    """Lex newline-delimited JSON into records.

    ``source_index`` is the 0-based physical line number of the record.
    Lines are split on LF only (a trailing CR is dropped), so U+2028 and
    friends inside JSON strings never break a record.  In strict mode a
    malformed line raises :class:`StrictModeError`.
    """
    records: list[RawRecord] = []
    diags: list[Diagnostic] = []
    for index, line in enumerate(source.split("\n")):
        if line.endswith("\r"):
            line = line[:-1]
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            diag = Diagnostic("error" if strict else "warn", index, f"malformed JSON: {exc.msg} (column {exc.colno})")
            diags.append(diag)
            if strict:
                raise StrictModeError(f"line {index + 1}: {diag.message}", diags) from exc
            continue
        if not isinstance(obj, dict):
            diag = Diagnostic("error" if strict else "warn", index, "record is not a JSON object")
            diags.append(diag)
            if strict:
                raise StrictModeError(f"line {index + 1}: {diag.message}", diags)
            continue
        kind = classify_record(obj)
        if kind in FILTERED_KINDS:
            label = obj.get("type") if kind is RecordKind.UNKNOWN else kind.value
            diags.append(Diagnostic("warn", index, f"filtered record of kind {label!r}", record_kind=kind))
            continue
        records.append(_build_record(obj, kind, index, diags))
    return records, diags
