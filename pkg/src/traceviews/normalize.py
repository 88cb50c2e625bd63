"""Content transformations applied to record payloads before IR construction."""

from __future__ import annotations

import base64
import binascii
import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from . import yamlblock
from .lexer import BlockType, ContentBlock, Diagnostic

ANSI_RE = re.compile(
    r"\x1b\[[0-?]*[ -/]*[@-~]"  # CSI
    r"|\x1b\][^\x07\x1b]*(?:\x07|\x1b\\)"  # OSC, BEL or ST terminated
    r"|\x1b[ -/]*[0-~]"  # nF and Fp/Fe/Fs escapes, e.g. ESC ( B
)
CONTROL_RE = re.compile(r"[\x00-\x08\x0b-\x1f\x7f]")
READ_PREFIX_RE = re.compile(r"^ *\d+→", re.MULTILINE)

DEFAULT_INTERNAL_TOOLS = frozenset({"TodoWrite", "ToolSearch"})
UNDECODABLE_PLACEHOLDER = "[image: <undecodable>]"


class MarkupAction(str, Enum):
    STRIP_KEEP_REST = "strip_keep_rest"
    HIDE_TURN_IF_SOLE_CONTENT = "hide_turn_if_sole_content"


@dataclass(frozen=True)
class MarkupRule:
    tag_name: str
    action: MarkupAction = MarkupAction.HIDE_TURN_IF_SOLE_CONTENT

    def __post_init__(self) -> None:
        if not self.tag_name or re.search(r"[<>\s]", self.tag_name):
            raise ValueError(f"invalid markup tag name {self.tag_name!r}")


DEFAULT_MARKUP_RULES: tuple[MarkupRule, ...] = tuple(
    MarkupRule(tag)
    for tag in (
        "system-reminder",
        "ide_opened_file",
        "command-message",
        "command-stdout",
        "local-command-stdout",
    )
)


@dataclass(frozen=True)
class MediaArtifact:
    relative_path: str
    placeholder: str
    byte_length: int


def compile_tool_input(raw_json: str, diagnostics: list[Diagnostic] | None = None, source_index: int = -1) -> str:
    """Render tool parameters as YAML with literal block scalars.

    Malformed JSON is passed through verbatim (content is never lost) and a
    warn diagnostic is appended when a list is supplied.
    """
    try:
        value = json.loads(raw_json)
    except (json.JSONDecodeError, TypeError):
        if diagnostics is not None:
            diagnostics.append(Diagnostic("warn", source_index, "tool input is not valid JSON; kept verbatim"))
        return raw_json if raw_json.endswith("\n") or not raw_json else raw_json + "\n"
    return yamlblock.dump(value)


def strip_read_prefix(tool_result_text: str) -> str:
    return READ_PREFIX_RE.sub("", tool_result_text)


def strip_ansi_control(text: str) -> str:
    return CONTROL_RE.sub("", ANSI_RE.sub("", text))


def _markup_pattern(rules: tuple[MarkupRule, ...] | list[MarkupRule]) -> re.Pattern[str] | None:
    names = sorted({r.tag_name for r in rules}, key=lambda n: (-len(n), n))
    if not names:
        return None
    alt = "|".join(re.escape(n) for n in names)
    return re.compile(rf"<(?P<close>/)?(?P<name>{alt})(?:\s[^<>]*?)?(?P<selfclose>/)?>")


def strip_harness_markup(
    text: str,
    rules=DEFAULT_MARKUP_RULES,
    diagnostics: list[Diagnostic] | None = None,
    source_index: int = -1,
) -> tuple[str, bool]:
    """Delete configured harness elements, content included.

    Matching is outermost-first: an element extends to the close tag that
    balances its opening tag, and nested elements of other tags inside it go
    with it.  An unclosed element is removed through the end of the text.
    Returns ``(residual, hide_turn)``.
    """
    pattern = _markup_pattern(tuple(rules))
    if pattern is None:
        return text, False
    actions = {r.tag_name: r.action for r in rules}

    out: list[str] = []
    pos = 0
    removed_hiding = False
    open_name: str | None = None
    open_start = 0
    depth = 0
    for m in pattern.finditer(text):
        name = m.group("name")
        if open_name is None:
            if m.group("close"):
                continue  # stray close tag is ordinary text
            if m.group("selfclose"):
                out.append(text[pos : m.start()])
                pos = m.end()
                removed_hiding |= actions[name] is MarkupAction.HIDE_TURN_IF_SOLE_CONTENT
                continue
            open_name, open_start, depth = name, m.start(), 1
            continue
        if name != open_name or m.group("selfclose"):
            continue
        depth += -1 if m.group("close") else 1
        if depth == 0:
            out.append(text[pos:open_start])
            pos = m.end()
            removed_hiding |= actions[name] is MarkupAction.HIDE_TURN_IF_SOLE_CONTENT
            open_name = None
    if open_name is not None:
        out.append(text[pos:open_start])
        pos = len(text)
        removed_hiding |= actions[open_name] is MarkupAction.HIDE_TURN_IF_SOLE_CONTENT
        if diagnostics is not None:
            diagnostics.append(
                Diagnostic("warn", source_index, f"unclosed <{open_name}> removed through end of text")
            )
    out.append(text[pos:])
    residual = "".join(out)
    if removed_hiding and not residual.strip():
        return "", True
    return residual, False


def is_internal_tool(tool_name: str, internal_tools=DEFAULT_INTERNAL_TOOLS) -> bool:
    return tool_name in internal_tools


def _media_extension(media_type: str | None) -> str:
    if media_type and "/" in media_type:
        subtype = media_type.split("/", 1)[1].split(";", 1)[0].strip().lower()
        if re.fullmatch(r"[a-z0-9.+-]+", subtype):
            return subtype.split("+", 1)[0]
    return "bin"


def extract_inline_media(
    content: ContentBlock,
    media_dir: Path | None,
    ordinal: int,
    diagnostics: list[Diagnostic] | None = None,
    source_index: int = -1,
) -> tuple[ContentBlock, MediaArtifact | None]:
    """Decode an image block to ``media_dir/img-<ordinal>.<ext>``.

    The block is replaced by a text block holding ``[image: media/...]``.
    With ``media_dir=None`` nothing is written but the placeholder and
    artifact are still produced, so every view is identical either way.
    """
    if content.block_type is not BlockType.IMAGE:
        return content, None
    try:
        payload = base64.b64decode(content.text, validate=True)
    except (binascii.Error, ValueError):
        if diagnostics is not None:
            diagnostics.append(Diagnostic("warn", source_index, "inline image is not valid base64"))
        return ContentBlock(BlockType.TEXT, text=UNDECODABLE_PLACEHOLDER), None

    name = f"img-{ordinal}.{_media_extension(content.media_type)}"
    relative = f"media/{name}"
    if media_dir is not None:
        media_dir.mkdir(parents=True, exist_ok=True)
        (media_dir / name).write_bytes(payload)
    placeholder = f"[image: {relative}]"
    return ContentBlock(BlockType.TEXT, text=placeholder), MediaArtifact(relative, placeholder, len(payload))
