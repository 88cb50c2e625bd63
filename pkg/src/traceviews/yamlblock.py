"""Minimal YAML emitter for JSON values.

Multi-line strings become literal block scalars, everything else renders
inline.  Key order is preserved.  The output is plain YAML 1.1 that standard
readers load back to the original JSON value.
"""

from __future__ import annotations

import math
import re
from typing import Any

INDENT = 2
MAX_SIMPLE_KEY = 1000

# Conservative plain-scalar charset; anything else is double-quoted.
_PLAIN_RE = re.compile(r"^[A-Za-z_/.][A-Za-z0-9_./ ()+=,-]*$")
_RESERVED_WORDS = frozenset("y n yes no true false on off null".split())
_FLOATISH_RE = re.compile(r"^\.(?:inf|nan|[0-9])", re.IGNORECASE)

# Characters allowed raw inside a YAML stream, minus the YAML 1.1 line breaks
# (NEL, LS, PS), CR and BOM which a reader would normalize or reject.
_UNSAFE_CHAR_RE = re.compile(
    "[^\t\n\x20-\x7e\xa0-\u2027\u202a-\ud7ff\ue000-\ufefe\uff00-\ufffd\U00010000-\U0010ffff]"
)

_ESCAPES = {
    "\0": "\\0",
    "\a": "\\a",
    "\b": "\\b",
    "\t": "\\t",
    "\n": "\\n",
    "\v": "\\v",
    "\f": "\\f",
    "\r": "\\r",
    "\x1b": "\\e",
    '"': '\\"',
    "\\": "\\\\",
    "\x85": "\\N",
    "\u2028": "\\L",
    "\u2029": "\\P",
}


def _escape_char(ch: str) -> str:
    if ch in _ESCAPES:
        return _ESCAPES[ch]
    code = ord(ch)
    if code <= 0xFF:
        return f"\\x{code:02X}"
    if code <= 0xFFFF:
        return f"\\u{code:04X}"
    return f"\\U{code:08X}"


# Tabs and line feeds are escaped too: raw, they would be folded on reload.
_QUOTE_RE = re.compile(r'["\\\t\n]|' + _UNSAFE_CHAR_RE.pattern)


def double_quoted(text: str) -> str:
    return '"' + _QUOTE_RE.sub(lambda m: _escape_char(m.group(0)), text) + '"'


def _is_plain_safe(text: str) -> bool:
    if not _PLAIN_RE.match(text) or text.endswith(" "):
        return False
    if text.lower() in _RESERVED_WORDS or _FLOATISH_RE.match(text):
        return False
    return "  " not in text


def _scalar(value: Any) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return ".nan"
        if math.isinf(value):
            return ".inf" if value > 0 else "-.inf"
        text = repr(value)
        # YAML 1.1 floats need a dot: 1e+16 -> 1.0e+16
        if "." not in text:
            mantissa, _, exponent = text.partition("e")
            text = f"{mantissa}.0" + (f"e{exponent}" if exponent else "")
        if "e" in text and text.split("e")[1][0] not in "+-":
            text = text.replace("e", "e+")
        return text
    text = str(value)
    return text if _is_plain_safe(text) else double_quoted(text)


def _block_scalar_ok(text: str) -> bool:
    return "\n" in text and not _UNSAFE_CHAR_RE.search(text)


def _block_scalar(text: str, indent: int) -> list[str]:
    """Header indicator plus body lines for a literal block scalar."""
    if text.endswith("\n"):
        chomp, body = "+", text[:-1]
    else:
        chomp, body = "-", text
    lines = body.split("\n")
    head = "|"
    if text.lstrip("\n").startswith(" "):
        head += str(INDENT)
    head += chomp
    pad = " " * indent
    return [head] + [pad + line if line else "" for line in lines]


def _emit(value: Any, indent: int) -> list[str]:
    """Render ``value`` as the lines following a ``key:`` or ``-`` marker.

    The first returned line is appended to the marker line; the rest are
    standalone lines.
    """
    pad = " " * indent
    if isinstance(value, dict):
        if not value:
            return ["{}"]
        out = [""]
        for key, item in value.items():
            out.extend(_key_entry(key, item, indent))
        return out
    if isinstance(value, list):
        if not value:
            return ["[]"]
        out = [""]
        for item in value:
            out.extend(_entry(pad + "-", item, indent))
        return out
    if isinstance(value, str) and _block_scalar_ok(value):
        return _block_scalar(value, indent)
    return [_scalar(value)]


def _entry(marker: str, value: Any, indent: int) -> list[str]:
    rendered = _emit(value, indent + INDENT)
    head, rest = rendered[0], rendered[1:]
    return [marker + (" " + head if head else "")] + rest


def _key_entry(key: Any, value: Any, indent: int) -> list[str]:
    pad = " " * indent
    text = _key(key)
    if len(text) < MAX_SIMPLE_KEY:
        return _entry(pad + text + ":", value, indent)
    # Simple keys are capped in length; longer ones use the explicit form.
    return [pad + "? " + text] + _entry(pad + ":", value, indent)


def _key(key: Any) -> str:
    text = str(key)
    return text if _is_plain_safe(text) else double_quoted(text)


def dump(value: Any) -> str:
    """Serialize a JSON value; the result ends with a newline."""
    if isinstance(value, (dict, list)) and value:
        lines = _emit(value, 0)[1:]
    else:
        lines = _emit(value, INDENT)
        if lines[0].startswith("|"):
            lines = ["--- " + lines[0]] + lines[1:]
    return "\n".join(lines) + "\n"
