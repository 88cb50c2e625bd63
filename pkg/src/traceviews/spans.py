"""Line spans and pointers into the full view.

A span is an ordered list of inclusive, 1-based ``(start, end)`` line ranges.
A pointer is a span plus the label of the file it points into, rendered as
``(full.txt:19-21,24-34)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import SpanError

_RANGE_RE = re.compile(r"^\s*(\d+)\s*(?:-\s*(\d+)\s*)?$")
_POINTER_RE = re.compile(r"^\((?P<label>[^()\s]+?):(?P<ranges>\d+(?:-\d+)?(?:,\d+(?:-\d+)?)*)\)$")


@dataclass(frozen=True)
class LineSpan:
    ranges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        ranges = tuple((int(s), int(e)) for s, e in self.ranges)
        object.__setattr__(self, "ranges", ranges)
        if not ranges:
            raise SpanError("a span needs at least one range")
        prev_end = 0
        for start, end in ranges:
            if start < 1 or end < start:
                raise SpanError(f"invalid range {start}-{end}")
            if start <= prev_end:
                raise SpanError(f"range {start}-{end} overlaps or precedes the previous range")
            prev_end = end

    @classmethod
    def single(cls, start: int, end: int | None = None) -> LineSpan:
        return cls(((start, start if end is None else end),))

    @classmethod
    def parse(cls, text: str) -> LineSpan:
        """Parse ``"19-21,24-34"`` or a whole pointer ``"(full.txt:19-21)"``."""
        text = text.strip()
        if text.startswith("("):
            return Pointer.parse(text).span
        ranges = []
        for part in text.split(","):
            m = _RANGE_RE.match(part)
            if m is None:
                raise SpanError(f"malformed range {part.strip()!r}")
            start = int(m.group(1))
            end = int(m.group(2)) if m.group(2) else start
            ranges.append((start, end))
        return cls(tuple(ranges))

    @property
    def start(self) -> int:
        return self.ranges[0][0]

    @property
    def end(self) -> int:
        return self.ranges[-1][1]

    @property
    def line_count(self) -> int:
        return sum(e - s + 1 for s, e in self.ranges)

    def lines(self) -> Iterator[int]:
        for start, end in self.ranges:
            yield from range(start, end + 1)

    def union(self, *others: LineSpan) -> LineSpan:
        merged: list[list[int]] = []
        for start, end in sorted(r for span in (self, *others) for r in span.ranges):
            if merged and start <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], end)
            else:
                merged.append([start, end])
        return LineSpan(tuple((s, e) for s, e in merged))

    def coalesced(self) -> LineSpan:
        """Merge ranges that touch, e.g. 19-21,22-34 -> 19-34."""
        merged: list[list[int]] = []
        for start, end in self.ranges:
            if merged and start == merged[-1][1] + 1:
                merged[-1][1] = end
            else:
                merged.append([start, end])
        return LineSpan(tuple((s, e) for s, e in merged))

    def __str__(self) -> str:
        return ",".join(f"{s}" if s == e else f"{s}-{e}" for s, e in self.coalesced().ranges)


@dataclass(frozen=True)
class Pointer:
    span: LineSpan
    file_label: str = "file.txt"

    def __str__(self) -> str:
        return f"({self.file_label}:{self.span})"

    @classmethod
    def parse(cls, text: str) -> Pointer:
        m = _POINTER_RE.match(text.strip())
        if m is None:
            raise SpanError(f"malformed pointer {text!r}")
        return cls(LineSpan.parse(m.group("ranges")), m.group("label"))


def pointer_pattern(file_label: str) -> re.Pattern[str]:
    """Regex finding pointers with the given label inside emitted text."""
    return re.compile(r"\(" + re.escape(file_label) + r":(\d+(?:-\d+)?(?:,\d+(?:-\d+)?)*)\)")


def harvest_pointers(text: str, file_label: str) -> list[LineSpan]:
    return [LineSpan.parse(m.group(1)) for m in pointer_pattern(file_label).finditer(text)]


def span_from_lines(numbers: Iterable[int]) -> LineSpan:
    """Build a span from ascending line numbers, grouping consecutive runs."""
    ranges: list[list[int]] = []
    for n in numbers:
        if ranges and n == ranges[-1][1] + 1:
            ranges[-1][1] = n
        else:
            ranges.append([n, n])
    return LineSpan(tuple((s, e) for s, e in ranges))
