"""Relevance predicates over full-view lines.

A predicate is anything with ``eval(line) -> bool`` and a ``description``.
Regex matching ships; scored predicates (BM25, embeddings, model judges)
plug into the same protocol once thresholded to a boolean.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

from .errors import PredicateError
from .ir import Node


@runtime_checkable
class Predicate(Protocol):
    description: str

    def eval(self, line_text: str) -> bool: ...


@dataclass(frozen=True)
class RegexPredicate:
    """Unanchored search with Python ``re`` semantics."""

    pattern: str
    case_sensitive: bool = True
    _compiled: re.Pattern[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        flags = 0 if self.case_sensitive else re.IGNORECASE
        try:
            compiled = re.compile(self.pattern, flags)
        except re.error as exc:
            raise PredicateError(f"invalid pattern {self.pattern!r} at position {exc.pos}: {exc.msg}") from exc
        object.__setattr__(self, "_compiled", compiled)

    @property
    def description(self) -> str:
        return f"regex {self.pattern!r}" + ("" if self.case_sensitive else " (ignore case)")

    def eval(self, line_text: str) -> bool:
        return self._compiled.search(line_text) is not None


@dataclass(frozen=True)
class ConstantPredicate:
    value: bool

    @property
    def description(self) -> str:
        return "match everything" if self.value else "match nothing"

    def eval(self, line_text: str) -> bool:
        return self.value


MATCH_ALL = ConstantPredicate(True)
MATCH_NOTHING = ConstantPredicate(False)


def build_regex_predicate(pattern: str, case_sensitive: bool = True) -> RegexPredicate:
    return RegexPredicate(pattern, case_sensitive)


def match_lines(block_node: Node, predicate: Predicate) -> list[tuple[int, str]]:
    """Lines of the block satisfying the predicate, with full-view numbers."""
    if block_node.span is None:
        raise ValueError("match_lines needs a node with an assigned span")
    return [
        (number, text)
        for number, text in zip(block_node.span.lines(), block_node.content_lines)
        if predicate.eval(text)
    ]
