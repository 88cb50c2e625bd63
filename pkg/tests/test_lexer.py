from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from traceviews.errors import StrictModeError
from traceviews.lexer import BlockType, ContentBlock, RecordKind, Role, classify_record, lex_stream

from conftest import assistant, jsonl, user


def test_filtered_kinds_are_dropped_with_warnings():
    source = jsonl(
        user("hi"),
        {"type": "progress", "data": {}},
        assistant([{"type": "text", "text": "hello"}]),
        {"type": "file-history-snapshot", "snapshot": {}},
    )
    records, diags = lex_stream(source)
    assert [r.kind for r in records] == [RecordKind.USER, RecordKind.ASSISTANT]
    assert [d.severity for d in diags] == ["warn", "warn"]
    assert [d.record_kind for d in diags] == [RecordKind.PROGRESS, RecordKind.FILE_HISTORY_SNAPSHOT]


def test_empty_input():
    assert lex_stream("") == ([], [])


def _broken_fixture() -> list[str]:
    return [
        json.dumps(user("one")),
        json.dumps(user("two")),
        '{"type": "user", "message": {"role": "user", "content": "thr',
        json.dumps(user("three")),
    ]


def test_broken_line_is_reported_by_index():
    lines = _broken_fixture()

    # Independent validity check, one line at a time.
    def valid(line: str) -> bool:
        try:
            json.loads(line)
        except ValueError:
            return False
        return True

    invalid = [i for i, line in enumerate(lines) if not valid(line)]
    records, diags = lex_stream("\n".join(lines) + "\n")
    assert len(records) == 3
    assert len(diags) == 1
    assert [d.source_index for d in diags] == invalid == [2]


def test_strict_mode_raises_on_malformed_line():
    with pytest.raises(StrictModeError) as info:
        lex_stream("\n".join(_broken_fixture()), strict=True)
    assert info.value.diagnostics[0].severity == "error"


def test_non_object_line_is_malformed():
    records, diags = lex_stream('[1, 2]\n"text"\n')
    assert records == [] and len(diags) == 2


@pytest.mark.parametrize(
    ("tag", "kind"),
    [
        ("assistant", RecordKind.ASSISTANT),
        ("queue-operation", RecordKind.QUEUE_OPERATION),
        ("banana", RecordKind.UNKNOWN),
        ("summary", RecordKind.SUMMARY),
        (None, RecordKind.UNKNOWN),
    ],
)
def test_classify_record(tag, kind):
    assert classify_record({"type": tag}) is kind


def test_bare_string_content_is_one_text_block():
    (rec,), _ = lex_stream(jsonl(user("hello there")))
    assert rec.role is Role.USER
    assert rec.content == (ContentBlock(BlockType.TEXT, text="hello there"),)


def test_message_id_and_blocks():
    source = jsonl(
        assistant(
            [
                {"type": "thinking", "thinking": "hmm"},
                {"type": "tool_use", "id": "t1", "name": "Read", "input": {"file_path": "a.py"}},
            ],
            msg_id="m1",
        )
    )
    (rec,), _ = lex_stream(source)
    assert rec.message_id == "m1"
    assert [b.block_type for b in rec.content] == [BlockType.THINKING, BlockType.TOOL_USE]
    assert json.loads(rec.content[1].tool_input_json) == {"file_path": "a.py"}


def test_crlf_and_unicode_line_separators():
    lf = jsonl(user("a b"), user("c\x85d"))
    crlf = lf.replace("\n", "\r\n")
    assert lex_stream(lf) == lex_stream(crlf)
    records, diags = lex_stream(lf)
    assert len(records) == 2 and diags == []
    assert records[0].content[0].text == "a b"


def test_block_invariants():
    with pytest.raises(ValueError):
        ContentBlock(BlockType.TOOL_USE)
    with pytest.raises(ValueError):
        ContentBlock(BlockType.TOOL_RESULT)


_KEPT = ("user", "assistant", "system")
_FILTERED = ("progress", "queue-operation", "file-history-snapshot", "api_error")


@given(
    st.lists(
        st.one_of(
            st.sampled_from(_KEPT + _FILTERED).map(lambda t: ("record", t)),
            st.just(("garbage", "{not json")),
            st.just(("blank", "   ")),
        ),
        max_size=30,
    )
)
def test_every_line_yields_one_record_or_one_diagnostic(items):
    lines = []
    for what, value in items:
        if what == "record":
            if value in ("user", "assistant"):
                lines.append(json.dumps({"type": value, "message": {"role": value, "content": "x"}}))
            else:
                lines.append(json.dumps({"type": value, "content": "x"}))
        else:
            lines.append(value)
    records, diags = lex_stream("\n".join(lines))
    covered = [r.source_index for r in records] + [d.source_index for d in diags]
    expected = [i for i, line in enumerate(lines) if line.strip()]
    assert sorted(covered) == expected
    # Order is preserved and filtered kinds never survive.
    assert [r.source_index for r in records] == sorted(r.source_index for r in records)
    assert all(r.kind.value in ("user", "assistant", "system") for r in records)
    assert lex_stream("\n".join(lines)) == (records, diags)
