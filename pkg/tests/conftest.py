from __future__ import annotations

import json
import re
from pathlib import Path

import pytest

from traceviews.ir import Document, Node, NodeKind, Section, assign_lines
from traceviews.lexer import Role

FIXTURES = Path(__file__).parent / "fixtures"
FIGURE1 = FIXTURES / "figure1.jsonl"

_criteria: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item: pytest.Item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.outcome == "passed" else "FAIL"
        _criteria[number] = (status, title, detail)


def pytest_terminal_summary(terminalreporter) -> None:
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title, detail = _criteria[number]
        line = f"{status} criterion {number}: {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))


def jsonl(*records: dict) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def user(text, **extra) -> dict:
    return {"type": "user", "message": {"role": "user", "content": text}, **extra}


def assistant(content, msg_id: str | None = None) -> dict:
    message = {"role": "assistant", "content": content}
    if msg_id is not None:
        message["id"] = msg_id
    return {"type": "assistant", "message": message}


def tool_use(use_id: str, name: str, inp: dict) -> dict:
    return {"type": "tool_use", "id": use_id, "name": name, "input": inp}


def tool_result(use_id: str, content) -> dict:
    return {"type": "tool_result", "tool_use_id": use_id, "content": content}


def hand_document(*sections: tuple[Role, list[Node]], layout=None) -> Document:
    """Assemble and assign a document from hand-built nodes."""
    built = []
    for si, (role, nodes) in enumerate(sections):
        for bi, node in enumerate(nodes):
            node.section_index, node.block_index = si, bi
        built.append(Section(si, role, list(nodes)))
    doc = Document(built)
    return assign_lines(doc) if layout is None else assign_lines(doc, layout)


def text_node(kind: NodeKind, *lines: str) -> Node:
    return Node(kind, lines)


@pytest.fixture
def figure1_source() -> str:
    return FIGURE1.read_text(encoding="utf-8")


def config_read_source() -> str:
    """Session whose Read call and result land on lines 19-21 and 24-34.

    Line numbers hold under ``LayoutRules(blank_between_sections=False)``.
    """
    prompt = "\n".join(f"question line {i}" for i in range(1, 5))
    reply = "\n".join(f"plan step {i}" for i in range(1, 11))
    body = "".join(f"{i:>6}→setting_{i} = {i}\n" for i in range(1, 12))
    return jsonl(
        user(prompt),
        assistant(
            [
                {"type": "text", "text": reply},
                tool_use("toolu_cfg", "Read", {"file_path": "src/config.py", "offset": 1, "limit": 11}),
            ],
            msg_id="msg_cfg",
        ),
        user([tool_result("toolu_cfg", body)]),
    )


_DOC_BLOCK_RE = re.compile(r"^(\([^()]+:[0-9,-]+\)) (\[[a-z_]+\])(?: .*)?$")
_IDX_BLOCK_RE = re.compile(r"^(\[[a-z_]+\])(?: .*)? (\([^()]+:[0-9,-]+\))$")
_MATCH_RE = re.compile(r"^(\d+): (.*)$", re.DOTALL)


def parse_adaptive(text: str, modality: str) -> list[tuple[str, str, tuple[tuple[int, str], ...]]]:
    """Read adaptive output back as (pointer, role tag, matched lines) per block."""
    blocks: list[tuple[str, str, list[tuple[int, str]]]] = []
    for line in text.split("\n"):
        if not line or line.startswith("=== "):
            continue
        m = _MATCH_RE.match(line)
        if m and blocks:
            blocks[-1][2].append((int(m.group(1)), m.group(2)))
            continue
        if modality == "document":
            b = _DOC_BLOCK_RE.match(line)
            pointer, tag = b.group(1), b.group(2)
        else:
            b = _IDX_BLOCK_RE.match(line)
            tag, pointer = b.group(1), b.group(2)
        blocks.append((pointer, tag, []))
    return [(p, t, tuple(lines)) for p, t, lines in blocks]
