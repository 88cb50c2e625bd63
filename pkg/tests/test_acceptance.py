"""Acceptance suite: one test per criterion, summarized at the end of the run."""

from __future__ import annotations

import itertools
import json
import time
from collections import Counter
from statistics import mean

import pytest

from traceviews.cli import main
from traceviews.errors import LineAssignmentError
from traceviews.ir import LayoutRules, NodeKind, assign_lines
from traceviews.normalize import compile_tool_input, strip_harness_markup, strip_read_prefix
from traceviews.pipeline import compile_source
from traceviews.predicate import MATCH_ALL, build_regex_predicate
from traceviews.spans import harvest_pointers
from traceviews.testkit import mixed_spec, naive_grep, random_patterns, reingest_full_view, synthesize_trace
from traceviews.views import emit_adaptive, emit_full, emit_ui, slice_span, summarize_tool_call

from conftest import assistant, config_read_source, jsonl, parse_adaptive, tool_use

CORPUS_SEEDS = range(1, 201)
LABEL = "full.txt"


@pytest.fixture(scope="module")
def corpus() -> list[tuple[int, str]]:
    return [(seed, synthesize_trace(mixed_spec(seed))[0]) for seed in CORPUS_SEEDS]


def lines_of(text: str) -> list[str]:
    return text.split("\n")[:-1]


@pytest.mark.criterion(1, "pointer soundness over 200 synthesized traces")
def test_pointer_soundness(corpus, record_property):
    started = time.perf_counter()
    failures, checked = [], 0
    for seed, source in corpus:
        doc = compile_source(source)
        calls = {n.tool_use_id: n for n in doc.nodes() if n.node_kind is NodeKind.TOOL_CALL}
        ui_text = emit_ui(doc, LABEL).text
        summaries = [l for l in lines_of(ui_text) if l.startswith("* ")]
        for line, span in zip(summaries, harvest_pointers("\n".join(summaries), LABEL)):
            checked += 1
            try:
                text = slice_span(doc, span)
            except ValueError as exc:
                failures.append((seed, line, str(exc)))
                continue
            owners = {doc.owner(n) for n in span.lines()}
            ids = {o.tool_use_id for o in owners}
            kinds = {o.node_kind for o in owners}
            if not text or len(ids) != 1 or not kinds <= {NodeKind.TOOL_CALL, NodeKind.TOOL_RESULT}:
                failures.append((seed, line, "owners"))
            elif calls[ids.pop()].tool_name not in line:
                failures.append((seed, line, "tool name"))
        for modality in ("document", "index"):
            view = emit_adaptive(doc, build_regex_predicate("[a-z]{4}"), modality, LABEL)
            for pointer, tag, _ in parse_adaptive(view.text, modality):
                checked += 1
                (span,) = harvest_pointers(pointer, LABEL)
                try:
                    slice_span(doc, span)
                except ValueError as exc:
                    failures.append((seed, pointer, str(exc)))
                    continue
                owners = {doc.owner(n) for n in span.lines()}
                if len(owners) != 1 or owners.pop().role_tag != tag:
                    failures.append((seed, pointer, "adaptive owner"))
    elapsed = time.perf_counter() - started
    record_property("pointers", checked)
    record_property("failures", len(failures))
    record_property("seconds", f"{elapsed:.1f}")
    assert checked > 1000
    assert failures == []
    assert elapsed < 60


@pytest.mark.criterion(2, "adaptive output equals flat grep, 50 traces x 20 patterns")
def test_grep_oracle_equivalence(corpus, record_property):
    started = time.perf_counter()
    agree = total = 0
    for seed, source in corpus[:50]:
        doc = compile_source(source)
        full = emit_full(doc).text
        structural = doc.structural_lines()
        for pattern in random_patterns(seed, 20):
            total += 1
            view = emit_adaptive(doc, build_regex_predicate(pattern), "document", LABEL)
            emitted = {pair for _, _, lines in parse_adaptive(view.text, "document") for pair in lines}
            agree += emitted == naive_grep(full, pattern, structural)
    elapsed = time.perf_counter() - started
    record_property("cases", f"{agree}/{total}")
    record_property("seconds", f"{elapsed:.1f}")
    assert (agree, total) == (1000, 1000)
    assert elapsed < 120


@pytest.mark.criterion(3, "document and index modalities carry the same blocks")
def test_transpose_equivalence(corpus, record_property):
    mismatched = []
    comparisons = 0
    for seed, source in corpus:
        doc = compile_source(source)
        predicates = [MATCH_ALL] + [build_regex_predicate(p) for p in random_patterns(seed, 5)]
        for predicate in predicates:
            comparisons += 1
            doc_view = emit_adaptive(doc, predicate, "document", LABEL)
            idx_view = emit_adaptive(doc, predicate, "index", LABEL)
            a = Counter(parse_adaptive(doc_view.text, "document"))
            b = Counter(parse_adaptive(idx_view.text, "index"))
            if a != b:
                mismatched.append((seed, predicate.description))
    record_property("comparisons", comparisons)
    assert mismatched == []


@pytest.mark.criterion(4, "line numbers assigned once and never renumbered")
def test_assign_once_no_renumber(corpus):
    emitters = {
        "full": lambda d: emit_full(d).text,
        "ui": lambda d: emit_ui(d, LABEL).text,
        "adaptive": lambda d: emit_adaptive(d, MATCH_ALL, "index", LABEL).text,
    }
    for seed, source in corpus:
        doc = compile_source(source)
        snapshot = doc.line_map
        spans = [n.span for n in doc.nodes()]
        reference = {name: emit(doc) for name, emit in emitters.items()}
        for order in itertools.permutations(emitters):
            for name in order:
                assert emitters[name](doc) == reference[name], (seed, order)
            assert doc.line_map is snapshot, (seed, order)
            assert [n.span for n in doc.nodes()] == spans
        with pytest.raises(LineAssignmentError, match="occurs exactly once"):
            assign_lines(doc)
        assert doc.line_map is snapshot


@pytest.mark.criterion(5, "full view equals the line map and re-ingests losslessly")
def test_full_view_identity(corpus):
    for seed, source in corpus:
        doc = compile_source(source)
        text = emit_full(doc).text
        physical = lines_of(text)
        assert len(physical) == doc.total_lines, seed
        assert all(physical[i] == entry.text for i, entry in enumerate(doc.line_map)), seed
        again = reingest_full_view(text)
        got = [[(n.node_kind, n.content_lines) for n in s.nodes] for s in again]
        want = [[(n.node_kind, n.content_lines) for n in s.nodes] for s in doc.sections]
        assert got == want, seed


@pytest.mark.criterion(6, "UI view is shorter than the full view on tool-heavy traces")
def test_ui_compression(corpus, record_property):
    ratios = []
    for seed, source in corpus:
        if mixed_spec(seed).tool_call_rate < 0.5:
            continue
        doc = compile_source(source)
        full, ui = emit_full(doc).line_count, emit_ui(doc, LABEL).line_count
        ratios.append((seed, ui, full))
    strict = sum(1 for _, ui, full in ratios if ui < full)
    record_property("traces", len(ratios))
    record_property("strictly_shorter", f"{strict}/{len(ratios)}")
    record_property("mean_ui_full_ratio", f"{mean(ui / full for _, ui, full in ratios):.3f}")
    assert len(ratios) >= 50
    assert strict == len(ratios)


@pytest.mark.criterion(7, "the five worked transformation examples, exact strings")
def test_transformation_unit_vector():
    doc = compile_source(config_read_source(), layout=LayoutRules(blank_between_sections=False))
    call = next(n for n in doc.nodes() if n.node_kind is NodeKind.TOOL_CALL)
    assert summarize_tool_call(call, doc.result_for(call.tool_use_id)) == '* Read "src/config.py" (file.txt:19-21,24-34)'

    raw = json.dumps({"file_path": "src/pets.py", "content": "class Pet:\n  def __init__(self):"})
    assert compile_tool_input(raw) == "file_path: src/pets.py\ncontent: |-\n  class Pet:\n    def __init__(self):\n"

    assert strip_read_prefix("     1→import os\n     2→print(1)") == "import os\nprint(1)"

    assert strip_harness_markup("<system-reminder>be terse</system-reminder>") == ("", True)
    hidden = compile_source(jsonl({"type": "user", "message": {"role": "user", "content": "<system-reminder>be terse</system-reminder>"}}))
    assert hidden.sections == [] and emit_full(hidden).text == ""

    split = compile_source(
        jsonl(
            assistant([{"type": "text", "text": "Let me check."}], msg_id="msg_A"),
            assistant([tool_use("t1", "Bash", {"command": "ls"})], msg_id="msg_A"),
        )
    )
    assert emit_full(split).text == "=== turn 1: assistant ===\nLet me check.\n\n--- tool_call: Bash ---\ncommand: ls\n"


@pytest.mark.criterion(8, "byte-identical outputs across runs and LF/CRLF input")
def test_determinism(corpus, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    names = ("full.txt", "ui.txt", "manifest.json")
    for seed, source in corpus:
        outputs = []
        for run, newline in enumerate(("\n", "\n", "\r\n")):
            with open("session.jsonl", "w", encoding="utf-8", newline=newline) as fh:
                fh.write(source)
            assert main(["compile", "session.jsonl", "--out", f"out{run}"]) == 0
            outputs.append({n: (tmp_path / f"out{run}" / n).read_bytes() for n in names})
        capsys.readouterr()
        assert outputs[0] == outputs[1] == outputs[2], seed
        assert all(b"\r" not in data for data in outputs[0].values()), seed
