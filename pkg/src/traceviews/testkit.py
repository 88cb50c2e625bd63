"""Synthetic traces and independent oracles for testing.

``synthesize_trace`` produces schema-valid JSONL plus the section structure
the compiler is expected to recover.  ``naive_grep`` and
``reingest_full_view`` work from emitted text only and share no code with
the predicate or view modules.
"""

from __future__ import annotations

import base64
import json
import random
import re
from dataclasses import dataclass, field
from typing import Any

from .ir import Node, NodeKind, Section
from .lexer import Role

WORDS = (
    "dog cat parser token line view pointer section bark config module error value "
    "test cache index query node graph file build merge stream record window frame"
).split()
PATHS = ("src/pets.py", "src/config.py", "lib/graph/nodes.py", "README.md", "tests/test_cache.py")
FILTERED_TYPES = ("progress", "queue-operation", "file-history-snapshot", "api_error")
MARKUP_TAGS = ("system-reminder", "ide_opened_file", "command-message")
EXTERNAL_TOOLS = ("Read", "Bash", "Grep", "Edit", "Write", "Glob", "WebFetch", "Task", "Mystery")


@dataclass(frozen=True)
class TraceSpec:
    seed: int
    turn_count: int = 6
    tool_call_rate: float = 0.0
    thinking_rate: float = 0.0
    markup_rate: float = 0.0
    compaction_split_rate: float = 0.0
    filtered_record_rate: float = 0.0
    media_rate: float = 0.0
    system_rate: float = 0.0
    internal_tool_rate: float = 0.0

    def __post_init__(self) -> None:
        if self.turn_count < 0:
            raise ValueError("turn_count must be non-negative")
        for name in (
            "tool_call_rate",
            "thinking_rate",
            "markup_rate",
            "compaction_split_rate",
            "filtered_record_rate",
            "media_rate",
            "system_rate",
            "internal_tool_rate",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass
class GroundTruth:
    """Structure the compiler should recover: roles and node kinds per section."""

    sections: list[tuple[str, tuple[str, ...]]] = field(default_factory=list)
    tool_pairs: dict[str, str] = field(default_factory=dict)
    filtered_records: int = 0
    split_messages: int = 0
    hidden_turns: int = 0
    media_count: int = 0


class _Synth:
    def __init__(self, spec: TraceSpec):
        self.spec = spec
        self.rng = random.Random(spec.seed)
        self.out: list[str] = []
        self.truth = GroundTruth()
        self.counter = 0

    def next_id(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}_{self.spec.seed:04d}_{self.counter:05d}"

    def chance(self, rate: float) -> bool:
        # Always draw, so changing one rate does not reshuffle unrelated draws.
        return self.rng.random() < rate

    def write(self, record: dict[str, Any]) -> None:
        if self.chance(self.spec.filtered_record_rate):
            kind = self.rng.choice(FILTERED_TYPES)
            self.out.append(json.dumps({"type": kind, "uuid": self.next_id("f"), "data": {"n": self.counter}}))
            self.truth.filtered_records += 1
        record.setdefault("uuid", self.next_id("r"))
        record.setdefault("timestamp", f"2025-01-01T00:{self.counter // 60 % 60:02d}:{self.counter % 60:02d}Z")
        self.out.append(json.dumps(record, ensure_ascii=False))

    # -- content ---------------------------------------------------------

    def sentence(self, lo: int = 3, hi: int = 8) -> str:
        words = [self.rng.choice(WORDS) for _ in range(self.rng.randint(lo, hi))]
        if self.chance(0.3):
            words.append(str(self.rng.randint(0, 999)))
        return " ".join(words)

    def paragraph(self, max_lines: int = 4) -> str:
        lines = [self.sentence() for _ in range(self.rng.randint(1, max_lines))]
        if len(lines) > 1 and self.chance(0.3):
            lines.insert(self.rng.randint(1, len(lines) - 1), "")
        if self.chance(0.2):
            lines.append("    " + self.sentence(2, 4))
        return "\n".join(lines)

    def code(self, n: int) -> list[str]:
        out = []
        for _ in range(n):
            roll = self.rng.random()
            if roll < 0.15:
                out.append("")
            elif roll < 0.5:
                out.append(f"def {self.rng.choice(WORDS)}_{self.rng.choice(WORDS)}(self):")
            else:
                out.append("    " + self.sentence(2, 5))
        return out

    def image_block(self) -> dict[str, Any]:
        payload = self.rng.randbytes(self.rng.randint(16, 256))
        self.truth.media_count += 1
        return {
            "type": "image",
            "source": {"type": "base64", "media_type": "image/png", "data": base64.b64encode(payload).decode()},
        }

    def tool_call(self, name: str) -> tuple[dict[str, Any], Any]:
        """Return (input, result content) for a tool."""
        rng = self.rng
        path = rng.choice(PATHS)
        if name == "Read":
            lines = self.code(rng.randint(3, 30))
            body = "".join(f"{i:>6}→{line}\n" for i, line in enumerate(lines, 1))
            return {"file_path": path}, body
        if name == "Bash":
            cmd = " ".join(["python", "-m", "pytest", "-q"] + [rng.choice(WORDS) for _ in range(rng.randint(0, 14))])
            out = [self.sentence() for _ in range(rng.randint(1, 12))]
            if self.chance(0.5):
                out = [f"\x1b[3{rng.randint(1, 7)}m{line}\x1b[0m" if self.chance(0.4) else line for line in out]
            return {"command": cmd, "description": self.sentence(2, 4)}, "\n".join(out) + "\n"
        if name == "Grep":
            word = rng.choice(WORDS)
            hits = [f"{rng.choice(PATHS)}:{rng.randint(1, 400)}: {self.sentence(2, 5)}" for _ in range(rng.randint(0, 6))]
            return {"pattern": word, "path": "src", "output_mode": "content"}, [{"type": "text", "text": "\n".join(hits)}]
        if name == "Edit":
            old = "\n".join(self.code(rng.randint(1, 4)))
            new = "\n".join(self.code(rng.randint(1, 4)))
            return {"file_path": path, "old_string": old, "new_string": new}, f"The file {path} has been updated."
        if name == "Write":
            content = "\n".join(self.code(rng.randint(2, 8))) + "\n"
            return {"file_path": path, "content": content}, f"File created successfully at: {path}"
        if name == "Glob":
            return {"pattern": f"**/*{rng.choice(WORDS)}*.py"}, "\n".join(rng.sample(PATHS, rng.randint(0, 3)))
        if name == "WebFetch":
            return {"url": f"https://example.org/{rng.choice(WORDS)}", "prompt": self.sentence()}, self.paragraph()
        if name == "Task":
            return {"description": self.sentence(2, 4), "prompt": self.paragraph()}, self.paragraph(6)
        return {}, "ok" if self.chance(0.7) else ""

    # -- turns -----------------------------------------------------------

    def assistant_message(self, blocks: list[tuple[str, dict[str, Any]]]) -> None:
        """Write one assistant message, possibly split across two records."""
        msg_id = self.next_id("msg")
        kinds = [kind for kind, _ in blocks if kind]
        payloads = [block for _, block in blocks]
        if self.chance(self.spec.compaction_split_rate):
            self.truth.split_messages += 1
            if len(payloads) == 1:
                payloads.append({"type": "text", "text": self.paragraph(2)})
                kinds.append("assistant")
            cut = self.rng.randint(1, len(payloads) - 1)
            parts = [payloads[:cut], payloads[cut:]]
        else:
            parts = [payloads]
        for part in parts:
            self.write({"type": "assistant", "message": {"id": msg_id, "role": "assistant", "content": part}})
        if kinds:
            self.truth.sections.append(("assistant", tuple(kinds)))

    def leading_blocks(self) -> list[tuple[str, dict[str, Any]]]:
        blocks = []
        if self.chance(self.spec.thinking_rate):
            blocks.append(("thinking", {"type": "thinking", "thinking": self.paragraph(3), "signature": "sig"}))
        return blocks

    def assistant_turn(self) -> None:
        rounds = 0
        while rounds < 4 and self.chance(self.spec.tool_call_rate):
            rounds += 1
            blocks = self.leading_blocks()
            if self.chance(0.5):
                blocks.append(("assistant", {"type": "text", "text": self.paragraph(2)}))
            calls = []
            for _ in range(self.rng.randint(1, 2)):
                internal = self.chance(self.spec.internal_tool_rate)
                name = self.rng.choice(("TodoWrite", "ToolSearch")) if internal else self.rng.choice(EXTERNAL_TOOLS)
                use_id = self.next_id("toolu")
                if internal:
                    tool_input = {"todos": [{"content": self.sentence(), "status": "pending"}]}
                    result: Any = "Todos have been modified successfully."
                else:
                    tool_input, result = self.tool_call(name)
                    self.truth.tool_pairs[use_id] = name
                blocks.append(
                    (None if internal else "tool_call", {"type": "tool_use", "id": use_id, "name": name, "input": tool_input})
                )
                calls.append((use_id, internal, result))
            self.assistant_message(blocks)
            results = [
                {"type": "tool_result", "tool_use_id": use_id, "content": result} for use_id, _, result in calls
            ]
            self.write({"type": "user", "message": {"role": "user", "content": results}})
            visible = sum(1 for _, internal, _ in calls if not internal)
            if visible:
                self.truth.sections.append(("assistant", ("tool_result",) * visible))
        blocks = self.leading_blocks()
        blocks.append(("assistant", {"type": "text", "text": self.paragraph()}))
        self.assistant_message(blocks)

    def user_turn(self) -> None:
        if self.chance(self.spec.system_rate):
            self.write({"type": "system", "subtype": "info", "content": self.sentence()})
            self.truth.sections.append(("system", ("system",)))
        prompt = self.paragraph(3)
        with_media = self.chance(self.spec.media_rate)
        if self.chance(self.spec.markup_rate):
            tag = self.rng.choice(MARKUP_TAGS)
            markup = f"<{tag}>{self.sentence()}</{tag}>"
            if not with_media and self.chance(0.5):
                self.write({"type": "user", "message": {"role": "user", "content": markup}})
                self.truth.hidden_turns += 1
                return
            prompt = markup + "\n" + prompt
        if with_media:
            content: Any = [{"type": "text", "text": prompt}, self.image_block()]
            kinds: tuple[str, ...] = ("user", "user")
        else:
            content, kinds = prompt, ("user",)
        self.write({"type": "user", "message": {"role": "user", "content": content}})
        self.truth.sections.append(("user", kinds))

    def run(self) -> tuple[str, GroundTruth]:
        for turn in range(self.spec.turn_count):
            if turn % 2 == 0:
                self.user_turn()
            else:
                self.assistant_turn()
        text = "".join(line + "\n" for line in self.out)
        return text, self.truth


def synthesize_trace(spec: TraceSpec) -> tuple[str, GroundTruth]:
    """Seeded JSONL session; identical specs give identical bytes."""
    return _Synth(spec).run()


def naive_grep(
    full_view_text: str, pattern: str, structural_line_set: set[int], case_sensitive: bool = True
) -> set[tuple[int, str]]:
    """Flat line grep over the full view, skipping structural lines."""
    regex = re.compile(pattern, 0 if case_sensitive else re.IGNORECASE)
    lines = full_view_text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return {
        (number, text)
        for number, text in enumerate(lines, 1)
        if number not in structural_line_set and regex.search(text)
    }


_HEADER_RE = re.compile(r"^=== turn (\d+): (user|assistant|system) ===$")
_DELIM_RE = re.compile(r"^--- (user|assistant|thinking|tool_call|tool_result|system)(?:: (.+))? ---$")
_LEADING_KIND = {Role.USER: NodeKind.USER, Role.ASSISTANT: NodeKind.ASSISTANT, Role.SYSTEM: NodeKind.SYSTEM}


def reingest_full_view(text: str) -> list[Section]:
    """Rebuild sections and nodes from a default-layout full view.

    Exact as long as no content line itself looks like the next section
    header or a block delimiter.  tool_use ids are not part of the view and
    come back as ``"?"`` on tool_result nodes.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    sections: list[Section] = []
    i = 0
    number = 1

    def is_next_header(line: str) -> bool:
        m = _HEADER_RE.match(line)
        return m is not None and int(m.group(1)) == number + 1

    while i < len(lines):
        m = _HEADER_RE.match(lines[i])
        if m is None or int(m.group(1)) != number:
            raise ValueError(f"line {i + 1}: expected header for turn {number}, got {lines[i]!r}")
        role = Role(m.group(2))
        i += 1
        nodes: list[Node] = []
        while True:
            d = _DELIM_RE.match(lines[i]) if i < len(lines) else None
            if d is None and not nodes:
                kind, tool = _LEADING_KIND[role], None
            elif d is None:
                raise ValueError(f"line {i + 1}: expected a block delimiter")
            else:
                kind, tool = NodeKind(d.group(1)), d.group(2)
                i += 1
            body: list[str] = []
            while i < len(lines) and not _DELIM_RE.match(lines[i]) and not is_next_header(lines[i]):
                body.append(lines[i])
                i += 1
            if i < len(lines):
                if not body or body[-1] != "":
                    raise ValueError(f"line {i}: missing separator line")
                body.pop()
            nodes.append(
                Node(kind, tuple(body), tool_name=tool, tool_use_id="?" if kind is NodeKind.TOOL_RESULT else None,
                     section_index=number - 1, block_index=len(nodes))
            )
            if i >= len(lines) or is_next_header(lines[i]):
                break
        sections.append(Section(number - 1, role, nodes))
        number += 1
    return sections


def mixed_spec(seed: int) -> TraceSpec:
    """TraceSpec for a corpus seed: every rate is drawn from the seed itself."""
    r = random.Random(seed * 7919 + 17)
    return TraceSpec(
        seed=seed,
        turn_count=r.randint(2, 14),
        tool_call_rate=r.choice((0.0, 0.25, 0.5, 0.75, 0.9)),
        thinking_rate=round(r.random(), 3),
        markup_rate=round(r.uniform(0, 0.5), 3),
        compaction_split_rate=round(r.uniform(0, 0.5), 3),
        filtered_record_rate=round(r.uniform(0, 0.3), 3),
        media_rate=round(r.uniform(0, 0.3), 3),
        system_rate=round(r.uniform(0, 0.2), 3),
        internal_tool_rate=round(r.uniform(0, 0.3), 3),
    )


_PATTERN_TEMPLATES = (
    "{w}",
    "{w} {v}",
    r"\b{w}\b",
    "({w}|{v})",
    "[0-9]+",
    r"\d{{3}}",
    "^def ",
    "^    ",
    "^$",
    r"\.py",
    "(?i){W}",
    "{w}.*{v}",
    "^{w}",
    "{w}$",
    "[A-Z]",
    "file_path",
    '"',
    r"\(self\)",
    "o{{2}}",
    "^[a-z]+ [a-z]+$",
)


def random_patterns(seed: int, count: int = 20) -> list[str]:
    r = random.Random(seed * 104729 + 3)
    out = []
    for _ in range(count):
        w, v = r.choice(WORDS), r.choice(WORDS)
        out.append(r.choice(_PATTERN_TEMPLATES).format(w=w, v=v, W=w.upper()))
    return out
