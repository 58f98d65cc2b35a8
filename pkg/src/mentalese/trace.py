"""Reasoning-trace parsing, validation, and canonical printing.

A trace is a semicolon-joined sequence of ``OPERATION:expression`` steps
ending in exactly one ``ANS`` step.  Parsing is total in lenient mode:
payloads that do not read as expressions become :class:`~.expressions.Opaque`
leaves and chunks without an operator head are folded into the previous
step's payload (solver steps in the wild carry multi-clause payloads).
Strict mode instead raises on both.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Literal

from .expressions import (
    BUILTIN_FUNCTIONS,
    Equation,
    Expr,
    ExprParseError,
    Opaque,
    iter_names,
    latex_to_plain,
    parse_expression,
    to_text,
)

__all__ = [
    "Operator",
    "Step",
    "MentaleseTrace",
    "TraceError",
    "EmptyInput",
    "MissingColon",
    "BadOperatorName",
    "NoAnsStep",
    "MultipleAnsSteps",
    "DanglingAnsNotLast",
    "UnparseableExpression",
    "Violation",
    "parse_trace",
    "validate_trace",
    "print_trace",
    "traces_equal",
]

ParseMode = Literal["strict", "lenient"]

_OPERATOR_NAME_RE = re.compile(r"[A-Z][A-Z0-9_]*\Z")
_STEP_HEAD_RE = re.compile(r"\s*([A-Z][A-Z0-9_]*)\s*:")
_ANY_HEAD_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*:")

_CORE_EXACT = frozenset({
    "SET", "LET", "DEF", "EQ", "SOLVE", "CALC", "SUM", "DIFF", "ADD",
    "SUB", "DIV", "FACTOR", "CHECK", "COUNT", "ANS",
})
_CORE_INDEXED_RE = re.compile(r"(?:CASE|SOLVE|CALC|EVAL|EXPAND)\d+\Z")


class TraceError(ValueError):
    """Base for trace-level diagnostics.

    Carries the offending step index and, when known, the byte-offset span
    of the offending chunk in the original text.
    """

    def __init__(
        self,
        message: str,
        step_index: int | None = None,
        span: tuple[int, int] | None = None,
    ):
        super().__init__(message)
        self.step_index = step_index
        self.span = span


class EmptyInput(TraceError):
    pass


class MissingColon(TraceError):
    pass


class BadOperatorName(TraceError):
    pass


class NoAnsStep(TraceError):
    pass


class MultipleAnsSteps(TraceError):
    pass


class DanglingAnsNotLast(TraceError):
    pass


class UnparseableExpression(TraceError):
    pass


@dataclass(frozen=True)
class Operator:
    name: str

    def __post_init__(self) -> None:
        if not _OPERATOR_NAME_RE.match(self.name):
            raise BadOperatorName(f"bad operator name {self.name!r}")

    @property
    def is_core(self) -> bool:
        return self.name in _CORE_EXACT or bool(_CORE_INDEXED_RE.match(self.name))

    @property
    def kind(self) -> str:
        return "core" if self.is_core else "extended"


@dataclass(frozen=True)
class Step:
    op: Operator
    expr: Expr
    payload: str
    source_span: tuple[int, int]  # byte offsets into the original text


@dataclass(frozen=True)
class MentaleseTrace:
    steps: tuple[Step, ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise EmptyInput("a trace must contain at least one step")
        ans = [i for i, s in enumerate(self.steps) if s.op.name == "ANS"]
        if not ans:
            raise NoAnsStep("trace has no ANS step")
        if len(ans) > 1:
            raise MultipleAnsSteps(f"trace has {len(ans)} ANS steps", ans[1])
        if ans[0] != len(self.steps) - 1:
            raise DanglingAnsNotLast("ANS step is not the final step", ans[0])

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[Step]:
        return iter(self.steps)


def _split_chunks(text: str) -> list[tuple[str, int, int]]:
    """Split on top-level ``;`` (brace-aware); yields (chunk, start, end)."""
    chunks = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth = max(0, depth - 1)
        elif ch == ";" and depth == 0:
            chunks.append((text[start:i], start, i))
            start = i + 1
    chunks.append((text[start:], start, len(text)))
    return chunks


def _byte_offsets(text: str) -> list[int]:
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def _clean_payload(raw: str) -> str:
    payload = raw.strip()
    if payload.endswith("."):
        payload = payload[:-1].rstrip()
    return payload


def parse_trace(text: str, mode: ParseMode = "lenient") -> MentaleseTrace:
    """Parse ``text`` into a trace.

    Lenient mode never fails on payload content: unparseable expressions
    become Opaque and headless chunks extend the previous step.  Both modes
    enforce the structural rules (operator heads where required, exactly
    one terminal ANS).
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown mode {mode!r}")
    text = text.replace("\\_", "_")
    if not text.strip():
        raise EmptyInput("empty input")

    byte_at = _byte_offsets(text)
    # (op_name, [payload chunks], char start, char end)
    raw_steps: list[tuple[str, list[str], int, int]] = []
    for chunk, start, end in _split_chunks(text):
        if not chunk.strip():
            continue
        head = _STEP_HEAD_RE.match(chunk)
        if head is not None:
            payload = chunk[head.end():]
            raw_steps.append((head.group(1), [payload], start, end))
            continue
        index = len(raw_steps)
        if mode == "strict" or not raw_steps:
            span = (byte_at[start], byte_at[end])
            if _ANY_HEAD_RE.match(chunk):
                raise BadOperatorName(
                    f"operator name in {chunk.strip()!r} must match [A-Z][A-Z0-9_]*",
                    index,
                    span,
                )
            raise MissingColon(
                f"step {chunk.strip()!r} has no OPERATION: head", index, span
            )
        # Continuation clause of the previous step's payload.
        name, payloads, prev_start, _ = raw_steps[-1]
        payloads.append(chunk)
        raw_steps[-1] = (name, payloads, prev_start, end)

    if not raw_steps:
        raise EmptyInput("no steps found")

    known_funcs: set[str] = set(BUILTIN_FUNCTIONS)
    steps: list[Step] = []
    for index, (name, payloads, start, end) in enumerate(raw_steps):
        payload = ";".join(_clean_payload(p) for p in payloads)
        if name == "DEF":
            # A definition head like "f(x) = ..." makes f callable, including
            # inside its own defining payload.
            head = re.match(r"\s*([A-Za-z][A-Za-z0-9_]*)\s*\(", latex_to_plain(payload))
            if head is not None and "=" in payload:
                known_funcs.add(head.group(1))
        try:
            expr: Expr = parse_expression(payload, known_funcs)
        except ExprParseError as exc:
            if mode == "strict":
                raise UnparseableExpression(
                    f"step {index} ({name}): {exc}",
                    index,
                    (byte_at[start], byte_at[end]),
                ) from exc
            expr = Opaque(payload)
        steps.append(
            Step(Operator(name), expr, payload, (byte_at[start], byte_at[end]))
        )

    return MentaleseTrace(tuple(steps))


def print_trace(trace: MentaleseTrace) -> str:
    """Canonical rendering: ``OP:expr;`` joined without spaces."""
    parts = []
    for step in trace:
        body = step.payload if isinstance(step.expr, Opaque) else to_text(step.expr)
        parts.append(f"{step.op.name}:{body};")
    return "".join(parts)


def traces_equal(a: MentaleseTrace, b: MentaleseTrace) -> bool:
    """Structural equality: operator names and expression ASTs, spans ignored."""
    if len(a) != len(b):
        return False
    return all(
        sa.op.name == sb.op.name and sa.expr == sb.expr
        for sa, sb in zip(a.steps, b.steps)
    )


# --- validation ---------------------------------------------------------------

_INTRODUCING_OPS = frozenset({"SET", "LET", "DEF", "EQ"})
_INTRODUCING_RE = re.compile(r"(?:CASE|SOLVE)\d*\Z")


@dataclass(frozen=True)
class Violation:
    kind: str  # UseBeforeDefinition | EmptyExpression | NoAnsStep | ...
    step_index: int
    detail: str = ""


def validate_trace(trace: MentaleseTrace) -> list[Violation]:
    """Lint a parsed trace; an empty report means valid.

    Binding rules mirror the executor: declaration/equation steps (SET, LET,
    DEF, EQ, CASE, SOLVE) and any payload containing ``=`` may introduce new
    identifiers (equation unknowns); plain-expression payloads and the ANS
    payload may only use identifiers already introduced.
    """
    violations: list[Violation] = []
    declared: set[str] = set()
    for index, step in enumerate(trace):
        if isinstance(step.expr, Opaque):
            if not step.payload.strip():
                violations.append(Violation("EmptyExpression", index))
            continue
        introduces = (
            step.op.name in _INTRODUCING_OPS
            or _INTRODUCING_RE.match(step.op.name) is not None
            or isinstance(step.expr, Equation)
        ) and step.op.name != "ANS"
        names = set(iter_names(step.expr))
        if introduces:
            declared.update(names)
            declared.add(step.op.name)
            continue
        for name in sorted(names - declared):
            violations.append(Violation("UseBeforeDefinition", index, name))
        declared.add(step.op.name)
    return violations
