"""Corpus ingestion, hygiene checks, and supervised-finetuning formatting.

A corpus is JSONL with one record per line holding a question, a gold
answer, and a symbolic reasoning trace.  Loading parses every trace,
counts malformed records with reasons, and (as a warning, not a
rejection) flags records whose trace executes to a value that disagrees
with the stated gold answer — released traces are only lightly curated and
such inconsistencies do occur.

Formatting emits prompt/target pairs with byte-stable templates: the
prompt appends a fixed instruction suffix, the target wraps the trace in
think tags and closes with the boxed gold answer.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Literal

from .interpreter import ExecutionError, execute, value_to_string
from .trace import MentaleseTrace, TraceError, parse_trace
from .verifier import THINK_CLOSE, THINK_OPEN, verify

__all__ = [
    "INSTRUCTION_SUFFIX",
    "SFT_TARGET_TEMPLATE",
    "DatasetError",
    "FileUnreadable",
    "NotJsonl",
    "FieldMap",
    "DatasetRecord",
    "RecordIssue",
    "HygieneReport",
    "SftPair",
    "load_corpus",
    "load_corpus_lines",
    "to_sft_pair",
    "corpus_stats",
    "CorpusStats",
]

#: Appended verbatim to every question to form the training prompt.
INSTRUCTION_SUFFIX = "Let's think step-by-step and answer within \\boxed{}."

#: Target layout; matches the transport format models actually emit.
SFT_TARGET_TEMPLATE = THINK_OPEN + "\n{trace}\n" + THINK_CLOSE + "\n\n\\boxed{{{answer}}}"


class DatasetError(ValueError):
    pass


class FileUnreadable(DatasetError):
    pass


class NotJsonl(DatasetError):
    def __init__(self, message: str, line_no: int):
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class FieldMap:
    """Names of the question/answer/trace fields in the source JSONL."""

    question: str = "question"
    answer: str = "answer"
    trace: str = "mentalese"


@dataclass(frozen=True)
class DatasetRecord:
    question: str
    answer: str
    trace_text: str

    def parse(self, mode: Literal["strict", "lenient"] = "lenient") -> MentaleseTrace:
        return parse_trace(self.trace_text, mode)


@dataclass(frozen=True)
class RecordIssue:
    line_no: int
    kind: str  # MissingField | NoAnsStep | AnswerMismatch | ExecutionFailed | ...
    detail: str = ""


@dataclass
class HygieneReport:
    total: int = 0
    well_formed: int = 0
    malformed: list[RecordIssue] = field(default_factory=list)
    warnings: list[RecordIssue] = field(default_factory=list)

    @property
    def malformed_count(self) -> int:
        return len(self.malformed)


@dataclass(frozen=True)
class SftPair:
    prompt: str
    target: str


def _check_record(
    line_no: int,
    record: DatasetRecord,
    strictness: Literal["strict", "lenient"],
    report: HygieneReport,
) -> bool:
    """Parse and execute one record; returns False when it is malformed."""
    try:
        trace = record.parse(strictness)
    except TraceError as exc:
        report.malformed.append(RecordIssue(line_no, type(exc).__name__, str(exc)))
        return False
    try:
        result = execute(trace, "lenient")
    except ExecutionError as exc:
        issue = RecordIssue(line_no, "ExecutionFailed", str(exc))
        if strictness == "strict":
            report.malformed.append(issue)
            return False
        report.warnings.append(issue)
        return True
    computed = value_to_string(result.answer)
    verdict = verify(f"\\boxed{{{computed}}}", record.answer)
    if not verdict.correct:
        issue = RecordIssue(
            line_no, "AnswerMismatch", f"trace executes to {computed}, gold is {record.answer}"
        )
        if strictness == "strict":
            report.malformed.append(issue)
            return False
        report.warnings.append(issue)
    return True


def load_corpus_lines(
    lines: Iterable[str],
    strictness: Literal["strict", "lenient"] = "lenient",
    field_map: FieldMap = FieldMap(),
) -> tuple[list[DatasetRecord], HygieneReport]:
    """Load records from JSONL lines; malformed ones are counted, not returned.

    In lenient strictness an executed answer that disagrees with the gold
    answer is a warning; strict strictness counts it as malformed.
    """
    report = HygieneReport()
    records: list[DatasetRecord] = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        report.total += 1
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            report.malformed.append(RecordIssue(line_no, "NotJsonl", str(exc)))
            continue
        if not isinstance(raw, dict):
            report.malformed.append(RecordIssue(line_no, "NotJsonl", "line is not an object"))
            continue
        missing = [
            name
            for name in (field_map.question, field_map.answer, field_map.trace)
            if not raw.get(name)
        ]
        if missing:
            report.malformed.append(
                RecordIssue(line_no, "MissingField", ", ".join(missing))
            )
            continue
        record = DatasetRecord(
            question=str(raw[field_map.question]),
            answer=str(raw[field_map.answer]),
            trace_text=str(raw[field_map.trace]),
        )
        if _check_record(line_no, record, strictness, report):
            records.append(record)
            report.well_formed += 1
    return records, report


def load_corpus(
    path: str,
    strictness: Literal["strict", "lenient"] = "lenient",
    field_map: FieldMap = FieldMap(),
) -> tuple[list[DatasetRecord], HygieneReport]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return load_corpus_lines(handle, strictness, field_map)
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc


def to_sft_pair(record: DatasetRecord) -> SftPair:
    """Prompt/target pair with the fixed instruction and think-tag layout."""
    prompt = f"{record.question.rstrip()} {INSTRUCTION_SUFFIX}"
    target = SFT_TARGET_TEMPLATE.format(trace=record.trace_text, answer=record.answer)
    return SftPair(prompt, target)


@dataclass(frozen=True)
class CorpusStats:
    n_records: int
    step_counts: dict[int, int]  # trace length -> frequency
    operator_counts: dict[str, int]
    executability_rate: float
    mean_steps: float


def corpus_stats(records: list[DatasetRecord]) -> CorpusStats:
    if not records:
        raise DatasetError("empty corpus")
    step_counts: Counter[int] = Counter()
    operator_counts: Counter[str] = Counter()
    executable = 0
    total_steps = 0
    for record in records:
        trace = record.parse("lenient")
        step_counts[len(trace)] += 1
        total_steps += len(trace)
        for step in trace:
            operator_counts[step.op.name] += 1
        try:
            execute(trace, "lenient")
            executable += 1
        except ExecutionError:
            pass
    return CorpusStats(
        n_records=len(records),
        step_counts=dict(sorted(step_counts.items())),
        operator_counts=dict(sorted(operator_counts.items())),
        executability_rate=executable / len(records),
        mean_steps=total_steps / len(records),
    )
