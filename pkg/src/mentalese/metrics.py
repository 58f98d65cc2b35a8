"""Evaluation metrics: pass@1, average response length, compression rate."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "MetricsError",
    "EmptyRecords",
    "NonPositiveLength",
    "EvalRecord",
    "BenchmarkSummary",
    "pass_at_1",
    "avg_tokens",
    "compression_rate",
    "summarize",
    "read_eval_records",
]


class MetricsError(ValueError):
    pass


class EmptyRecords(MetricsError):
    pass


class NonPositiveLength(MetricsError):
    pass


@dataclass(frozen=True)
class EvalRecord:
    problem_id: str
    solved: int  # 0 or 1
    response_length: int

    def __post_init__(self) -> None:
        if self.solved not in (0, 1):
            raise MetricsError(f"{self.problem_id}: solved must be 0 or 1")
        if self.response_length < 0:
            raise MetricsError(f"{self.problem_id}: negative response length")


@dataclass(frozen=True)
class BenchmarkSummary:
    pass_at_1: float
    avg_tokens: float
    cr: float | None = None  # only when a base length was supplied


def pass_at_1(records: list[EvalRecord]) -> float:
    """Fraction of problems solved under single-sample decoding."""
    if not records:
        raise EmptyRecords("no evaluation records")
    return sum(r.solved for r in records) / len(records)


def avg_tokens(lengths: list[int]) -> float:
    if not lengths:
        raise EmptyRecords("no lengths")
    return sum(lengths) / len(lengths)


def compression_rate(base_avg_tokens: float, model_avg_tokens: float) -> float:
    """Base model's average length over the evaluated model's; higher is shorter."""
    if base_avg_tokens <= 0 or model_avg_tokens <= 0:
        raise NonPositiveLength("average lengths must be positive")
    return base_avg_tokens / model_avg_tokens


def summarize(records: list[EvalRecord], base_avg: float | None = None) -> BenchmarkSummary:
    mean_tokens = avg_tokens([r.response_length for r in records])
    cr = compression_rate(base_avg, mean_tokens) if base_avg is not None else None
    return BenchmarkSummary(pass_at_1(records), mean_tokens, cr)


def read_eval_records(lines: Iterable[str]) -> list[EvalRecord]:
    """Decode JSONL records: {"problem_id": ..., "solved": 0|1, "response_length": n}."""
    records = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MetricsError(f"line {line_no}: not valid JSON ({exc})") from exc
        try:
            records.append(
                EvalRecord(
                    problem_id=str(raw.get("problem_id", line_no)),
                    solved=int(raw["solved"]),
                    response_length=int(raw["response_length"]),
                )
            )
        except KeyError as exc:
            raise MetricsError(f"line {line_no}: missing field {exc}") from exc
    return records
