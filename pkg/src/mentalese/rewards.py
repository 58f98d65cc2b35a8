"""Group-relative reward shaping for verifier-scored rollout groups.

Two reward schemes over a group of candidate responses for one prompt:

* ``grpo_correctness_only`` — the reward is the binary verifier verdict.
* ``slpo`` — correct candidates additionally earn a length bonus scaled
  within the group's span of correct lengths:

  - exactly one correct candidate, or several with equal lengths:
    every correct candidate gets 1 (a uniquely long but correct answer is
    never penalized);
  - several correct candidates with differing lengths: a correct candidate
    of length L gets ``1 + alpha * (L_max - L) / (L_max - L_min)`` where
    the extremes range over correct candidates only;
  - no correct candidate: everyone gets 0.

Rewards are then normalized within the group into advantages
``(r - mean) / (std + eps)`` using the population standard deviation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Literal

from .verifier import verify

__all__ = [
    "RewardError",
    "EmptyGroup",
    "InconsistentLengths",
    "MissingGold",
    "NonPositiveRatio",
    "Candidate",
    "RolloutGroup",
    "RewardConfig",
    "RewardReport",
    "LengthFn",
    "whitespace_token_length",
    "byte_length",
    "tokenizer_length",
    "slpo_rewards",
    "grpo_advantages",
    "surrogate_term",
    "compute_group",
    "group_from_record",
    "read_groups",
    "report_to_json",
    "format_float",
]

Algo = Literal["slpo", "grpo_correctness_only"]

LengthFn = Callable[[str], int]


class RewardError(ValueError):
    pass


class EmptyGroup(RewardError):
    pass


class InconsistentLengths(RewardError):
    pass


class MissingGold(RewardError):
    pass


class NonPositiveRatio(RewardError):
    pass


def whitespace_token_length(text: str) -> int:
    """Default length function: whitespace-delimited token count."""
    return len(text.split())


def byte_length(text: str) -> int:
    return len(text.encode("utf-8"))


def tokenizer_length(encode: Callable[[str], Iterable]) -> LengthFn:
    """Adapt an external tokenizer's encode function into a LengthFn."""

    def length(text: str) -> int:
        return len(list(encode(text)))

    return length


@dataclass(frozen=True)
class Candidate:
    id: int
    length: int
    correct: int
    text: str = ""

    def __post_init__(self) -> None:
        if self.length < 0:
            raise RewardError(f"candidate {self.id}: negative length")
        if self.correct not in (0, 1):
            raise RewardError(f"candidate {self.id}: correct must be 0 or 1")


@dataclass(frozen=True)
class RolloutGroup:
    prompt_id: str
    candidates: tuple[Candidate, ...]

    def __post_init__(self) -> None:
        if not self.candidates:
            raise EmptyGroup(f"group {self.prompt_id!r} has no candidates")
        ids = [c.id for c in self.candidates]
        if len(set(ids)) != len(ids):
            raise RewardError(f"group {self.prompt_id!r} has duplicate candidate ids")

    def __len__(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class RewardConfig:
    alpha: float = 0.1
    eps_std: float = 1e-6
    clip_eps: float = 0.2
    kl_beta: float = 0.001

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise RewardError("alpha must be >= 0")
        if self.eps_std <= 0:
            raise RewardError("eps_std must be > 0")
        if not 0 < self.clip_eps < 1:
            raise RewardError("clip_eps must be in (0, 1)")
        if self.kl_beta < 0:
            raise RewardError("kl_beta must be >= 0")


@dataclass(frozen=True)
class RewardReport:
    prompt_id: str
    algo: str
    rewards: tuple[float, ...]
    advantages: tuple[float, ...]
    n_correct: int
    len_min: int | None  # over correct candidates
    len_max: int | None
    reward_mean: float
    reward_std: float


def slpo_rewards(group: RolloutGroup, cfg: RewardConfig = RewardConfig()) -> list[float]:
    """Length-shaped rewards; see the module docstring for the cases."""
    correct_lengths = [c.length for c in group.candidates if c.correct]
    if not correct_lengths:
        return [0.0 for _ in group.candidates]
    len_min, len_max = min(correct_lengths), max(correct_lengths)
    if len(correct_lengths) == 1 or len_min == len_max:
        return [1.0 if c.correct else 0.0 for c in group.candidates]
    span = len_max - len_min
    return [
        1.0 + cfg.alpha * (len_max - c.length) / span if c.correct else 0.0
        for c in group.candidates
    ]


def grpo_advantages(rewards: list[float], cfg: RewardConfig = RewardConfig()) -> list[float]:
    """Group-normalized advantages with population standard deviation."""
    if not rewards:
        raise EmptyGroup("cannot normalize an empty reward list")
    n = len(rewards)
    mean = sum(rewards) / n
    variance = sum((r - mean) ** 2 for r in rewards) / n
    scale = variance ** 0.5 + cfg.eps_std
    return [(r - mean) / scale for r in rewards]


def surrogate_term(
    ratio: float, advantage: float, kl: float, cfg: RewardConfig = RewardConfig()
) -> float:
    """Per-sample clipped surrogate with a direct KL penalty."""
    if not ratio > 0 or ratio != ratio or ratio == float("inf"):
        raise NonPositiveRatio(f"importance ratio must be finite and positive, got {ratio}")
    if kl < 0:
        raise RewardError("kl must be >= 0")
    clipped = min(max(ratio, 1.0 - cfg.clip_eps), 1.0 + cfg.clip_eps)
    return min(ratio * advantage, clipped * advantage) - cfg.kl_beta * kl


def compute_group(
    group: RolloutGroup, algo: Algo = "slpo", cfg: RewardConfig = RewardConfig()
) -> RewardReport:
    """Rewards plus normalized advantages and group statistics."""
    if algo == "slpo":
        rewards = slpo_rewards(group, cfg)
    elif algo == "grpo_correctness_only":
        rewards = [float(c.correct) for c in group.candidates]
    else:
        raise RewardError(f"unknown algo {algo!r}")
    advantages = grpo_advantages(rewards, cfg)
    correct_lengths = [c.length for c in group.candidates if c.correct]
    n = len(rewards)
    mean = sum(rewards) / n
    std = (sum((r - mean) ** 2 for r in rewards) / n) ** 0.5
    return RewardReport(
        prompt_id=group.prompt_id,
        algo=algo,
        rewards=tuple(rewards),
        advantages=tuple(advantages),
        n_correct=len(correct_lengths),
        len_min=min(correct_lengths) if correct_lengths else None,
        len_max=max(correct_lengths) if correct_lengths else None,
        reward_mean=mean,
        reward_std=std,
    )


# --- batch interface ------------------------------------------------------------


def group_from_record(
    record: dict,
    length_fn: LengthFn = whitespace_token_length,
    verify_fn: Callable[[str, str], int] | None = None,
) -> RolloutGroup:
    """Build a group from one decoded JSONL record.

    Lengths and verdicts may be pre-supplied on every candidate; otherwise
    lengths come from ``length_fn`` and verdicts from the verifier against
    the record's ``gold`` answer.  A mix of supplied and missing lengths is
    rejected: one group must use one consistent length definition.
    """
    raw = record.get("candidates")
    if not raw:
        raise EmptyGroup(f"record {record.get('prompt_id')!r} has no candidates")
    with_length = [c for c in raw if "length" in c]
    if with_length and len(with_length) != len(raw):
        raise InconsistentLengths(
            f"record {record.get('prompt_id')!r} mixes supplied and missing lengths"
        )
    gold = record.get("gold")
    if verify_fn is None:
        verify_fn = lambda text, answer: verify(text, answer).correct
    candidates = []
    for index, c in enumerate(raw):
        text = c.get("text", "")
        length = c["length"] if "length" in c else length_fn(text)
        if "correct" in c:
            correct = int(c["correct"])
        else:
            if gold is None:
                raise MissingGold(
                    f"record {record.get('prompt_id')!r}: candidate {index} has no "
                    "verdict and the record has no gold answer"
                )
            correct = verify_fn(text, gold)
        candidates.append(Candidate(id=index, length=length, correct=correct, text=text))
    return RolloutGroup(str(record.get("prompt_id", "")), tuple(candidates))


def read_groups(
    lines: Iterable[str],
    length_fn: LengthFn = whitespace_token_length,
) -> Iterable[RolloutGroup]:
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RewardError(f"line {line_no}: not valid JSON ({exc})") from exc
        yield group_from_record(record, length_fn)


def format_float(x: float) -> str:
    """17-significant-digit decimal form, enough to round-trip any double."""
    return format(float(x), ".17g")


def report_to_json(report: RewardReport) -> str:
    """Fixed field order and float formatting for bit-stable output diffs."""
    fields = [
        ("prompt_id", json.dumps(report.prompt_id)),
        ("algo", json.dumps(report.algo)),
        ("n_correct", str(report.n_correct)),
        ("len_min", "null" if report.len_min is None else str(report.len_min)),
        ("len_max", "null" if report.len_max is None else str(report.len_max)),
        ("reward_mean", format_float(report.reward_mean)),
        ("reward_std", format_float(report.reward_std)),
        ("rewards", "[" + ",".join(format_float(r) for r in report.rewards) + "]"),
        ("advantages", "[" + ",".join(format_float(a) for a in report.advantages) + "]"),
    ]
    return "{" + ",".join(f'"{name}":{value}' for name, value in fields) + "}"
