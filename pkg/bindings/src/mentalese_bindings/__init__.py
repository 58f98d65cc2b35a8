"""Training-loop adapter for the mentalese toolkit.

RL frameworks want two calls per rollout group: a binary verdict per
response and shaped (reward, advantage) pairs per group.  This package is
a by-value boundary over the installed ``mentalese`` library — groups
cross as plain dicts of strings and integers, results come back as plain
tuples, and the arithmetic is the primary library's own (nothing is
reimplemented, so results are bit-identical by construction).

Stateless and thread-safe: the underlying functions are pure and no state
is held across calls.  Errors surface as the primary library's exception
types (``mentalese.rewards.EmptyGroup`` and friends).
"""

from __future__ import annotations

from typing import TypedDict

import mentalese
from mentalese.rewards import Candidate, RewardConfig, RolloutGroup, compute_group
from mentalese.verifier import verify

__all__ = [
    "BoundCandidate",
    "BoundGroup",
    "bound_verify",
    "bound_rewards",
    "encode_group",
    "decode_group",
    "version",
]

__version__ = "0.1.0"


class BoundCandidate(TypedDict):
    length: int
    correct: int
    text: str


class BoundGroup(TypedDict):
    prompt_id: str
    candidates: list[BoundCandidate]


def decode_group(group: BoundGroup) -> RolloutGroup:
    return RolloutGroup(
        str(group["prompt_id"]),
        tuple(
            Candidate(
                id=index,
                length=int(candidate["length"]),
                correct=int(candidate["correct"]),
                text=str(candidate.get("text", "")),
            )
            for index, candidate in enumerate(group["candidates"])
        ),
    )


def encode_group(group: RolloutGroup) -> BoundGroup:
    return {
        "prompt_id": group.prompt_id,
        "candidates": [
            {"length": c.length, "correct": c.correct, "text": c.text}
            for c in group.candidates
        ],
    }


def bound_verify(response_text: str, gold: str) -> int:
    """Binary correctness of a raw response against the gold answer."""
    return verify(response_text, gold).correct


def bound_rewards(
    group: BoundGroup,
    algo: str = "slpo",
    alpha: float = 0.1,
    eps_std: float = 1e-6,
) -> list[tuple[float, float]]:
    """Per-candidate (reward, advantage) pairs, in candidate order."""
    report = compute_group(
        decode_group(group), algo, RewardConfig(alpha=alpha, eps_std=eps_std)
    )
    return list(zip(report.rewards, report.advantages))


def version() -> dict[str, str]:
    return {"bindings": __version__, "core": mentalese.__version__}
