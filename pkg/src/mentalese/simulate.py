"""Desk-scale rollout simulator over candidate-level softmax policies.

Each synthetic prompt owns a fixed pool of candidate answers with known
lengths and correctness.  A policy is a logit vector over that pool;
training samples a group per step, scores it with the reward engine, and
nudges each sampled candidate's logit by its group-relative advantage
(the clipped importance ratio is identically 1 when updating immediately
after sampling, so the surrogate's gradient reduces to exactly this), with
a small KL pullback toward the initial logits standing in for a reference
policy.

The point of the exercise: with length-shaped rewards the policy converges
to the *shortest correct* candidate, while correctness-only rewards only
concentrate on some correct candidate.  Everything is deterministic given
(seed, config, prompts).
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from .rewards import (
    Algo,
    Candidate,
    RewardConfig,
    RewardReport,
    RolloutGroup,
    compute_group,
    format_float,
)

__all__ = [
    "SimError",
    "MisalignedReport",
    "SimCandidate",
    "SyntheticPrompt",
    "SimConfig",
    "PolicyState",
    "SampledGroup",
    "make_prompts",
    "initial_policy",
    "policy_probs",
    "sample_group",
    "update_policy",
    "run_experiment",
    "SimReport",
    "PromptOutcome",
    "trajectory_lines",
    "summary_dict",
    "trajectory_csv",
]


class SimError(ValueError):
    pass


class MisalignedReport(SimError):
    pass


@dataclass(frozen=True)
class SimCandidate:
    text: str
    length: int
    correct: bool


@dataclass(frozen=True)
class SyntheticPrompt:
    prompt_id: str
    pool: tuple[SimCandidate, ...]
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.pool) < 2:
            raise SimError(f"prompt {self.prompt_id}: pool must hold at least 2 candidates")

    @property
    def shortest_correct(self) -> int | None:
        """Pool index of the shortest correct candidate (first on ties)."""
        best: int | None = None
        for i, cand in enumerate(self.pool):
            if cand.correct and (best is None or cand.length < self.pool[best].length):
                best = i
        return best


@dataclass(frozen=True)
class SimConfig:
    group_size: int = 16
    learning_rate: float = 0.1
    steps: int = 1000
    temperature: float = 0.6
    algo: Algo = "slpo"
    reward: RewardConfig = field(default_factory=RewardConfig)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.group_size < 2:
            raise SimError("group_size must be >= 2")
        if self.learning_rate <= 0:
            raise SimError("learning_rate must be > 0")
        if self.temperature <= 0:
            raise SimError("temperature must be > 0")
        if self.steps < 0:
            raise SimError("steps must be >= 0")


@dataclass(frozen=True)
class PolicyState:
    logits: np.ndarray
    initial_logits: np.ndarray
    step: int = 0


@dataclass(frozen=True)
class SampledGroup:
    """A drawn group plus the pool index behind each instance."""

    group: RolloutGroup
    pool_indices: np.ndarray


def make_prompts(
    n_prompts: int,
    pool_size: int = 8,
    length_range: tuple[int, int] = (50, 2000),
    min_correct: int = 2,
    seed: int = 0,
) -> list[SyntheticPrompt]:
    """Random candidate pools: i.i.d. uniform lengths, >= min_correct correct.

    The number of correct candidates is itself uniform between min_correct
    and the pool size, and independent of the lengths.
    """
    if not 1 <= min_correct <= pool_size:
        raise SimError("min_correct must be in [1, pool_size]")
    low, high = length_range
    if not 0 <= low <= high:
        raise SimError("invalid length_range")
    root = np.random.SeedSequence(seed)
    prompts = []
    for index, child in enumerate(root.spawn(n_prompts)):
        rng = np.random.Generator(np.random.PCG64(child))
        lengths = rng.integers(low, high + 1, size=pool_size)
        n_correct = int(rng.integers(min_correct, pool_size + 1))
        correct_at = set(rng.choice(pool_size, size=n_correct, replace=False).tolist())
        pool = tuple(
            SimCandidate(
                text=f"p{index}c{i}",
                length=int(lengths[i]),
                correct=i in correct_at,
            )
            for i in range(pool_size)
        )
        prompts.append(SyntheticPrompt(f"prompt-{index}", pool, seed=index))
    return prompts


def initial_policy(pool_size: int) -> PolicyState:
    zeros = np.zeros(pool_size, dtype=np.float64)
    return PolicyState(zeros.copy(), zeros.copy(), step=0)


def policy_probs(policy: PolicyState, temperature: float) -> np.ndarray:
    scaled = policy.logits / temperature
    scaled = scaled - scaled.max()
    weights = np.exp(scaled)
    return weights / weights.sum()


def sample_group(
    policy: PolicyState,
    prompt: SyntheticPrompt,
    group_size: int,
    rng: np.random.Generator,
    temperature: float = 0.6,
) -> SampledGroup:
    """Draw ``group_size`` i.i.d. candidates from the softmax policy."""
    if group_size < 1:
        raise SimError("group_size must be >= 1")
    probs = policy_probs(policy, temperature)
    indices = rng.choice(len(prompt.pool), size=group_size, p=probs)
    candidates = tuple(
        Candidate(
            id=slot,
            length=prompt.pool[i].length,
            correct=int(prompt.pool[i].correct),
            text=prompt.pool[i].text,
        )
        for slot, i in enumerate(indices.tolist())
    )
    return SampledGroup(RolloutGroup(prompt.prompt_id, candidates), indices)


def update_policy(
    policy: PolicyState,
    sampled: SampledGroup,
    report: RewardReport,
    cfg: SimConfig,
) -> PolicyState:
    """One ascent step: each sampled candidate moves by its mean advantage."""
    if len(report.advantages) != len(sampled.pool_indices):
        raise MisalignedReport(
            f"report covers {len(report.advantages)} candidates, "
            f"group drew {len(sampled.pool_indices)}"
        )
    if report.prompt_id != sampled.group.prompt_id:
        raise MisalignedReport(
            f"report is for {report.prompt_id!r}, group is {sampled.group.prompt_id!r}"
        )
    logits = policy.logits.copy()
    advantages = np.asarray(report.advantages)
    indices = sampled.pool_indices
    for pool_index in np.unique(indices):
        mean_advantage = advantages[indices == pool_index].mean()
        logits[pool_index] += cfg.learning_rate * mean_advantage
    if cfg.reward.kl_beta > 0:
        logits -= cfg.learning_rate * cfg.reward.kl_beta * (logits - policy.initial_logits)
    return PolicyState(logits, policy.initial_logits, policy.step + 1)


@dataclass(frozen=True)
class PromptOutcome:
    prompt_id: str
    argmax: int
    shortest_correct: int | None
    argmax_is_shortest_correct: bool
    argmax_correct: bool
    init_expected_length: float
    final_expected_length: float
    final_expected_accuracy: float
    length_fold_change: float  # init / final


@dataclass(frozen=True)
class SimReport:
    config: dict
    n_prompts: int
    expected_length: tuple[float, ...]  # per recorded step, averaged over prompts
    expected_accuracy: tuple[float, ...]
    outcomes: tuple[PromptOutcome, ...]

    @property
    def shortest_correct_rate(self) -> float:
        return sum(o.argmax_is_shortest_correct for o in self.outcomes) / len(self.outcomes)

    @property
    def final_accuracy(self) -> float:
        return sum(o.final_expected_accuracy for o in self.outcomes) / len(self.outcomes)

    @property
    def mean_length_fold_change(self) -> float:
        return sum(o.length_fold_change for o in self.outcomes) / len(self.outcomes)

    @property
    def aggregate_length_fold_change(self) -> float:
        init = sum(o.init_expected_length for o in self.outcomes)
        final = sum(o.final_expected_length for o in self.outcomes)
        return init / final


def run_experiment(prompts: list[SyntheticPrompt], cfg: SimConfig) -> SimReport:
    """Train every prompt's policy for ``cfg.steps`` steps and summarize.

    Prompts are independent; each gets its own spawned generator, so the
    result does not depend on processing order.
    """
    if not prompts:
        raise SimError("no prompts")
    root = np.random.SeedSequence(cfg.seed)
    children = root.spawn(len(prompts))
    sum_length = np.zeros(cfg.steps + 1)
    sum_accuracy = np.zeros(cfg.steps + 1)
    outcomes = []
    for prompt, child in zip(prompts, children):
        rng = np.random.Generator(np.random.PCG64(child))
        lengths = np.array([c.length for c in prompt.pool], dtype=np.float64)
        correct = np.array([float(c.correct) for c in prompt.pool])
        policy = initial_policy(len(prompt.pool))
        trajectory_length = np.empty(cfg.steps + 1)
        trajectory_accuracy = np.empty(cfg.steps + 1)
        for step in range(cfg.steps + 1):
            probs = policy_probs(policy, cfg.temperature)
            trajectory_length[step] = probs @ lengths
            trajectory_accuracy[step] = probs @ correct
            if step == cfg.steps:
                break
            sampled = sample_group(policy, prompt, cfg.group_size, rng, cfg.temperature)
            report = compute_group(sampled.group, cfg.algo, cfg.reward)
            policy = update_policy(policy, sampled, report, cfg)
        sum_length += trajectory_length
        sum_accuracy += trajectory_accuracy
        argmax = int(np.argmax(policy.logits))
        shortest = prompt.shortest_correct
        outcomes.append(
            PromptOutcome(
                prompt_id=prompt.prompt_id,
                argmax=argmax,
                shortest_correct=shortest,
                argmax_is_shortest_correct=shortest is not None and argmax == shortest,
                argmax_correct=prompt.pool[argmax].correct,
                init_expected_length=float(trajectory_length[0]),
                final_expected_length=float(trajectory_length[-1]),
                final_expected_accuracy=float(trajectory_accuracy[-1]),
                length_fold_change=float(trajectory_length[0] / trajectory_length[-1]),
            )
        )
    n = len(prompts)
    return SimReport(
        config={
            "group_size": cfg.group_size,
            "learning_rate": cfg.learning_rate,
            "steps": cfg.steps,
            "temperature": cfg.temperature,
            "algo": cfg.algo,
            "alpha": cfg.reward.alpha,
            "eps_std": cfg.reward.eps_std,
            "kl_beta": cfg.reward.kl_beta,
            "seed": cfg.seed,
        },
        n_prompts=n,
        expected_length=tuple((sum_length / n).tolist()),
        expected_accuracy=tuple((sum_accuracy / n).tolist()),
        outcomes=tuple(outcomes),
    )


# --- serialization ---------------------------------------------------------------


def trajectory_lines(report: SimReport) -> Iterable[str]:
    """One JSON line per step: averaged expected length and accuracy."""
    for step, (length, accuracy) in enumerate(
        zip(report.expected_length, report.expected_accuracy)
    ):
        yield (
            f'{{"step":{step},"expected_length":{format_float(length)},'
            f'"expected_accuracy":{format_float(accuracy)}}}'
        )


def summary_dict(report: SimReport) -> dict:
    return {
        "config": report.config,
        "n_prompts": report.n_prompts,
        "shortest_correct_rate": report.shortest_correct_rate,
        "final_accuracy": report.final_accuracy,
        "mean_length_fold_change": report.mean_length_fold_change,
        "aggregate_length_fold_change": report.aggregate_length_fold_change,
        "init_expected_length": report.expected_length[0],
        "final_expected_length": report.expected_length[-1],
        "prompts": [asdict(o) for o in report.outcomes],
    }


def trajectory_csv(report: SimReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["step", "expected_length", "expected_accuracy"])
    for step, (length, accuracy) in enumerate(
        zip(report.expected_length, report.expected_accuracy)
    ):
        writer.writerow([step, format_float(length), format_float(accuracy)])
    return buffer.getvalue()
