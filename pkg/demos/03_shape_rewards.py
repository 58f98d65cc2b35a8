"""Reward shaping over a rollout group: length bonus vs correctness only.

Among correct candidates the shorter ones earn a bonus interpolated between
the group's length extremes; a uniquely correct candidate always gets
exactly 1, and a group with no correct candidate is all zeros (so hopeless
prompts do not distort the gradient).
"""

from mentalese import Candidate, RewardConfig, RolloutGroup, compute_group
from mentalese.rewards import report_to_json, surrogate_term

GROUP = RolloutGroup(
    "demo-prompt",
    (
        Candidate(id=0, length=100, correct=1, text="short and right"),
        Candidate(id=1, length=200, correct=1, text="medium and right"),
        Candidate(id=2, length=300, correct=1, text="long and right"),
        Candidate(id=3, length=150, correct=0, text="short but wrong"),
    ),
)

for algo in ("slpo", "grpo_correctness_only"):
    report = compute_group(GROUP, algo, RewardConfig(alpha=0.1))
    print(f"{algo}:")
    for candidate, reward, advantage in zip(GROUP.candidates, report.rewards, report.advantages):
        print(f"  len={candidate.length:4} correct={candidate.correct}  "
              f"reward={reward:5.2f}  advantage={advantage:+.3f}")
    print()

# Edge cases worth knowing by heart:
only_long = RolloutGroup("p", (
    Candidate(id=0, length=5000, correct=1),
    *(Candidate(id=i, length=10, correct=0) for i in range(1, 8)),
))
print("uniquely correct but very long ->", compute_group(only_long, "slpo").rewards[0])

hopeless = RolloutGroup("p", tuple(Candidate(id=i, length=10 * i + 10, correct=0) for i in range(4)))
print("no correct candidate          ->", compute_group(hopeless, "slpo").rewards)

# The per-sample clipped surrogate used by trainers consuming these advantages:
print("\nsurrogate(ratio=1.0, adv=2.0)      =", surrogate_term(1.0, 2.0, kl=0.0))
print("surrogate(ratio=2.0, adv=1.0) clip =", surrogate_term(2.0, 1.0, kl=0.0))
print("surrogate(ratio=1.0, adv=0, kl=3)  =", surrogate_term(1.0, 0.0, kl=3.0))

# Reports serialize with fixed field order and 17-digit floats, so piping
# the same groups twice produces byte-identical files.
print("\nJSONL line:")
print(report_to_json(compute_group(GROUP, "slpo")))
