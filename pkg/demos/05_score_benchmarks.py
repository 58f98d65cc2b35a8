"""Benchmark metrics: pass@1, average tokens, compression rate."""

import random

from mentalese import EvalRecord, compression_rate, summarize

# Simulate an evaluation run: 100 problems, some solved, varying lengths.
rng = random.Random(0)
records = [
    EvalRecord(problem_id=f"q{i}", solved=int(rng.random() < 0.72),
               response_length=rng.randint(120, 900))
    for i in range(100)
]

# The compression rate needs a reference: the base model's average tokens
# on the same benchmark.  It is an input, not a constant, so any baseline
# can serve as the reference.
BASE_AVG_TOKENS = 7481.0

summary = summarize(records, base_avg=BASE_AVG_TOKENS)
print(f"pass@1      = {summary.pass_at_1:.2f}")
print(f"avg tokens  = {summary.avg_tokens:.1f}")
print(f"compression = {summary.cr:.2f}x shorter than the base model")

# CR is just the ratio of average lengths; spot checks against known pairs:
print()
for base, tokens in [(7481, 571), (7481, 184), (2545, 301)]:
    print(f"base {base:5} vs model {tokens:4} tokens -> CR {compression_rate(base, tokens):.2f}")

# Reciprocity: swapping the roles inverts the rate.
print("\nround trip:", compression_rate(7481, 571) * compression_rate(571, 7481))
