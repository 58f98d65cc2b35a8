"""Corpus pipeline: hygiene-check a JSONL corpus, emit SFT pairs, stats.

Uses the small sample corpus shipped with the tests; the same flow scales
to full training corpora via `mentalese dataset validate|format|stats`.
"""

from pathlib import Path

from mentalese import corpus_stats, load_corpus, to_sft_pair, verify

CORPUS = Path(__file__).parent.parent / "tests" / "data" / "sample_corpus.jsonl"

records, report = load_corpus(str(CORPUS))
print(f"loaded {report.well_formed}/{report.total} records "
      f"({report.malformed_count} malformed)")
for issue in report.warnings:
    print(f"  warning line {issue.line_no}: {issue.kind} - {issue.detail}")

# One record's trace reaches a different value than the stated gold answer;
# that is deliberately a warning, not a rejection: lightly-curated corpora
# contain such records and downstream training may still want them.

print("\nfirst SFT pair:")
pair = to_sft_pair(records[0])
print("  prompt:", pair.prompt[:88], "...")
print("  target:", pair.target.replace("\n", "\\n")[:110], "...")

# Every emitted target must grade correct against its own gold answer.
ok = sum(verify(to_sft_pair(r).target, r.answer).correct for r in records)
print(f"\nself-verification: {ok}/{len(records)} targets grade correct")

stats = corpus_stats(records)
print("\ncorpus statistics:")
print("  mean steps per trace:", stats.mean_steps)
print("  executability rate:  ", stats.executability_rate)
print("  step-count histogram:", stats.step_counts)
print("  operators:", ", ".join(f"{op}x{n}" for op, n in sorted(stats.operator_counts.items())))
