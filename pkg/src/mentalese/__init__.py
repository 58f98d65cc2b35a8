"""Compact symbolic reasoning traces and the reward machinery around them.

The pieces, bottom to top: an expression/trace parser with canonical
printing (`trace`, `expressions`), a deterministic trace executor
(`interpreter`), a boxed-answer verifier (`verifier`), group-relative
reward shaping (`rewards`), a candidate-level policy simulator
(`simulate`), evaluation metrics (`metrics`), and corpus tooling
(`dataset`).  The `mentalese` command line exposes all of it for batch
use.
"""

from .expressions import Expr, Opaque, parse_expression, to_text
from .trace import (
    MentaleseTrace,
    Operator,
    Step,
    TraceError,
    Violation,
    parse_trace,
    print_trace,
    traces_equal,
    validate_trace,
)
from .interpreter import (
    Decimal,
    Environment,
    ExecutionError,
    ExecutionResult,
    Rational,
    Symbolic,
    Value,
    eval_expr,
    execute,
    value_to_string,
)
from .verifier import (
    ModelResponse,
    VerifierVerdict,
    extract_boxed,
    normalize_answer,
    verify,
)
from .rewards import (
    Candidate,
    RewardConfig,
    RewardReport,
    RolloutGroup,
    compute_group,
    grpo_advantages,
    slpo_rewards,
    surrogate_term,
)
from .simulate import (
    SimConfig,
    SimReport,
    SyntheticPrompt,
    make_prompts,
    run_experiment,
)
from .metrics import (
    BenchmarkSummary,
    EvalRecord,
    avg_tokens,
    compression_rate,
    pass_at_1,
    summarize,
)
from .dataset import (
    DatasetRecord,
    FieldMap,
    HygieneReport,
    SftPair,
    corpus_stats,
    load_corpus,
    to_sft_pair,
)

__version__ = "0.1.0"
