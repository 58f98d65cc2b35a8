"""Command-line entry point: validate | exec | verify | reward | simulate | metrics | dataset.

Every subcommand reads `-` as standard input.  Outputs are byte-stable for
identical inputs and flags: floats are serialized with 17 significant
digits and all randomness is seeded.  Exit codes: 0 success, 1 domain
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .dataset import (
    DatasetError,
    FieldMap,
    load_corpus_lines,
    to_sft_pair,
    corpus_stats,
)
from .interpreter import ExecutionError, execute, value_to_string
from .metrics import MetricsError, read_eval_records, summarize
from .rewards import (
    RewardConfig,
    RewardError,
    byte_length,
    compute_group,
    read_groups,
    report_to_json,
    format_float,
    whitespace_token_length,
)
from .simulate import (
    SimConfig,
    SimError,
    make_prompts,
    run_experiment,
    summary_dict,
    trajectory_csv,
    trajectory_lines,
)
from .trace import TraceError, parse_trace, validate_trace
from .verifier import verify

CONFIG_ENV_VAR = "MENTALESE_CONFIG"

_LENGTH_FNS = {"whitespace": whitespace_token_length, "bytes": byte_length}


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _read_lines(path: str) -> list[str]:
    return _read_text(path).splitlines()


def _dump_json(payload) -> str:
    """Deterministic JSON: fixed key order as built, 17-digit floats."""

    def encode(node) -> str:
        if isinstance(node, dict):
            return "{" + ",".join(f"{json.dumps(str(k))}:{encode(v)}" for k, v in node.items()) + "}"
        if isinstance(node, (list, tuple)):
            return "[" + ",".join(encode(v) for v in node) + "]"
        if isinstance(node, bool) or node is None:
            return json.dumps(node)
        if isinstance(node, float):
            return format_float(node)
        return json.dumps(node)

    return encode(payload)


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in _read_lines(path):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _reward_config(args: argparse.Namespace) -> RewardConfig:
    return RewardConfig(
        alpha=args.alpha,
        eps_std=args.eps_std,
        clip_eps=args.clip_eps,
        kl_beta=args.kl_beta,
    )


def _add_reward_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=0.1, help="length-bonus scale")
    parser.add_argument("--eps-std", type=float, default=1e-6, dest="eps_std")
    parser.add_argument("--clip-eps", type=float, default=0.2, dest="clip_eps")
    parser.add_argument("--kl-beta", type=float, default=0.001, dest="kl_beta")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mentalese",
        description="Symbolic reasoning traces: parse, execute, verify, reward, simulate.",
    )
    parser.add_argument("--version", action="version", version=f"mentalese {__version__}")
    parser.add_argument(
        "--config",
        default=None,
        help=f"key=value defaults file (or set ${CONFIG_ENV_VAR})",
    )
    # Subparsers parse into a fresh namespace, so config-file defaults must
    # be planted on every parser; keep track of them all.
    parser.all_parsers = [parser]
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a trace and report violations")
    parser.all_parsers.append(p)
    p.add_argument("input", help="trace file or -")
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("exec", help="execute a trace and print the final answer")
    parser.all_parsers.append(p)
    p.add_argument("input", help="trace file or -")
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("verify", help="grade a response against a gold answer")
    parser.all_parsers.append(p)
    p.add_argument("input", help="response text file or -")
    p.add_argument("--gold", required=True)

    p = sub.add_parser("reward", help="score rollout groups from JSONL")
    parser.all_parsers.append(p)
    p.add_argument("input", nargs="?", default="-", help="JSONL groups file or - (default)")
    p.add_argument("--algo", choices=["slpo", "grpo_correctness_only"], default="slpo")
    p.add_argument("--length-fn", choices=sorted(_LENGTH_FNS), default="whitespace")
    p.add_argument("--output", default="-")
    _add_reward_flags(p)

    p = sub.add_parser("simulate", help="run the synthetic rollout simulator")
    parser.all_parsers.append(p)
    p.add_argument("--prompts", type=int, default=50)
    p.add_argument("--pool-size", type=int, default=8)
    p.add_argument("--length-min", type=int, default=50)
    p.add_argument("--length-max", type=int, default=2000)
    p.add_argument("--min-correct", type=int, default=2)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--group-size", type=int, default=16)
    p.add_argument("--temperature", type=float, default=0.6)
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--algo", choices=["slpo", "grpo_correctness_only"], default="slpo")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trajectory", default=None, help="write per-step JSONL here")
    p.add_argument("--csv", default=None, help="write per-step CSV here")
    _add_reward_flags(p)

    p = sub.add_parser("metrics", help="summarize JSONL evaluation records")
    parser.all_parsers.append(p)
    p.add_argument("--records", required=True, help="JSONL file or -")
    p.add_argument("--base-avg", type=float, default=None, help="base model average tokens")
    p.add_argument("--table", action="store_true", help="render a P@1/Tokens/CR table")

    p = sub.add_parser("dataset", help="corpus tooling")
    parser.all_parsers.append(p)
    data_sub = p.add_subparsers(dest="dataset_command", required=True)
    for name, help_text in (
        ("validate", "hygiene-check a corpus"),
        ("format", "emit SFT prompt/target pairs"),
        ("stats", "corpus statistics"),
    ):
        dp = data_sub.add_parser(name, help=help_text)
        parser.all_parsers.append(dp)
        dp.add_argument("--input", required=True, help="JSONL corpus file or -")
        dp.add_argument("--strict", action="store_true")
        dp.add_argument(
            "--field-map",
            default=None,
            help="comma-separated question=...,answer=...,mentalese=... source field names",
        )
        if name == "validate":
            dp.add_argument("--max-malformed", type=int, default=0)

    return parser


def _field_map(spec: str | None) -> FieldMap:
    if not spec:
        return FieldMap()
    mapping = {}
    for part in spec.split(","):
        if "=" not in part:
            raise DatasetError(f"bad --field-map entry {part!r}")
        key, value = part.split("=", 1)
        mapping[key.strip()] = value.strip()
    return FieldMap(
        question=mapping.get("question", "question"),
        answer=mapping.get("answer", "answer"),
        trace=mapping.get("mentalese", mapping.get("trace", "mentalese")),
    )


def _cmd_validate(args) -> int:
    mode = "strict" if args.strict else "lenient"
    try:
        trace = parse_trace(_read_text(args.input), mode)
    except TraceError as exc:
        where = "" if exc.step_index is None else f" (step {exc.step_index})"
        if exc.span is not None:
            where += f" [bytes {exc.span[0]}..{exc.span[1]}]"
        print(f"parse error{where}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    violations = validate_trace(trace)
    for v in violations:
        span = trace.steps[v.step_index].source_span
        detail = f": {v.detail}" if v.detail else ""
        print(f"step {v.step_index} [bytes {span[0]}..{span[1]}] {v.kind}{detail}")
    if violations:
        return 1
    print(f"ok: {len(trace)} steps")
    return 0


def _cmd_exec(args) -> int:
    mode = "strict" if args.strict else "lenient"
    trace = parse_trace(_read_text(args.input), mode)
    result = execute(trace, mode)
    print(value_to_string(result.answer))
    return 0


def _cmd_verify(args) -> int:
    verdict = verify(_read_text(args.input), args.gold)
    print(
        _dump_json(
            {
                "extracted": verdict.extracted,
                "gold": verdict.gold,
                "correct": verdict.correct,
                "reason": verdict.reason.value,
            }
        )
    )
    return 0


def _cmd_reward(args) -> int:
    cfg = _reward_config(args)
    length_fn = _LENGTH_FNS[args.length_fn]
    out = sys.stdout if args.output == "-" else open(args.output, "w", encoding="utf-8")
    try:
        for group in read_groups(_read_lines(args.input), length_fn):
            report = compute_group(group, args.algo, cfg)
            print(report_to_json(report), file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cmd_simulate(args) -> int:
    prompts = make_prompts(
        args.prompts,
        pool_size=args.pool_size,
        length_range=(args.length_min, args.length_max),
        min_correct=args.min_correct,
        seed=args.seed,
    )
    cfg = SimConfig(
        group_size=args.group_size,
        learning_rate=args.learning_rate,
        steps=args.steps,
        temperature=args.temperature,
        algo=args.algo,
        reward=_reward_config(args),
        seed=args.seed,
    )
    report = run_experiment(prompts, cfg)
    if args.trajectory:
        with open(args.trajectory, "w", encoding="utf-8") as handle:
            for line in trajectory_lines(report):
                handle.write(line + "\n")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write(trajectory_csv(report))
    print(_dump_json(summary_dict(report)))
    return 0


def _cmd_metrics(args) -> int:
    records = read_eval_records(_read_lines(args.records))
    summary = summarize(records, args.base_avg)
    if args.table:
        cr_text = "-" if summary.cr is None else f"{summary.cr:.2f}"
        print(f"{'P@1':>8} {'Tokens':>10} {'CR':>8}")
        print(f"{summary.pass_at_1:>8.2f} {summary.avg_tokens:>10.1f} {cr_text:>8}")
        return 0
    payload = {"pass_at_1": summary.pass_at_1, "avg_tokens": summary.avg_tokens}
    if summary.cr is not None:
        payload["cr"] = summary.cr
    print(_dump_json(payload))
    return 0


def _cmd_dataset(args) -> int:
    strictness = "strict" if args.strict else "lenient"
    records, report = load_corpus_lines(
        _read_lines(args.input), strictness, _field_map(args.field_map)
    )
    if args.dataset_command == "validate":
        for issue in report.malformed:
            print(f"line {issue.line_no} malformed {issue.kind}: {issue.detail}")
        for issue in report.warnings:
            print(f"line {issue.line_no} warning {issue.kind}: {issue.detail}")
        print(
            f"total {report.total}, well-formed {report.well_formed}, "
            f"malformed {report.malformed_count}"
        )
        return 0 if report.malformed_count <= args.max_malformed else 1
    if args.dataset_command == "format":
        for record in records:
            pair = to_sft_pair(record)
            print(_dump_json({"prompt": pair.prompt, "target": pair.target}))
        return 0
    stats = corpus_stats(records)
    print(
        _dump_json(
            {
                "n_records": stats.n_records,
                "mean_steps": stats.mean_steps,
                "executability_rate": stats.executability_rate,
                "step_counts": {str(k): v for k, v in stats.step_counts.items()},
                "operator_counts": stats.operator_counts,
            }
        )
    )
    return 0


_DISPATCH = {
    "validate": _cmd_validate,
    "exec": _cmd_exec,
    "verify": _cmd_verify,
    "reward": _cmd_reward,
    "simulate": _cmd_simulate,
    "metrics": _cmd_metrics,
    "dataset": _cmd_dataset,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if config_path:
        try:
            defaults = _load_config_file(config_path)
        except (OSError, ValueError) as exc:
            print(f"error reading config: {exc}", file=sys.stderr)
            return 1
        # Config supplies defaults; explicit flags win because we reparse
        # with the config values planted first on every (sub)parser.
        planted = {k: _coerce_like(args, k, v) for k, v in defaults.items() if hasattr(args, k)}
        for sub_parser in parser.all_parsers:
            sub_parser.set_defaults(**planted)
        args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (TraceError, ExecutionError, RewardError, SimError, MetricsError,
            DatasetError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def _coerce_like(args: argparse.Namespace, key: str, value: str):
    current = getattr(args, key)
    if isinstance(current, bool):
        return value.lower() in ("1", "true", "yes", "on")
    if isinstance(current, int) and not isinstance(current, bool):
        return int(value)
    if isinstance(current, float):
        return float(value)
    return value


if __name__ == "__main__":
    sys.exit(main())
