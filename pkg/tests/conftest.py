"""Shared fixtures: sample traces, graded responses, random generators."""

from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from mentalese import expressions as E

DATA_DIR = Path(__file__).parent / "data"

CORPUS_PATH = DATA_DIR / "sample_corpus.jsonl"


def load_corpus_records() -> list[dict]:
    with open(CORPUS_PATH, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


@pytest.fixture(scope="session")
def corpus_records() -> list[dict]:
    return load_corpus_records()


@pytest.fixture(scope="session")
def corpus_traces(corpus_records) -> dict[str, str]:
    """Trace text keyed by position: binary-op, panes, degree, sum, radical."""
    keys = ("binary_op", "panes", "degree", "sum", "radical")
    return dict(zip(keys, (r["mentalese"] for r in corpus_records)))


@pytest.fixture(scope="session")
def graded_responses() -> dict:
    with open(DATA_DIR / "model_responses.json", encoding="utf-8") as handle:
        return json.load(handle)


# --- random generators used by round-trip and oracle tests -------------------

_IDENT_POOL = ["a", "b", "c", "x", "y", "z", "u", "v", "w1", "w2", "total"]
_EXTENDED_OPS = ["PANE_HEIGHT", "ROWS", "COLS", "STEP2", "WIDTH", "NOTE"]
_VALUE_OPS = ["CALC", "CALC1", "CALC2", "EVAL1", "SUM", "DIFF", "ADD", "SUB", "DIV"]


def random_closed_expr(rng: random.Random, bound: dict[str, Fraction], depth: int):
    """Random rational-closed expression plus its exact value.

    Returns (expr, Fraction).  Division by zero and huge powers are avoided
    during generation, so the value always exists.
    """
    if depth <= 0 or rng.random() < 0.3:
        if bound and rng.random() < 0.4:
            name = rng.choice(sorted(bound))
            return E.Name(name), bound[name]
        value = rng.randint(0, 40)
        return E.Integer(value), Fraction(value)
    choice = rng.random()
    if choice < 0.18:
        inner, value = random_closed_expr(rng, bound, depth - 1)
        return E.Neg(inner), -value
    if choice < 0.28:
        inner, value = random_closed_expr(rng, bound, depth - 1)
        return E.Call("abs", (inner,)), abs(value)
    op = rng.choice(["+", "-", "*", "/", "^"])
    left, lv = random_closed_expr(rng, bound, depth - 1)
    if op == "^":
        exponent = rng.randint(0, 3)
        if lv == 0 and exponent == 0:
            exponent = 1
        return E.BinOp("^", left, E.Integer(exponent)), lv ** exponent
    right, rv = random_closed_expr(rng, bound, depth - 1)
    if op == "/" and rv == 0:
        right, rv = E.Integer(7), Fraction(7)
    value = {"+": lv + rv, "-": lv - rv, "*": lv * rv, "/": lv / rv if rv else None}[op]
    return E.BinOp(op, left, right), value


def random_rational_trace(rng: random.Random) -> tuple[str, Fraction]:
    """A rational-closed trace plus the exact value its ANS denotes."""
    bound: dict[str, Fraction] = {}
    lines = []
    for i in range(rng.randint(1, 6)):
        name = rng.choice(_IDENT_POOL)
        expr, value = random_closed_expr(rng, bound, rng.randint(1, 3))
        op = rng.choice(_VALUE_OPS)
        lines.append(f"{op}:{name}={E.to_text(expr)}")
        bound[name] = value
    answer_expr, answer = random_closed_expr(rng, bound, rng.randint(1, 3))
    lines.append(f"ANS:{E.to_text(answer_expr)}")
    return ";".join(lines) + ";", answer


def random_trace_text(rng: random.Random) -> str:
    """A structurally valid trace mixing core, indexed, and extended steps."""
    bound: dict[str, Fraction] = {}
    lines = []
    for _ in range(rng.randint(0, 7)):
        kind = rng.random()
        expr, value = random_closed_expr(rng, bound, rng.randint(1, 3))
        if kind < 0.2:
            name = rng.choice(_IDENT_POOL)
            lines.append(f"SET:{name}={E.to_text(expr)}")
            bound[name] = value
        elif kind < 0.35:
            other, _ = random_closed_expr(rng, bound, rng.randint(1, 2))
            lines.append(f"EQ:{E.to_text(expr)}={E.to_text(other)}")
        elif kind < 0.5:
            lines.append(f"{rng.choice(_EXTENDED_OPS)}:{E.to_text(expr)}")
        elif kind < 0.6:
            lines.append(f"CASE{rng.randint(1, 3)}:{E.to_text(expr)}")
        elif kind < 0.7:
            lines.append(f"CHECK:{E.to_text(expr)}")
        else:
            name = rng.choice(_IDENT_POOL)
            lines.append(f"{rng.choice(_VALUE_OPS)}:{name}={E.to_text(expr)}")
            bound[name] = value
    answer_expr, _ = random_closed_expr(rng, bound, rng.randint(1, 3))
    lines.append(f"ANS:{E.to_text(answer_expr)}")
    return ";".join(lines) + ";"
