"""Boxed-answer extraction and binary correctness verification.

A model response is graded by pulling the contents of its last balanced
``\\boxed{...}``, normalizing both sides, and comparing: exact rational
equality when both sides are rationals, absolute-tolerance comparison when
either side is a decimal, and plain string equality otherwise.  The result
is always a verdict with ``correct`` in {0, 1}; malformed input is never an
exception, it is simply wrong.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

__all__ = [
    "THINK_OPEN",
    "THINK_CLOSE",
    "DECIMAL_TOLERANCE",
    "MatchReason",
    "ModelResponse",
    "VerifierVerdict",
    "extract_boxed",
    "normalize_answer",
    "verify",
]

THINK_OPEN = "<think>"
THINK_CLOSE = "</think>"

DECIMAL_TOLERANCE = 1e-9


class MatchReason(Enum):
    EXACT_RATIONAL_MATCH = "ExactRationalMatch"
    DECIMAL_MATCH = "DecimalMatch"
    STRING_MATCH = "StringMatch"
    NO_BOXED_ANSWER = "NoBoxedAnswer"
    MISMATCH = "Mismatch"


@dataclass(frozen=True)
class ModelResponse:
    raw_text: str
    think_segment: str | None
    tail_segment: str

    @classmethod
    def from_raw(cls, raw_text: str) -> "ModelResponse":
        open_at = raw_text.find(THINK_OPEN)
        close_at = raw_text.find(THINK_CLOSE)
        if open_at != -1 and close_at > open_at:
            think = raw_text[open_at + len(THINK_OPEN):close_at]
            tail = raw_text[close_at + len(THINK_CLOSE):]
            return cls(raw_text, think, tail)
        return cls(raw_text, None, raw_text)


@dataclass(frozen=True)
class VerifierVerdict:
    extracted: str | None  # normalized, when a boxed answer was found
    gold: str  # normalized
    correct: int  # 0 or 1
    reason: MatchReason


def extract_boxed(raw_text: str) -> str | None:
    """Return the contents of the last balanced ``\\boxed{...}``, if any."""
    if not raw_text:
        return None
    for match in reversed(list(re.finditer(r"\\boxed", raw_text))):
        scan = match.end()
        while scan < len(raw_text) and raw_text[scan].isspace():
            scan += 1
        if scan >= len(raw_text) or raw_text[scan] != "{":
            continue
        depth = 0
        for i in range(scan, len(raw_text)):
            if raw_text[i] == "{":
                depth += 1
            elif raw_text[i] == "}":
                depth -= 1
                if depth == 0:
                    return raw_text[scan + 1:i]
        # Unbalanced; try an earlier occurrence.
    return None


def _strip_braced(text: str, command: str, template: str) -> str:
    """Rewrite ``command{a}`` (or ``command{a}{b}``) using a brace-matched scan."""
    slots = template.count("{}")
    search_from = 0
    while True:
        pos = text.find(command, search_from)
        if pos < 0:
            return text
        groups = []
        scan = pos + len(command)
        ok = True
        for _ in range(slots):
            while scan < len(text) and text[scan].isspace():
                scan += 1
            if scan >= len(text) or text[scan] != "{":
                ok = False
                break
            depth = 0
            start = scan
            end = None
            for i in range(scan, len(text)):
                if text[i] == "{":
                    depth += 1
                elif text[i] == "}":
                    depth -= 1
                    if depth == 0:
                        end = i
                        break
            if end is None:
                ok = False
                break
            groups.append(text[start + 1:end])
            scan = end + 1
        if not ok:
            # Malformed occurrence; leave it and move past.
            search_from = pos + len(command)
            continue
        parts = template.split("{}")
        replacement = parts[0] + "".join(g + p for g, p in zip(groups, parts[1:]))
        text = text[:pos] + replacement + text[scan:]


_UNARY_PLUS_RE = re.compile(r"(^|[(,*/^=+-])\+")


def normalize_answer(text: str) -> str:
    """Canonicalize an answer string for comparison; idempotent."""
    s = text
    s = re.sub(r"\s+", "", s)
    s = s.replace("$", "")
    s = s.replace("\\left", "").replace("\\right", "")
    s = s.replace("−", "-").replace("×", "*").replace("÷", "/")
    s = _strip_braced(s, "\\boxed", "{}")
    for frac in ("\\dfrac", "\\tfrac", "\\frac"):
        s = _strip_braced(s, frac, "{}/{}")
    s = _strip_braced(s, "\\sqrt", "sqrt({})")
    s = s.replace("\\cdot", "*")
    while True:
        collapsed = _UNARY_PLUS_RE.sub(r"\1", s)
        if collapsed == s:
            return s
        s = collapsed


_RATIONAL_RE = re.compile(r"[+-]?\d+(?:/\d+)?\Z")


def _as_rational(s: str) -> Fraction | None:
    if not _RATIONAL_RE.match(s):
        return None
    try:
        return Fraction(s)
    except ZeroDivisionError:
        return None


def _as_decimal(s: str) -> float | None:
    rational = _as_rational(s)
    if rational is not None:
        return float(rational)
    try:
        value = float(s)
    except ValueError:
        return None
    if value != value or value in (float("inf"), float("-inf")):
        return None
    return value


def verify(response: ModelResponse | str, gold: str) -> VerifierVerdict:
    """Grade a response against the gold answer; returns correct in {0, 1}."""
    if not gold:
        raise ValueError("gold answer must be non-empty")
    if isinstance(response, str):
        response = ModelResponse.from_raw(response)
    gold_norm = normalize_answer(gold)
    boxed = extract_boxed(response.raw_text)
    if boxed is None:
        return VerifierVerdict(None, gold_norm, 0, MatchReason.NO_BOXED_ANSWER)
    extracted = normalize_answer(boxed)

    rational_ext = _as_rational(extracted)
    rational_gold = _as_rational(gold_norm)
    if rational_ext is not None and rational_gold is not None:
        if rational_ext == rational_gold:
            return VerifierVerdict(extracted, gold_norm, 1, MatchReason.EXACT_RATIONAL_MATCH)
        return VerifierVerdict(extracted, gold_norm, 0, MatchReason.MISMATCH)

    decimal_ext = _as_decimal(extracted)
    decimal_gold = _as_decimal(gold_norm)
    if decimal_ext is not None and decimal_gold is not None:
        if abs(decimal_ext - decimal_gold) <= DECIMAL_TOLERANCE:
            return VerifierVerdict(extracted, gold_norm, 1, MatchReason.DECIMAL_MATCH)
        return VerifierVerdict(extracted, gold_norm, 0, MatchReason.MISMATCH)

    if extracted == gold_norm:
        return VerifierVerdict(extracted, gold_norm, 1, MatchReason.STRING_MATCH)
    return VerifierVerdict(extracted, gold_norm, 0, MatchReason.MISMATCH)
