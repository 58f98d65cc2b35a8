"""Boxed-answer extraction, normalization, and grading."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mentalese.verifier import (
    MatchReason,
    ModelResponse,
    extract_boxed,
    normalize_answer,
    verify,
)


class TestExtractBoxed:
    def test_simple(self):
        assert extract_boxed("<think>steps</think> \\boxed{27}") == "27"

    def test_nested_braces(self):
        assert extract_boxed("\\boxed{-\\frac{2}{3}}") == "-\\frac{2}{3}"

    def test_absent(self):
        assert extract_boxed("no box here") is None

    def test_last_box_wins(self):
        text = "first \\boxed{1} then finally \\boxed{2}"
        assert extract_boxed(text) == "2"

    def test_unbalanced_final_box_falls_back(self):
        assert extract_boxed("\\boxed{ok} junk \\boxed{broken") == "ok"

    def test_whitespace_before_brace(self):
        assert extract_boxed("\\boxed {42}") == "42"

    def test_inside_math_delimiters(self):
        assert extract_boxed("\\(\\boxed{27}\\)") == "27"


class TestNormalizeAnswer:
    @pytest.mark.parametrize(
        "raw, expected",
        [
            ("-\\frac{2}{3}", "-2/3"),
            (" 27 ", "27"),
            ("\\dfrac{\\sqrt{2}}{2}", "sqrt(2)/2"),
            ("$\\left(1,2\\right)$", "(1,2)"),
            ("+27", "27"),
            ("2\\cdot3", "2*3"),
            ("\\boxed{5}", "5"),
        ],
    )
    def test_examples(self, raw, expected):
        assert normalize_answer(raw) == expected

    @given(st.text(max_size=60))
    @settings(max_examples=300, deadline=None)
    def test_idempotent(self, text):
        once = normalize_answer(text)
        assert normalize_answer(once) == once


class TestModelResponse:
    def test_splits_think_segment(self):
        response = ModelResponse.from_raw("<think>abc</think>tail")
        assert response.think_segment == "abc"
        assert response.tail_segment == "tail"

    def test_without_think_tags(self):
        response = ModelResponse.from_raw("just text")
        assert response.think_segment is None
        assert response.tail_segment == "just text"


class TestVerify:
    def test_exact_integer_match(self):
        verdict = verify("\\boxed{27}", "27")
        assert verdict.correct == 1
        assert verdict.reason is MatchReason.EXACT_RATIONAL_MATCH

    def test_fraction_forms_match(self):
        assert verify("\\boxed{-\\frac{2}{3}}", "-2/3").correct == 1

    def test_decimal_vs_fraction(self):
        verdict = verify("\\boxed{0.5}", "1/2")
        assert verdict.correct == 1
        assert verdict.reason is MatchReason.DECIMAL_MATCH

    def test_symbolic_string_match(self):
        verdict = verify("\\boxed{\\dfrac{\\sqrt{2}}{2}}", "sqrt(2)/2")
        assert verdict.correct == 1
        assert verdict.reason is MatchReason.STRING_MATCH

    def test_no_boxed_answer(self):
        verdict = verify("the answer is 27", "27")
        assert verdict.correct == 0
        assert verdict.reason is MatchReason.NO_BOXED_ANSWER

    def test_mismatch(self):
        verdict = verify("\\boxed{28}", "27")
        assert (verdict.correct, verdict.reason) == (0, MatchReason.MISMATCH)

    def test_rational_comparison_is_exact(self):
        # One part in 10^12: decimals would pass a tolerance, rationals must not.
        assert verify("\\boxed{1000000000001/1000000000000}", "1").correct == 0

    def test_empty_gold_rejected(self):
        with pytest.raises(ValueError):
            verify("\\boxed{1}", "")

    def test_all_graded_responses_correct(self, graded_responses):
        gold = graded_responses["gold"]
        for name, text in graded_responses["responses"].items():
            assert verify(text, gold).correct == 1, name

    def test_symmetry_on_boxed_only_inputs(self):
        pairs = [("27", "27"), ("-2/3", "0.5"), ("1/2", "0.5"), ("x+1", "x+1"), ("a", "b")]
        for left, right in pairs:
            forward = verify(f"\\boxed{{{left}}}", f"\\boxed{{{right}}}").correct
            backward = verify(f"\\boxed{{{right}}}", f"\\boxed{{{left}}}").correct
            assert forward == backward


@settings(max_examples=400, deadline=None)
@given(st.text(max_size=120))
def test_verify_never_aborts(text):
    verdict = verify(text, "27")
    assert verdict.correct in (0, 1)
