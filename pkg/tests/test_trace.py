"""Trace parsing, validation, and round-trip printing."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_trace_text
from mentalese.expressions import Opaque
from mentalese.trace import (
    BadOperatorName,
    DanglingAnsNotLast,
    EmptyInput,
    MissingColon,
    MultipleAnsSteps,
    NoAnsStep,
    Operator,
    TraceError,
    UnparseableExpression,
    Violation,
    parse_trace,
    print_trace,
    traces_equal,
    validate_trace,
)


class TestParseTrace:
    def test_minimal_trace(self):
        trace = parse_trace("SET:x;EQ:2*x=4;SOLVE:x=2;ANS:2")
        assert [s.op.name for s in trace] == ["SET", "EQ", "SOLVE", "ANS"]
        assert trace.steps[-1].op.name == "ANS"

    def test_binary_op_example_steps(self, corpus_traces):
        trace = parse_trace(corpus_traces["binary_op"])
        assert [s.op.name for s in trace] == [
            "DEF", "CALC1", "CALC2", "CALC3", "CALC4", "SUB", "ANS",
        ]

    def test_missing_ans_is_an_error(self):
        with pytest.raises(NoAnsStep):
            parse_trace("SET:x;EQ:x=1")

    def test_multiple_ans_rejected(self):
        with pytest.raises(MultipleAnsSteps):
            parse_trace("ANS:1;ANS:2")

    def test_ans_must_be_last(self):
        with pytest.raises(DanglingAnsNotLast):
            parse_trace("ANS:1;SET:x")

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            parse_trace("   \n ")

    def test_headless_first_chunk(self):
        with pytest.raises(MissingColon):
            parse_trace("just some text")

    def test_lowercase_head_rejected_up_front(self):
        with pytest.raises(BadOperatorName):
            parse_trace("set: x; ANS:1")

    def test_trailing_semicolon_optional(self):
        with_semi = parse_trace("SET:x;ANS:1;")
        without = parse_trace("SET:x;ANS:1")
        assert traces_equal(with_semi, without)

    def test_whitespace_and_latex_markers_stripped(self):
        trace = parse_trace("SET: $x$ ;\nANS: $1$;")
        assert trace.steps[0].expr.ident == "x"

    def test_continuation_chunks_fold_into_previous_step(self, corpus_traces):
        trace = parse_trace(corpus_traces["radical"])
        solve = trace.steps[8]
        assert solve.op.name == "SOLVE"
        assert isinstance(solve.expr, Opaque)
        assert solve.payload.count(";") == 2

    def test_strict_mode_rejects_continuations(self, corpus_traces):
        with pytest.raises((MissingColon, UnparseableExpression)):
            parse_trace(corpus_traces["radical"], "strict")

    def test_strict_mode_rejects_unparseable_payloads(self):
        with pytest.raises(UnparseableExpression) as info:
            parse_trace("SET:x;CHECK:smallest value!;ANS:1", "strict")
        assert info.value.step_index == 1

    def test_lenient_mode_wraps_unparseable_payloads(self):
        trace = parse_trace("SET:x;CHECK:smallest value!;ANS:1")
        assert isinstance(trace.steps[1].expr, Opaque)

    def test_semicolon_inside_braces_does_not_split(self):
        trace = parse_trace("SET:x;NOTE:\\boxed{1;2};ANS:1")
        assert len(trace) == 3
        assert trace.steps[1].payload == "\\boxed{1;2}"

    def test_source_spans_cover_input_bytes(self):
        text = "SET:x;ANS:√4;"
        trace = parse_trace(text)
        raw = text.encode("utf-8")
        for step in trace:
            start, end = step.source_span
            assert 0 <= start <= end <= len(raw)
        assert b"ANS" in raw[trace.steps[1].source_span[0]:trace.steps[1].source_span[1]]

    def test_all_sample_traces_parse_clean(self, corpus_records):
        for record in corpus_records:
            trace = parse_trace(record["mentalese"])
            assert trace.steps[-1].op.name == "ANS"


class TestOperatorClassification:
    @pytest.mark.parametrize("name", ["SET", "ANS", "CALC", "CALC7", "CASE2", "EVAL1", "EXPAND3", "SOLVE"])
    def test_core(self, name):
        assert Operator(name).kind == "core"

    @pytest.mark.parametrize("name", ["PANE_HEIGHT", "WINDOW_SIDE", "ROWS", "EVAL", "NOTE2"])
    def test_extended(self, name):
        assert Operator(name).kind == "extended"

    def test_bad_names_rejected(self):
        for bad in ("ans", "1SET", "", "SET X"):
            with pytest.raises(BadOperatorName):
                Operator(bad)

    def test_classification_partitions_conforming_names(self):
        rng = random.Random(7)
        alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_"
        for _ in range(500):
            name = rng.choice(alphabet[:26]) + "".join(
                rng.choice(alphabet) for _ in range(rng.randint(0, 6))
            )
            assert Operator(name).kind in ("core", "extended")


class TestPrintTrace:
    def test_whitespace_canonicalization(self):
        trace = parse_trace("SET:x ; ANS:x;")
        assert print_trace(trace) == "SET:x;ANS:x;"

    def test_round_trip_binary_op_example(self, corpus_traces):
        trace = parse_trace(corpus_traces["binary_op"])
        assert traces_equal(parse_trace(print_trace(trace)), trace)

    def test_round_trip_all_samples(self, corpus_records):
        for record in corpus_records:
            trace = parse_trace(record["mentalese"])
            assert traces_equal(parse_trace(print_trace(trace)), trace)

    def test_empty_trace_unconstructible(self):
        with pytest.raises(EmptyInput):
            print_trace(parse_trace(""))


class TestValidateTrace:
    def test_valid_trace_has_empty_report(self):
        assert validate_trace(parse_trace("SET:x;EQ:2*x=4;SOLVE:x=2;ANS:2")) == []

    def test_use_before_definition_in_ans(self):
        violations = validate_trace(parse_trace("ANS:y;"))
        assert [(v.kind, v.detail) for v in violations] == [("UseBeforeDefinition", "y")]

    def test_sum_example_is_clean(self, corpus_traces):
        assert validate_trace(parse_trace(corpus_traces["sum"])) == []

    def test_equations_introduce_unknowns(self):
        # N first appears inside an equation, which is how unknowns are born.
        assert validate_trace(parse_trace("EQ:4975=5000-N;SOLVE:N=25;ANS:N;")) == []

    def test_plain_payload_use_is_checked(self):
        violations = validate_trace(parse_trace("SET:x;TOTAL:10*q+6;ANS:1;"))
        assert violations == [Violation("UseBeforeDefinition", 1, "q")]


class TestRoundTripProperty:
    def test_seeded_random_traces(self):
        rng = random.Random(20240817)
        for _ in range(500):
            text = random_trace_text(rng)
            trace = parse_trace(text)
            assert traces_equal(parse_trace(print_trace(trace)), trace)


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=200))
def test_parser_totality_lenient(text):
    """Lenient parsing of arbitrary input: a trace or a diagnostic, no crash."""
    try:
        trace = parse_trace(text)
    except TraceError:
        return
    assert trace.steps[-1].op.name == "ANS"


@settings(max_examples=150, deadline=None)
@given(st.binary(max_size=120))
def test_parser_totality_on_bytes(data):
    try:
        parse_trace(data.decode("utf-8", errors="replace"))
    except TraceError:
        pass
