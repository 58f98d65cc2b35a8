"""Deterministic step semantics for reasoning traces.

Execution walks the steps in order, maintaining identifier bindings,
recorded equations, and (single-level) case scopes, and returns the value
of the final ``ANS`` payload.  Arithmetic is exact over rationals wherever
the operations stay rational; decimal literals contaminate a computation
into floating point; square roots of non-squares produce limited symbolic
values such as ``sqrt(2)/2``.

Lenient mode (the default everywhere) downgrades steps it cannot evaluate
into recorded annotations; strict mode refuses them.  Genuine arithmetic
faults (division by zero, a rejected solution candidate) raise in both
modes.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Union

from . import expressions as E
from .trace import MentaleseTrace, Step

__all__ = [
    "Rational",
    "Decimal",
    "Symbolic",
    "Value",
    "ExecutionResult",
    "ExecutionWarning",
    "Environment",
    "ExecutionError",
    "UseBeforeDefinition",
    "DivisionByZero",
    "NonlinearUnsolvable",
    "CandidateRejected",
    "UnsupportedFunction",
    "AnnotationNotAllowed",
    "UnevaluableAnswer",
    "eval_expr",
    "execute",
    "value_to_string",
    "values_equal",
]

#: absolute tolerance for comparisons once floating point is involved
DECIMAL_TOLERANCE = 1e-9

ExecMode = Literal["strict", "lenient"]


class ExecutionError(ValueError):
    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index


class UseBeforeDefinition(ExecutionError):
    pass


class DivisionByZero(ExecutionError):
    pass


class NonlinearUnsolvable(ExecutionError):
    pass


class CandidateRejected(ExecutionError):
    pass


class UnsupportedFunction(ExecutionError):
    pass


class AnnotationNotAllowed(ExecutionError):
    pass


class UnevaluableAnswer(ExecutionError):
    pass


# Failures that downgrade a step to an annotation in lenient mode, as
# opposed to faults that abort execution outright.
_RECOVERABLE = (UseBeforeDefinition, UnsupportedFunction)


@dataclass(frozen=True)
class Rational:
    """Exact rational; always stored normalized with positive denominator."""

    value: Fraction

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator


@dataclass(frozen=True)
class Decimal:
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError("decimal values must be finite")


@dataclass(frozen=True)
class Symbolic:
    """A value kept as a canonical expression, e.g. sqrt(2)/2."""

    expr: E.Expr


Value = Union[Rational, Decimal, Symbolic]


def _rat(n, d: int = 1) -> Rational:
    return Rational(Fraction(n, d))


def value_to_string(value: Value) -> str:
    if isinstance(value, Rational):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, Decimal):
        return repr(value.value)
    return E.to_text(value.expr)


def _as_expr(value: Value) -> E.Expr:
    if isinstance(value, Symbolic):
        return value.expr
    if isinstance(value, Decimal):
        return E.DecimalLit(repr(value.value))
    frac = value.value
    node: E.Expr
    if frac.denominator == 1:
        node = E.Integer(abs(frac.numerator))
    else:
        node = E.BinOp("/", E.Integer(abs(frac.numerator)), E.Integer(frac.denominator))
    return E.Neg(node) if frac < 0 else node


def _symbolic_float(expr: E.Expr) -> float | None:
    """Best-effort numeric approximation of a closed symbolic expression."""
    if isinstance(expr, E.Integer):
        return float(expr.value)
    if isinstance(expr, E.DecimalLit):
        return expr.value
    if isinstance(expr, E.Neg):
        inner = _symbolic_float(expr.operand)
        return None if inner is None else -inner
    if isinstance(expr, E.BinOp):
        left = _symbolic_float(expr.left)
        right = _symbolic_float(expr.right)
        if left is None or right is None:
            return None
        try:
            if expr.op == "+":
                return left + right
            if expr.op == "-":
                return left - right
            if expr.op == "*":
                return left * right
            if expr.op == "/":
                return left / right
            if expr.op == "^":
                return left ** right
        except (ZeroDivisionError, OverflowError, ValueError):
            return None
    if isinstance(expr, E.Call) and len(expr.args) == 1:
        arg = _symbolic_float(expr.args[0])
        if arg is None:
            return None
        if expr.func == "sqrt":
            return math.sqrt(arg) if arg >= 0 else None
        if expr.func == "abs":
            return abs(arg)
    return None


def _to_float(value: Value) -> float | None:
    if isinstance(value, Rational):
        return float(value.value)
    if isinstance(value, Decimal):
        return value.value
    return _symbolic_float(value.expr)


def values_equal(a: Value, b: Value, tolerance: float = DECIMAL_TOLERANCE) -> bool:
    """Equality across the numeric tower; exact when both sides are rational."""
    if isinstance(a, Rational) and isinstance(b, Rational):
        return a.value == b.value
    if isinstance(a, Symbolic) and isinstance(b, Symbolic):
        if E.to_text(a.expr) == E.to_text(b.expr):
            return True
    fa, fb = _to_float(a), _to_float(b)
    if fa is None or fb is None:
        return False
    return abs(fa - fb) <= tolerance


# --- arithmetic on values -----------------------------------------------------


def _binary(op: str, left: Value, right: Value) -> Value:
    if isinstance(left, Symbolic) or isinstance(right, Symbolic):
        return Symbolic(E.BinOp(op, _as_expr(left), _as_expr(right)))
    if isinstance(left, Decimal) or isinstance(right, Decimal):
        lf = left.value if isinstance(left, Decimal) else float(left.value)
        rf = right.value if isinstance(right, Decimal) else float(right.value)
        return Decimal(_float_op(op, lf, rf))
    return _rational_op(op, left.value, right.value)


def _float_op(op: str, lf: float, rf: float) -> float:
    if op == "+":
        return lf + rf
    if op == "-":
        return lf - rf
    if op == "*":
        return lf * rf
    if op == "/":
        if rf == 0.0:
            raise DivisionByZero("division by zero")
        return lf / rf
    if op == "^":
        try:
            result = lf ** rf
        except (OverflowError, ZeroDivisionError) as exc:
            raise DivisionByZero(f"invalid power {lf} ^ {rf}") from exc
        if isinstance(result, complex) or not math.isfinite(result):
            raise UnsupportedFunction(f"power {lf} ^ {rf} leaves the real line")
        return result
    raise UnsupportedFunction(f"unknown operator {op!r}")


def _rational_op(op: str, lf: Fraction, rf: Fraction) -> Value:
    if op == "+":
        return Rational(lf + rf)
    if op == "-":
        return Rational(lf - rf)
    if op == "*":
        return Rational(lf * rf)
    if op == "/":
        if rf == 0:
            raise DivisionByZero("division by zero")
        return Rational(lf / rf)
    if op == "^":
        if rf.denominator == 1:
            exponent = rf.numerator
            if lf == 0 and exponent < 0:
                raise DivisionByZero("zero to a negative power")
            return Rational(lf ** exponent)
        # Non-integer exponent on a rational base: decimal fallback.
        return Decimal(_float_op("^", float(lf), float(rf)))
    raise UnsupportedFunction(f"unknown operator {op!r}")


def _sqrt(value: Value) -> Value:
    if isinstance(value, Decimal):
        if value.value < 0:
            raise UnsupportedFunction("sqrt of a negative number")
        return Decimal(math.sqrt(value.value))
    if isinstance(value, Symbolic):
        return Symbolic(E.Call("sqrt", (value.expr,)))
    frac = value.value
    if frac < 0:
        raise UnsupportedFunction("sqrt of a negative number")
    num_root = math.isqrt(frac.numerator)
    den_root = math.isqrt(frac.denominator)
    if num_root * num_root == frac.numerator and den_root * den_root == frac.denominator:
        return Rational(Fraction(num_root, den_root))
    return Symbolic(E.Call("sqrt", (_as_expr(value),)))


def _abs(value: Value) -> Value:
    if isinstance(value, Rational):
        return Rational(abs(value.value))
    if isinstance(value, Decimal):
        return Decimal(abs(value.value))
    return Symbolic(E.Call("abs", (value.expr,)))


# --- environment ----------------------------------------------------------------


class _Scope:
    __slots__ = ("bindings", "equations", "functions", "label")

    def __init__(self, label: str = ""):
        self.bindings: dict[str, Value | None] = {}
        self.equations: list[E.Equation] = []
        self.functions: dict[str, tuple[tuple[str, ...], E.Expr]] = {}
        self.label = label


class Environment:
    """Execution state: scoped bindings, recorded equations, definitions.

    A CASE step replaces the current case scope with a fresh sibling seeded
    from the root scope, so bindings made inside one case are invisible to
    the next.
    """

    def __init__(self) -> None:
        self.scopes: list[_Scope] = [_Scope("root")]

    # -- name bindings

    def declare(self, name: str) -> None:
        scope = self.scopes[-1]
        scope.bindings.setdefault(name, None)

    def bind(self, name: str, value: Value) -> None:
        self.scopes[-1].bindings[name] = value

    def lookup(self, name: str) -> Value:
        for scope in reversed(self.scopes):
            if name in scope.bindings:
                value = scope.bindings[name]
                if value is None:
                    raise UseBeforeDefinition(f"{name!r} is declared but has no value")
                return value
        raise UseBeforeDefinition(f"{name!r} is not defined")

    def is_declared(self, name: str) -> bool:
        return any(name in scope.bindings for scope in self.scopes)

    def is_bound(self, name: str) -> bool:
        return any(
            scope.bindings.get(name) is not None
            for scope in self.scopes
            if name in scope.bindings
        )

    # -- equations and functions

    def record_equation(self, equation: E.Equation) -> None:
        self.scopes[-1].equations.append(equation)

    def visible_equations(self) -> list[E.Equation]:
        equations: list[E.Equation] = []
        for scope in self.scopes:
            equations.extend(scope.equations)
        return equations

    def define_function(self, name: str, params: tuple[str, ...], body: E.Expr) -> None:
        self.scopes[-1].functions[name] = (params, body)

    def lookup_function(self, name: str) -> tuple[tuple[str, ...], E.Expr] | None:
        for scope in reversed(self.scopes):
            if name in scope.functions:
                return scope.functions[name]
        return None

    # -- scopes

    def enter_case(self, label: str) -> None:
        if len(self.scopes) > 1:
            self.scopes.pop()
        self.scopes.append(_Scope(label))

    def push(self, label: str = "") -> None:
        self.scopes.append(_Scope(label))

    def pop(self) -> None:
        self.scopes.pop()


# --- expression evaluation ------------------------------------------------------


def eval_expr(expr: E.Expr, env: Environment) -> Value:
    """Evaluate a non-Opaque, non-equation expression in ``env``."""
    if isinstance(expr, E.Integer):
        return _rat(expr.value)
    if isinstance(expr, E.DecimalLit):
        return Decimal(expr.value)
    if isinstance(expr, E.Name):
        return env.lookup(expr.ident)
    if isinstance(expr, E.Neg):
        inner = eval_expr(expr.operand, env)
        if isinstance(inner, Rational):
            return Rational(-inner.value)
        if isinstance(inner, Decimal):
            return Decimal(-inner.value)
        return Symbolic(E.Neg(inner.expr))
    if isinstance(expr, E.BinOp):
        return _binary(expr.op, eval_expr(expr.left, env), eval_expr(expr.right, env))
    if isinstance(expr, E.Call):
        return _eval_call(expr, env)
    if isinstance(expr, E.Equation):
        raise UnsupportedFunction("an equation is not a value")
    if isinstance(expr, E.Opaque):
        raise ValueError("cannot evaluate opaque payload text")
    raise TypeError(f"not an expression node: {expr!r}")


def _eval_call(call: E.Call, env: Environment) -> Value:
    definition = env.lookup_function(call.func)
    if definition is not None:
        params, body = definition
        if len(params) != len(call.args):
            raise UnsupportedFunction(
                f"{call.func} expects {len(params)} argument(s), got {len(call.args)}"
            )
        args = [eval_expr(arg, env) for arg in call.args]
        env.push(f"call:{call.func}")
        try:
            for param, value in zip(params, args):
                env.bind(param, value)
            return eval_expr(body, env)
        finally:
            env.pop()
    if call.func == "sqrt" and len(call.args) == 1:
        return _sqrt(eval_expr(call.args[0], env))
    if call.func == "abs" and len(call.args) == 1:
        return _abs(eval_expr(call.args[0], env))
    raise UnsupportedFunction(f"unknown function {call.func!r}")


# --- linear equation solving -----------------------------------------------------


@dataclass(frozen=True)
class _LinearForm:
    """coeff * unknown + const, tracked exactly; decimal taint remembered."""

    coeff: Fraction
    const: Fraction
    decimal: bool = False


def _unbound_names(expr: E.Expr, env: Environment) -> set[str]:
    return {name for name in E.iter_names(expr) if not env.is_bound(name)}


def _linear_form(expr: E.Expr, unknown: str, env: Environment) -> _LinearForm | None:
    if isinstance(expr, E.Integer):
        return _LinearForm(Fraction(0), Fraction(expr.value))
    if isinstance(expr, E.DecimalLit):
        return _LinearForm(Fraction(0), Fraction(expr.lexeme), decimal=True)
    if isinstance(expr, E.Name):
        if expr.ident == unknown:
            return _LinearForm(Fraction(1), Fraction(0))
        try:
            value = env.lookup(expr.ident)
        except UseBeforeDefinition:
            return None
        if isinstance(value, Rational):
            return _LinearForm(Fraction(0), value.value)
        if isinstance(value, Decimal):
            return _LinearForm(Fraction(0), Fraction(*value.value.as_integer_ratio()), decimal=True)
        return None
    if isinstance(expr, E.Neg):
        inner = _linear_form(expr.operand, unknown, env)
        if inner is None:
            return None
        return _LinearForm(-inner.coeff, -inner.const, inner.decimal)
    if isinstance(expr, E.BinOp):
        left = _linear_form(expr.left, unknown, env)
        right = _linear_form(expr.right, unknown, env)
        if left is None or right is None:
            return None
        taint = left.decimal or right.decimal
        if expr.op == "+":
            return _LinearForm(left.coeff + right.coeff, left.const + right.const, taint)
        if expr.op == "-":
            return _LinearForm(left.coeff - right.coeff, left.const - right.const, taint)
        if expr.op == "*":
            if left.coeff == 0:
                return _LinearForm(left.const * right.coeff, left.const * right.const, taint)
            if right.coeff == 0:
                return _LinearForm(left.coeff * right.const, left.const * right.const, taint)
            return None
        if expr.op == "/":
            if right.coeff != 0 or right.const == 0:
                return None
            return _LinearForm(left.coeff / right.const, left.const / right.const, taint)
        if expr.op == "^":
            if left.coeff != 0 or right.coeff != 0 or right.const.denominator != 1:
                return None
            exponent = right.const.numerator
            if left.const == 0 and exponent < 0:
                return None
            return _LinearForm(Fraction(0), left.const ** exponent, taint)
        return None
    if isinstance(expr, E.Call):
        # Calls are linear only when they reduce to a constant.
        if any(name == unknown for name in E.iter_names(expr)):
            return None
        try:
            value = eval_expr(expr, env)
        except ExecutionError:
            return None
        if isinstance(value, Rational):
            return _LinearForm(Fraction(0), value.value)
        if isinstance(value, Decimal):
            return _LinearForm(Fraction(0), Fraction(*value.value.as_integer_ratio()), decimal=True)
        return None
    return None


def _solve_linear(equation: E.Equation, env: Environment) -> tuple[str, Value] | None:
    """Solve the newest equation exactly if linear and univariate over rationals."""
    if len(equation.sides) != 2:
        return None
    unknowns = _unbound_names(equation, env)
    if len(unknowns) != 1:
        return None
    unknown = next(iter(unknowns))
    left = _linear_form(equation.sides[0], unknown, env)
    right = _linear_form(equation.sides[1], unknown, env)
    if left is None or right is None:
        return None
    slope = left.coeff - right.coeff
    if slope == 0:
        return None
    solution = (right.const - left.const) / slope
    if left.decimal or right.decimal:
        return unknown, Decimal(float(solution))
    return unknown, Rational(solution)


# --- execution --------------------------------------------------------------------


@dataclass(frozen=True)
class ExecutionWarning:
    step_index: int
    code: str  # AnnotationSkipped | ChainInconsistent | CheckFailed | ...
    detail: str = ""


@dataclass(frozen=True)
class ExecutionResult:
    answer: Value
    steps_executed: int
    warnings: tuple[ExecutionWarning, ...] = field(default_factory=tuple)


_CASE_RE = re.compile(r"CASE\d+\Z")
_SOLVE_RE = re.compile(r"SOLVE\d*\Z")
_VALUE_RE = re.compile(r"(?:CALC\d*|EVAL\d+|SUM|DIFF|ADD|SUB|DIV)\Z")
_CHECK_RE = re.compile(r"(?:CHECK|COUNT|FACTOR|EXPAND\d+)\Z")


class _Executor:
    def __init__(self, trace: MentaleseTrace, mode: ExecMode):
        self.trace = trace
        self.mode = mode
        self.env = Environment()
        self.warnings: list[ExecutionWarning] = []

    def warn(self, index: int, code: str, detail: str = "") -> None:
        self.warnings.append(ExecutionWarning(index, code, detail))

    def annotate(self, index: int, detail: str) -> None:
        if self.mode == "strict":
            raise AnnotationNotAllowed(f"step {index}: {detail}", index)
        self.warn(index, "AnnotationSkipped", detail)

    def run(self) -> ExecutionResult:
        answer: Value | None = None
        for index, step in enumerate(self.trace):
            try:
                answer = self.step(index, step)
            except ExecutionError as exc:
                if exc.step_index is None:
                    exc.step_index = index
                raise
        assert answer is not None  # the trace invariant guarantees a final ANS
        return ExecutionResult(answer, len(self.trace), tuple(self.warnings))

    # -- helpers

    def try_eval(self, expr: E.Expr) -> Value | None:
        try:
            return eval_expr(expr, self.env)
        except _RECOVERABLE:
            return None

    def chain_values(self, index: int, equation: E.Equation) -> list[Value | None]:
        values = [self.try_eval(side) for side in equation.sides]
        evaluated = [v for v in values if v is not None]
        for first, second in zip(evaluated, evaluated[1:]):
            if not values_equal(first, second):
                self.warn(
                    index,
                    "ChainInconsistent",
                    f"{value_to_string(first)} != {value_to_string(second)}",
                )
        return values

    def bind_from_payload(self, index: int, step: Step) -> None:
        """Shared semantics of value-producing steps (CALC family, extended ops)."""
        expr = step.expr
        if isinstance(expr, E.Opaque):
            self.annotate(index, f"{step.op.name} payload is not an expression")
            return
        if isinstance(expr, E.Equation):
            values = self.chain_values(index, expr)
            target = expr.sides[0]
            candidates = [v for v in values[1:] if v is not None]
            if isinstance(target, E.Name):
                if candidates:
                    self.env.bind(target.ident, candidates[-1])
                else:
                    self.env.declare(target.ident)
                    self.env.record_equation(expr)
                    self.annotate(index, f"no evaluable right-hand side for {target.ident}")
                return
            evaluated = [v for v in values if v is not None]
            if evaluated:
                self.env.bind(step.op.name, evaluated[-1])
            else:
                self.env.record_equation(expr)
                self.annotate(index, "no side of the equation is evaluable")
            return
        value = self.try_eval(expr)
        if value is None:
            self.annotate(index, f"payload of {step.op.name} is not evaluable")
        else:
            self.env.bind(step.op.name, value)

    # -- step dispatch

    def step(self, index: int, step: Step) -> Value | None:
        name = step.op.name
        if name == "ANS":
            return self.do_ans(index, step)
        if name in ("SET", "LET"):
            self.do_set(index, step)
        elif name == "DEF":
            self.do_def(index, step)
        elif name == "EQ":
            self.do_eq(index, step)
        elif _CASE_RE.match(name):
            self.do_case(index, step)
        elif _SOLVE_RE.match(name):
            self.do_solve(index, step)
        elif _VALUE_RE.match(name):
            self.bind_from_payload(index, step)
        elif _CHECK_RE.match(name):
            self.do_check(index, step)
        else:
            self.bind_from_payload(index, step)  # extended operator
        return None

    def do_ans(self, index: int, step: Step) -> Value:
        expr = step.expr
        if isinstance(expr, E.Opaque):
            raise UnevaluableAnswer(f"ANS payload {step.payload!r} is not an expression", index)
        if isinstance(expr, E.Equation):
            values = self.chain_values(index, expr)
            evaluated = [v for v in values if v is not None]
            if not evaluated:
                raise UnevaluableAnswer("no side of the ANS equation is evaluable", index)
            return evaluated[-1]
        return eval_expr(expr, self.env)

    def do_set(self, index: int, step: Step) -> None:
        expr = step.expr
        if isinstance(expr, E.Name):
            self.env.declare(expr.ident)
            return
        if isinstance(expr, E.Equation):
            target = expr.sides[0]
            if isinstance(target, E.Name):
                self.env.declare(target.ident)
                candidates = [self.try_eval(side) for side in expr.sides[1:]]
                values = [v for v in candidates if v is not None]
                if values:
                    self.env.bind(target.ident, values[-1])
                else:
                    self.env.record_equation(expr)
                    self.annotate(index, f"{target.ident} declared without an evaluable value")
                return
            self.env.record_equation(expr)
            return
        if isinstance(expr, E.Opaque):
            self.annotate(index, f"{step.op.name} payload is not an expression")
            return
        # A bare non-name expression declares nothing; keep it as an annotation.
        self.annotate(index, f"{step.op.name} payload is not a declaration")

    def do_def(self, index: int, step: Step) -> None:
        expr = step.expr
        if isinstance(expr, E.Equation):
            head = expr.sides[0]
            if isinstance(head, E.Call) and all(isinstance(a, E.Name) for a in head.args):
                params = tuple(a.ident for a in head.args)
                self.env.define_function(head.func, params, expr.sides[-1])
                return
            if isinstance(head, E.Name):
                value = self.try_eval(expr.sides[-1])
                if value is not None:
                    self.env.bind(head.ident, value)
                else:
                    self.env.declare(head.ident)
                    self.env.record_equation(expr)
                    self.annotate(index, f"definition of {head.ident} is not evaluable")
                return
        self.annotate(index, "DEF payload is not a definition")

    def do_eq(self, index: int, step: Step) -> None:
        expr = step.expr
        if isinstance(expr, E.Equation):
            self.env.record_equation(expr)
            return
        self.annotate(index, "EQ payload is not an equation")

    def do_case(self, index: int, step: Step) -> None:
        self.env.enter_case(step.op.name)
        expr = step.expr
        if isinstance(expr, E.Equation):
            self.env.record_equation(expr)
        elif not isinstance(expr, E.Opaque):
            value = self.try_eval(expr)
            if value is not None:
                self.env.bind(step.op.name, value)
        else:
            self.warn(index, "AnnotationSkipped", "case label payload is opaque")

    def do_check(self, index: int, step: Step) -> None:
        expr = step.expr
        if isinstance(expr, E.Opaque):
            self.annotate(index, f"{step.op.name} payload is not an expression")
            return
        if isinstance(expr, E.Equation):
            values = self.chain_values(index, expr)
            evaluated = [v for v in values if v is not None]
            if len(evaluated) < 2:
                self.annotate(index, f"{step.op.name} equation is not fully evaluable")
            elif not values_equal(evaluated[0], evaluated[-1]):
                self.warn(index, "CheckFailed", E.to_text(expr))
            # A check verifies existing bindings; it only binds fresh names
            # (a COUNT defining a new quantity, say).
            target = expr.sides[0]
            rhs_values = [v for v in values[1:] if v is not None]
            if (
                isinstance(target, E.Name)
                and rhs_values
                and not self.env.is_bound(target.ident)
            ):
                self.env.bind(target.ident, rhs_values[-1])
            return
        value = self.try_eval(expr)
        if value is None:
            self.annotate(index, f"{step.op.name} payload is not evaluable")
        else:
            self.env.bind(step.op.name, value)

    def do_solve(self, index: int, step: Step) -> None:
        expr = step.expr
        stated: tuple[str, list[Value]] | None = None
        if isinstance(expr, E.Equation) and isinstance(expr.sides[0], E.Name):
            candidates = [self.try_eval(side) for side in expr.sides[1:]]
            stated = (expr.sides[0].ident, [v for v in candidates if v is not None])

        equations = self.env.visible_equations()
        if equations:
            solved = _solve_linear(equations[-1], self.env)
            if solved is not None:
                unknown, value = solved
                if stated is not None and stated[1]:
                    if stated[0] != unknown or not values_equal(stated[1][-1], value):
                        self.warn(
                            index,
                            "SolveMismatch",
                            f"stated {stated[0]}, solved {unknown}={value_to_string(value)}",
                        )
                self.env.bind(unknown, value)
                return

        # Checked substitution: verify the stated candidate against every
        # equation in scope that can be evaluated under it.
        if stated is None or not stated[1]:
            if self.mode == "strict":
                raise NonlinearUnsolvable(
                    f"step {index}: no linear equation and no stated candidate", index
                )
            self.annotate(index, "SOLVE without solvable equation or candidate")
            return
        name, values = stated
        candidate = values[-1]
        self.env.push("substitution")
        try:
            self.env.bind(name, candidate)
            for equation in equations:
                sides = [self.try_eval(side) for side in equation.sides]
                evaluated = [v for v in sides if v is not None]
                if len(evaluated) < len(equation.sides):
                    self.warn(index, "EquationSkipped", E.to_text(equation))
                    continue
                for first, second in zip(evaluated, evaluated[1:]):
                    if not values_equal(first, second):
                        raise CandidateRejected(
                            f"candidate {name}={value_to_string(candidate)} violates "
                            f"{E.to_text(equation)}",
                            index,
                        )
        finally:
            self.env.pop()
        self.env.bind(name, candidate)


def execute(trace: MentaleseTrace, mode: ExecMode = "lenient") -> ExecutionResult:
    """Run a trace to its final answer value.

    Deterministic: the result depends only on (trace, mode).
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown mode {mode!r}")
    return _Executor(trace, mode).run()
