"""Symbolic expression AST, LaTeX-tolerant parser, and canonical printer.

Trace payloads mix plain ASCII math with LaTeX fragments (``\\frac{1}{2}``,
``$10x + 6$``, ``\\sqrt{2}``, ``a^{2}``).  Everything is normalized to a
plain-text form first, then parsed with a small recursive-descent parser
into an immutable AST.  Printing an AST yields a compact canonical form
that reparses to a structurally identical tree.

Precedence, tightest first: ``^``, unary ``-``, ``*``/``/`` (including
implicit multiplication such as ``5x`` or ``a(x+1)``), ``+``/``-``, ``=``.
Named infix symbols (``\\otimes`` and friends) bind like multiplication.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

__all__ = [
    "Expr",
    "Integer",
    "DecimalLit",
    "Name",
    "Call",
    "BinOp",
    "Neg",
    "Equation",
    "Opaque",
    "ExprParseError",
    "BUILTIN_FUNCTIONS",
    "latex_to_plain",
    "parse_expression",
    "to_text",
    "iter_names",
]


@dataclass(frozen=True)
class Integer:
    value: int


@dataclass(frozen=True)
class DecimalLit:
    """A decimal literal; the lexeme is kept verbatim so printing round-trips."""

    lexeme: str

    @property
    def value(self) -> float:
        return float(self.lexeme)


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Equation:
    """A chain of one or more ``=`` signs: ``sides[0] = sides[1] = ...``."""

    sides: tuple["Expr", ...]

    def __post_init__(self) -> None:
        if len(self.sides) < 2:
            raise ValueError("an equation needs at least two sides")


@dataclass(frozen=True)
class Opaque:
    """Payload text that did not parse; retained verbatim."""

    text: str


Expr = Union[Integer, DecimalLit, Name, Call, BinOp, Neg, Equation, Opaque]


class ExprParseError(ValueError):
    """Raised when a payload cannot be read as an expression."""


#: Functions the parser always treats as callable heads.
BUILTIN_FUNCTIONS = frozenset({"abs", "sqrt"})

# Named operator symbols: normalized to a single char so the lexer can tell
# them apart from ordinary identifiers, then given an ASCII spelling.
_SYMBOL_NAMES = {"⊗": "otimes", "⊕": "oplus", "∘": "circ", "⋆": "star"}

_COMMAND_SYMBOLS = {
    "otimes": "⊗",
    "oplus": "⊕",
    "circ": "∘",
    "star": "⋆",
    "cdot": "*",
    "times": "*",
    "div": "/",
    "deg": " deg ",
}

_SPACING_COMMANDS = ("\\,", "\\;", "\\:", "\\!", "\\quad", "\\qquad", "\\ ")

_SUPERSCRIPTS = {"⁰": "0", "¹": "1", "²": "2", "³": "3", "⁴": "4",
                 "⁵": "5", "⁶": "6", "⁷": "7", "⁸": "8", "⁹": "9"}


def _match_group(text: str, start: int) -> tuple[str, int] | None:
    """Return (content, index-after) for a brace group starting at ``start``."""
    if start >= len(text) or text[start] != "{":
        return None
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                return text[start + 1:i], i + 1
    return None


def _match_paren_group(text: str, start: int) -> tuple[str, int] | None:
    if start >= len(text) or text[start] != "(":
        return None
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "(":
            depth += 1
        elif text[i] == ")":
            depth -= 1
            if depth == 0:
                return text[start:i + 1], i + 1
    return None


def _rewrite_command(text: str, command: str, fmt) -> str:
    """Repeatedly rewrite ``command{...}`` (brace-matched) using ``fmt``."""
    while True:
        pos = text.find(command)
        if pos < 0:
            return text
        scan = pos + len(command)
        while scan < len(text) and text[scan].isspace():
            scan += 1
        group = _match_group(text, scan)
        if group is not None:
            content, after = group
            text = text[:pos] + fmt(content) + text[after:]
            continue
        parens = _match_paren_group(text, scan)
        if parens is not None:
            content, after = parens
            text = text[:pos] + fmt(content) + text[after:]
            continue
        if scan < len(text) and text[scan].isalnum():
            # Single-token form, e.g. \sqrt2.
            end = scan + 1
            while end < len(text) and text[end].isalnum() and text[scan].isdigit() == text[end].isdigit():
                end += 1
            text = text[:pos] + fmt(text[scan:end]) + text[end:]
            continue
        return text[:pos] + text[scan:]


def _rewrite_frac(text: str) -> str:
    for cmd in ("\\dfrac", "\\tfrac", "\\frac"):
        while True:
            pos = text.find(cmd)
            if pos < 0:
                break
            scan = pos + len(cmd)
            while scan < len(text) and text[scan].isspace():
                scan += 1
            num = _match_group(text, scan)
            if num is None:
                break
            scan = num[1]
            while scan < len(text) and text[scan].isspace():
                scan += 1
            den = _match_group(text, scan)
            if den is None:
                break
            text = text[:pos] + f"(({num[0]})/({den[0]}))" + text[den[1]:]
    return text


def latex_to_plain(text: str) -> str:
    """Normalize LaTeX decorations down to plain math text.

    Unknown ``\\commands`` are left in place; the lexer will then reject the
    payload, which is how constructs we cannot interpret (``\\pm``,
    ``\\ldots``) end up opaque instead of silently misread.
    """
    s = text
    s = s.replace("\\\\", " ")
    for marker in ("$", "\\(", "\\)", "\\[", "\\]"):
        s = s.replace(marker, " ")
    for cmd in _SPACING_COMMANDS:
        s = s.replace(cmd, " ")
    s = s.replace("\\left", "").replace("\\right", "")
    s = _rewrite_command(s, "\\boxed", lambda inner: inner)
    for cmd in ("\\text", "\\mathrm", "\\operatorname"):
        s = _rewrite_command(s, cmd, lambda inner: f" {inner} ")
    s = _rewrite_frac(s)
    s = _rewrite_command(s, "\\sqrt", lambda inner: f" sqrt({inner})")
    s = _rewrite_command(s, "√", lambda inner: f" sqrt({inner})")
    for command, repl in _COMMAND_SYMBOLS.items():
        s = s.replace("\\" + command, f" {repl} ")
    for ch, digit in _SUPERSCRIPTS.items():
        s = s.replace(ch, f"^{digit}")
    for ch, repl in (("−", "-"), ("–", "-"), ("—", "-"), ("×", "*"),
                     ("⋅", "*"), ("·", "*"), ("÷", "/")):
        s = s.replace(ch, repl)
    # Remaining braces are plain LaTeX grouping.
    s = s.replace("{", "(").replace("}", ")")
    return s.strip()


# --- lexer -----------------------------------------------------------------

_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?|\.\d+")
_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_ONE_CHAR_TOKENS = "+-*/^(),="


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | symbol | op
    text: str


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < len(text) and text[i + 1].isdigit()):
            m = _NUMBER_RE.match(text, i)
            assert m is not None
            tokens.append(_Token("number", m.group()))
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m is not None:
            tokens.append(_Token("ident", m.group()))
            i = m.end()
            continue
        if ch in _SYMBOL_NAMES:
            tokens.append(_Token("symbol", _SYMBOL_NAMES[ch]))
            i += 1
            continue
        if ch in _ONE_CHAR_TOKENS:
            tokens.append(_Token("op", ch))
            i += 1
            continue
        raise ExprParseError(f"unexpected character {ch!r} at offset {i}")
    return tokens


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token], known_funcs: frozenset[str]):
        self.tokens = tokens
        self.pos = 0
        self.known_funcs = known_funcs

    def peek(self, ahead: int = 0) -> _Token | None:
        idx = self.pos + ahead
        return self.tokens[idx] if idx < len(self.tokens) else None

    def take(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ExprParseError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, text: str) -> None:
        tok = self.take()
        if tok.text != text:
            raise ExprParseError(f"expected {text!r}, found {tok.text!r}")

    def parse_equation(self) -> Expr:
        sides = [self.parse_sum()]
        while (tok := self.peek()) is not None and tok.text == "=":
            self.take()
            sides.append(self.parse_sum())
        if len(sides) == 1:
            return sides[0]
        return Equation(tuple(sides))

    def parse_sum(self) -> Expr:
        node = self.parse_term()
        while (tok := self.peek()) is not None and tok.text in ("+", "-"):
            self.take()
            node = BinOp(tok.text, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while True:
            tok = self.peek()
            if tok is None:
                return node
            if tok.text in ("*", "/"):
                self.take()
                node = BinOp(tok.text, node, self.parse_unary())
            elif tok.kind == "symbol":
                # Named infix operator, e.g. "1 ⊗ 2".
                self.take()
                node = Call(tok.text, (node, self.parse_unary()))
            elif tok.kind == "ident" or tok.text == "(":
                # Implicit multiplication: 5x, 3(n+1), a(x)^2, 4a sqrt(2).
                node = BinOp("*", node, self.parse_power())
            else:
                return node

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok.text == "-":
            self.take()
            return Neg(self.parse_unary())
        if tok is not None and tok.text == "+":
            self.take()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        tok = self.peek()
        if tok is not None and tok.text == "^":
            self.take()
            return BinOp("^", base, self.parse_exponent())
        return base

    def parse_exponent(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok.text == "-":
            self.take()
            return Neg(self.parse_exponent())
        return self.parse_power()

    def parse_atom(self) -> Expr:
        tok = self.take()
        if tok.kind == "number":
            if "." in tok.text:
                return DecimalLit(tok.text)
            return Integer(int(tok.text))
        if tok.kind == "symbol":
            if (nxt := self.peek()) is not None and nxt.text == "(":
                return self.parse_call(tok.text)
            return Name(tok.text)
        if tok.kind == "ident":
            nxt = self.peek()
            if nxt is not None and nxt.text == "(":
                if tok.text in self.known_funcs or self._paren_has_comma():
                    return self.parse_call(tok.text)
            return Name(tok.text)
        if tok.text == "(":
            inner = self.parse_sum()
            self.expect(")")
            return inner
        raise ExprParseError(f"unexpected token {tok.text!r}")

    def _paren_has_comma(self) -> bool:
        """Look ahead from a '(' for a comma at depth one (an argument list)."""
        depth = 0
        for idx in range(self.pos, len(self.tokens)):
            text = self.tokens[idx].text
            if text == "(":
                depth += 1
            elif text == ")":
                depth -= 1
                if depth == 0:
                    return False
            elif text == "," and depth == 1:
                return True
        return False

    def parse_call(self, func: str) -> Expr:
        self.expect("(")
        args = [self.parse_sum()]
        while (tok := self.peek()) is not None and tok.text == ",":
            self.take()
            args.append(self.parse_sum())
        self.expect(")")
        return Call(func, tuple(args))


def parse_expression(text: str, known_funcs: Iterable[str] = ()) -> Expr:
    """Parse one payload into an expression AST.

    ``known_funcs`` extends the builtin callables; a bare identifier in
    front of parentheses is a call only when known (or when the parentheses
    hold a comma-separated argument list), otherwise it is an implicit
    product like ``a(2a - 1)``.

    Raises ExprParseError when the text cannot be read.
    """
    plain = latex_to_plain(text)
    tokens = _tokenize(plain)
    if not tokens:
        raise ExprParseError("empty expression")
    parser = _Parser(tokens, BUILTIN_FUNCTIONS | frozenset(known_funcs))
    node = parser.parse_equation()
    if parser.pos != len(tokens):
        leftover = tokens[parser.pos].text
        raise ExprParseError(f"trailing input starting at {leftover!r}")
    return node


# --- printing ---------------------------------------------------------------

_PREC = {"=": 0, "+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _print(node: Expr, parent_prec: int, right_side: bool = False) -> str:
    if isinstance(node, Integer):
        return str(node.value)
    if isinstance(node, DecimalLit):
        return node.lexeme
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, Call):
        return f"{node.func}({','.join(_print(a, 0) for a in node.args)})"
    if isinstance(node, Neg):
        inner = _print(node.operand, _PREC["neg"])
        text = f"-{inner}"
        needs = parent_prec > _PREC["neg"] or (parent_prec == _PREC["neg"] and right_side)
        return f"({text})" if needs else text
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        left = _print(node.left, prec if node.op != "^" else prec + 1)
        # Left-associative chains reparse without parens; the right operand
        # needs them at equal precedence ("a-(b-c)", "a/(b/c)").
        right = _print(node.right, prec + (0 if node.op == "^" else 1), right_side=True)
        text = f"{left}{node.op}{right}"
        return f"({text})" if parent_prec > prec else text
    if isinstance(node, Equation):
        return "=".join(_print(side, 1) for side in node.sides)
    if isinstance(node, Opaque):
        return node.text
    raise TypeError(f"not an expression node: {node!r}")


def to_text(node: Expr) -> str:
    """Canonical compact rendering; reparsing yields a structurally equal AST."""
    return _print(node, 0)


def iter_names(node: Expr) -> Iterator[str]:
    """Yield every identifier occurring in ``node`` (not call heads)."""
    if isinstance(node, Name):
        yield node.ident
    elif isinstance(node, Call):
        for arg in node.args:
            yield from iter_names(arg)
    elif isinstance(node, BinOp):
        yield from iter_names(node.left)
        yield from iter_names(node.right)
    elif isinstance(node, Neg):
        yield from iter_names(node.operand)
    elif isinstance(node, Equation):
        for side in node.sides:
            yield from iter_names(side)
