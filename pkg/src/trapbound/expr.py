"""Tiny expression language for functions entered as text on the CLI.

Grammar (precedence high to low): ``^`` with a constant exponent, unary
minus, ``*`` ``/``, ``+`` ``-``; same-precedence binary operators associate
left.  Functions: ``exp``, ``log``, ``abs``, ``sqrt``.  One free variable
(default ``x``).  Evaluation reports singularities as errors; the symbolic
differentiator covers the smooth fragment and refuses ``abs``, directing
callers to one-sided finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union


class ParseError(ValueError):
    """Syntax error; carries a 1-based character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class EvalError(ArithmeticError):
    """Singularity or undefined value during evaluation."""


class NonSmoothExpressionError(ValueError):
    """The expression contains abs; use finite-difference derivatives instead."""


class Token(NamedTuple):
    kind: str  # number | identifier | operator | paren
    text: str
    position: int  # 1-based


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # neg | exp | log | abs | sqrt
    arg: "Expression"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / ^
    left: "Expression"
    right: "Expression"


Expression = Union[Const, Var, Unary, Binary]

FUNCTIONS = ("exp", "log", "abs", "sqrt")
_OPERATORS = "+-*/^"


def tokenize(src: str) -> list[Token]:
    tokens = []
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        pos = i + 1
        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            text = src[i:j]
            try:
                float(text)
            except ValueError:
                raise ParseError(f"malformed number {text!r}", pos) from None
            tokens.append(Token("number", text, pos))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(Token("identifier", src[i:j], pos))
            i = j
        elif ch in _OPERATORS:
            tokens.append(Token("operator", ch, pos))
            i += 1
        elif ch in "()":
            tokens.append(Token("paren", ch, pos))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", pos)
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], variable: str, end: int):
        self.tokens = tokens
        self.variable = variable
        self.pos = 0
        self.end = end  # position just past the input, for EOF errors

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end)
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str) -> Token:
        tok = self.next()
        if tok.kind != kind or tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.position)
        return tok

    def parse_sum(self) -> Expression:
        node = self.parse_product()
        while (tok := self.peek()) and tok.kind == "operator" and tok.text in "+-":
            self.next()
            rhs = self.parse_product()
            node = Binary(tok.text, node, rhs)
        return node

    def parse_product(self) -> Expression:
        node = self.parse_unary()
        while (tok := self.peek()) and tok.kind == "operator" and tok.text in "*/":
            self.next()
            rhs = self.parse_unary()
            node = Binary(tok.text, node, rhs)
        return node

    def parse_unary(self) -> Expression:
        tok = self.peek()
        if tok and tok.kind == "operator" and tok.text == "-":
            self.next()
            inner = self.parse_unary()
            # negative literals parse to constants so rendering round-trips
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Unary("neg", inner)
        return self.parse_power()

    def parse_power(self) -> Expression:
        base = self.parse_atom()
        tok = self.peek()
        if tok and tok.kind == "operator" and tok.text == "^":
            self.next()
            exp_tok = self.peek()
            exponent = self.parse_unary()
            folded = _fold(exponent)
            if not isinstance(folded, Const):
                raise ParseError(
                    "exponent must be a constant",
                    exp_tok.position if exp_tok else self.end,
                )
            return Binary("^", base, folded)
        return base

    def parse_atom(self) -> Expression:
        tok = self.next()
        if tok.kind == "number":
            return Const(float(tok.text))
        if tok.kind == "paren" and tok.text == "(":
            inner = self.parse_sum()
            self.expect("paren", ")")
            return inner
        if tok.kind == "identifier":
            nxt = self.peek()
            if nxt and nxt.kind == "paren" and nxt.text == "(":
                if tok.text not in FUNCTIONS:
                    raise ParseError(f"unknown function {tok.text!r}", tok.position)
                self.next()
                arg = self.parse_sum()
                self.expect("paren", ")")
                return Unary(tok.text, arg)
            if tok.text == self.variable:
                return Var(tok.text)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.position)
        raise ParseError(f"unexpected token {tok.text!r}", tok.position)


def parse(src: str, variable: str = "x") -> Expression:
    """Parse ``src`` into an expression tree with one free variable."""
    tokens = tokenize(src)
    if not tokens:
        raise ParseError("empty expression", 1)
    parser = _Parser(tokens, variable, len(src) + 1)
    tree = parser.parse_sum()
    tail = parser.peek()
    if tail is not None:
        raise ParseError(f"trailing input {tail.text!r}", tail.position)
    return tree


def eval_expr(e: Expression, t: float) -> float:
    """Evaluate at ``t``; singularities raise :class:`EvalError` naming the culprit."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return t
    if isinstance(e, Unary):
        v = eval_expr(e.arg, t)
        if e.op == "neg":
            return -v
        if e.op == "exp":
            try:
                return math.exp(v)
            except OverflowError as exc:
                raise EvalError(f"exp overflow in {to_string(e)}") from exc
        if e.op == "log":
            if v <= 0:
                raise EvalError(f"log of nonpositive value {v} in {to_string(e)}")
            return math.log(v)
        if e.op == "abs":
            return abs(v)
        if e.op == "sqrt":
            if v < 0:
                raise EvalError(f"sqrt of negative value {v} in {to_string(e)}")
            return math.sqrt(v)
        raise ValueError(f"unknown unary op {e.op!r}")
    if isinstance(e, Binary):
        lv = eval_expr(e.left, t)
        rv = eval_expr(e.right, t)
        if e.op == "+":
            return lv + rv
        if e.op == "-":
            return lv - rv
        if e.op == "*":
            return lv * rv
        if e.op == "/":
            if rv == 0:
                raise EvalError(f"division by zero in {to_string(e)}")
            return lv / rv
        if e.op == "^":
            if lv == 0 and rv < 0:
                raise EvalError(f"zero raised to negative power in {to_string(e)}")
            if lv < 0 and rv != int(rv):
                raise EvalError(f"negative base with non-integer exponent in {to_string(e)}")
            try:
                return lv ** rv
            except OverflowError as exc:
                raise EvalError(f"overflow in {to_string(e)}") from exc
        raise ValueError(f"unknown binary op {e.op!r}")
    raise TypeError(f"not an expression node: {e!r}")


def _fold(e: Expression) -> Expression:
    """Constant folding; also prunes additive/multiplicative identities."""
    if isinstance(e, Unary):
        arg = _fold(e.arg)
        if isinstance(arg, Const):
            if e.op == "neg":
                return Const(-arg.value)
            try:
                return Const(eval_expr(Unary(e.op, arg), 0.0))
            except EvalError:
                pass
        return Unary(e.op, arg)
    if isinstance(e, Binary):
        left = _fold(e.left)
        right = _fold(e.right)
        if isinstance(left, Const) and isinstance(right, Const):
            try:
                return Const(eval_expr(Binary(e.op, left, right), 0.0))
            except EvalError:
                pass
        if e.op == "+":
            if isinstance(left, Const) and left.value == 0:
                return right
            if isinstance(right, Const) and right.value == 0:
                return left
        if e.op == "-" and isinstance(right, Const) and right.value == 0:
            return left
        if e.op == "*":
            for side, other in ((left, right), (right, left)):
                if isinstance(side, Const):
                    if side.value == 0:
                        return Const(0.0)
                    if side.value == 1:
                        return other
        if e.op == "^" and isinstance(right, Const):
            if right.value == 1:
                return left
            if right.value == 0:
                return Const(1.0)
        return Binary(e.op, left, right)
    return e


def derivative_expr(e: Expression) -> Expression:
    """Symbolic derivative of the smooth fragment (constant-folded).

    ``abs`` anywhere in the tree raises :class:`NonSmoothExpressionError`;
    callers should fall back to one-sided finite differences there.
    """
    return _fold(_derivative(e))


def _derivative(e: Expression) -> Expression:
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0)
    if isinstance(e, Unary):
        if e.op == "abs":
            raise NonSmoothExpressionError(
                f"cannot differentiate {to_string(e)}: abs is not smooth; "
                "use finite-difference one-sided derivatives"
            )
        du = _derivative(e.arg)
        if e.op == "neg":
            return Unary("neg", du)
        if e.op == "exp":
            return Binary("*", Unary("exp", e.arg), du)
        if e.op == "log":
            return Binary("/", du, e.arg)
        if e.op == "sqrt":
            return Binary("/", du, Binary("*", Const(2.0), Unary("sqrt", e.arg)))
        raise ValueError(f"unknown unary op {e.op!r}")
    if isinstance(e, Binary):
        dl = _derivative(e.left)
        dr = _derivative(e.right)
        if e.op in "+-":
            return Binary(e.op, dl, dr)
        if e.op == "*":
            return Binary("+", Binary("*", dl, e.right), Binary("*", e.left, dr))
        if e.op == "/":
            num = Binary("-", Binary("*", dl, e.right), Binary("*", e.left, dr))
            return Binary("/", num, Binary("^", e.right, Const(2.0)))
        if e.op == "^":
            assert isinstance(e.right, Const), "parser guarantees constant exponents"
            c = e.right.value
            return Binary(
                "*",
                Binary("*", Const(c), Binary("^", e.left, Const(c - 1.0))),
                dl,
            )
        raise ValueError(f"unknown binary op {e.op!r}")
    raise TypeError(f"not an expression node: {e!r}")


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _format_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_string(e: Expression) -> str:
    """Render so that ``parse(to_string(e))`` is structurally equal to ``e``."""
    return _render(e, 0)


def _render(e: Expression, parent_prec: int) -> str:
    if isinstance(e, Const):
        text = _format_number(e.value)
        if e.value < 0 and parent_prec > 0:
            return f"({text})"
        return text
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            inner = _render(e.arg, _PRECEDENCE["neg"])
            text = f"-{inner}"
            return f"({text})" if parent_prec > _PRECEDENCE["neg"] else text
        return f"{e.op}({_render(e.arg, 0)})"
    if isinstance(e, Binary):
        prec = _PRECEDENCE[e.op]
        # left associative: right child of same precedence needs parens
        left = _render(e.left, prec)
        right = _render(e.right, prec + 1)
        text = f"{left} {e.op} {right}" if e.op != "^" else f"{left}^{right}"
        return f"({text})" if parent_prec > prec else text
    raise TypeError(f"not an expression node: {e!r}")


def to_convex_function(src: str, interval, variable: str = "x"):
    """Build a :class:`trapbound.funcs.ConvexFunction` from expression text.

    Smooth expressions get an exact derivative oracle from
    :func:`derivative_expr`; expressions containing ``abs`` fall back to
    one-sided finite-difference oracles (power-of-two steps, so simple kinks
    like ``abs(x - 0.5)`` come out exact).  Convexity is NOT inferred here;
    callers should run :func:`trapbound.funcs.check_convexity`.
    """
    from .funcs import ConvexFunction, finite_difference_derivative

    tree = parse(src, variable)
    evaluate = lambda t: eval_expr(tree, t)

    try:
        dtree = derivative_expr(tree)
    except NonSmoothExpressionError:
        dtree = None

    if dtree is not None:
        deriv = lambda t: eval_expr(dtree, t)
        return ConvexFunction(interval, evaluate, deriv, deriv, src)

    h0 = interval.width / 8.0
    levels = 28  # final step ~ width * 5e-10

    def dplus(t: float) -> float:
        h = min(h0, interval.b - t)
        return finite_difference_derivative(evaluate, t, "right", h, levels).value

    def dminus(t: float) -> float:
        h = min(h0, t - interval.a)
        return finite_difference_derivative(evaluate, t, "left", h, levels).value

    return ConvexFunction(interval, evaluate, dplus, dminus, src)
