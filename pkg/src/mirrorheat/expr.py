"""Tiny expression language for problem data.

Problem data (initial and final profiles) enter as strings in a small
univariate language: floating literals, ``x``, ``pi``, ``+ - * / ^``,
unary minus, and ``sin cos exp sinh cosh``.  Expressions parse to an
immutable AST that supports exact symbolic differentiation (the solver
needs third derivatives), argument reflection ``x -> -x``, and both
scalar and vectorised evaluation.

Grammar (left associative; unary minus binds tighter than ``^``, so
``-x^2`` means ``(-x)^2``; exponents are integer literals)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := signed ('^' '-'? INT)?
    signed := '-' signed | atom
    atom   := NUMBER | 'x' | 'pi' | NAME '(' expr ')' | '(' expr ')'

Construction folds literal arithmetic (``pi`` becomes its IEEE double,
``2*3`` becomes ``6``) but performs no other algebraic simplification.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expr", "Const", "Var", "Add", "Sub", "Mul", "Div", "Pow", "Neg", "Call",
    "ExprError", "ParseError", "EvalError",
    "parse", "evaluate", "sample", "differentiate", "reflect", "to_source",
    "X",
]


class ExprError(ValueError):
    """Base class for expression language errors."""


class ParseError(ExprError):
    """Syntax or lexical error; carries the character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class EvalError(ExprError):
    """Evaluation failure such as division by zero."""


class Expr:
    """Base class for AST nodes.  Nodes are frozen and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_source(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr


X = Var()

_FUNCS = ("sin", "cos", "exp", "sinh", "cosh")

_MATH_FUNCS = {
    "sin": math.sin, "cos": math.cos, "exp": math.exp,
    "sinh": math.sinh, "cosh": math.cosh,
}
_NP_FUNCS = {
    "sin": np.sin, "cos": np.cos, "exp": np.exp,
    "sinh": np.sinh, "cosh": np.cosh,
}


# ---------------------------------------------------------------------------
# folding constructors (literal arithmetic only)

def _const(v: float) -> Const:
    return Const(float(v))


def _add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value + b.value)
    if isinstance(a, Const) and a.value == 0.0:
        return b
    if isinstance(b, Const) and b.value == 0.0:
        return a
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value - b.value)
    if isinstance(b, Const) and b.value == 0.0:
        return a
    if isinstance(a, Const) and a.value == 0.0:
        return _neg(b)
    return Sub(a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value * b.value)
    if isinstance(a, Const):
        if a.value == 0.0:
            return _const(0.0)
        if a.value == 1.0:
            return b
    if isinstance(b, Const):
        if b.value == 0.0:
            return _const(0.0)
        if b.value == 1.0:
            return a
    return Mul(a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return _const(a.value / b.value)
    if isinstance(b, Const) and b.value == 1.0:
        return a
    return Div(a, b)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return _const(-a.value)
    return Neg(a)


def _pow(base: Expr, exponent: int) -> Expr:
    if exponent == 0:
        return _const(1.0)
    if exponent == 1:
        return base
    if isinstance(base, Const) and not (base.value == 0.0 and exponent < 0):
        return _const(base.value ** exponent)
    return Pow(base, exponent)


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str   # "num" | "name" | "op" | "end"
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(source)
    while i < n:
        m = _TOKEN_RE.match(source, i)
        if m is None:
            stripped = source[i:].lstrip()
            if not stripped:
                break
            bad = n - len(stripped)
            raise ParseError(f"unexpected character {source[bad]!r}", bad)
        i = m.end()
        for kind in ("num", "name", "op"):
            text = m.group(kind)
            if text is not None:
                tokens.append(_Token(kind, text, m.start(kind)))
                break
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        tok = self.next()
        if tok.kind != "op" or tok.text != op:
            shown = tok.text if tok.kind != "end" else "end of input"
            raise ParseError(f"expected {op!r}, found {shown!r}", tok.pos)

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            rhs = self.term()
            e = _add(e, rhs) if op == "+" else _sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next().text
            rhs = self.factor()
            e = _mul(e, rhs) if op == "*" else _div(e, rhs)
        return e

    def factor(self) -> Expr:
        base = self.signed()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.next()
            return _pow(base, self.exponent())
        return base

    def signed(self) -> Expr:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.next()
            return _neg(self.signed())
        return self.atom()

    def exponent(self) -> int:
        sign = 1
        if self.peek().kind == "op" and self.peek().text == "-":
            self.next()
            sign = -1
        tok = self.next()
        if tok.kind != "num" or not tok.text.isdigit():
            shown = tok.text if tok.kind != "end" else "end of input"
            raise ParseError(
                f"exponent must be an integer literal, found {shown!r}", tok.pos)
        return sign * int(tok.text)

    def atom(self) -> Expr:
        tok = self.next()
        if tok.kind == "num":
            return _const(float(tok.text))
        if tok.kind == "name":
            if tok.text == "x":
                return X
            if tok.text == "pi":
                return _const(math.pi)
            if tok.text in _FUNCS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(tok.text, arg)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        shown = tok.text if tok.kind != "end" else "end of input"
        raise ParseError(f"expected a value, found {shown!r}", tok.pos)


def parse(source: str) -> Expr:
    """Parse ``source`` into an AST, raising :class:`ParseError` on bad input."""
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# evaluation

def evaluate(e: Expr, x: float) -> float:
    """Evaluate at a scalar point.

    Division by zero and ``0^negative`` raise :class:`EvalError`; overflow
    propagates as an appropriately signed infinity.
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return float(x)
    if isinstance(e, Add):
        return evaluate(e.left, x) + evaluate(e.right, x)
    if isinstance(e, Sub):
        return evaluate(e.left, x) - evaluate(e.right, x)
    if isinstance(e, Mul):
        return evaluate(e.left, x) * evaluate(e.right, x)
    if isinstance(e, Div):
        num = evaluate(e.left, x)
        den = evaluate(e.right, x)
        if den == 0.0:
            raise EvalError(f"division by zero at x={x!r}")
        return num / den
    if isinstance(e, Pow):
        base = evaluate(e.base, x)
        if base == 0.0 and e.exponent < 0:
            raise EvalError(f"zero raised to negative power at x={x!r}")
        try:
            return base ** e.exponent
        except OverflowError:
            sign = -1.0 if (base < 0.0 and e.exponent % 2 == 1) else 1.0
            return sign * math.inf
    if isinstance(e, Neg):
        return -evaluate(e.operand, x)
    if isinstance(e, Call):
        arg = evaluate(e.arg, x)
        try:
            return _MATH_FUNCS[e.func](arg)
        except OverflowError:
            if e.func == "sinh":
                return math.copysign(math.inf, arg)
            return math.inf
    raise TypeError(f"not an Expr node: {e!r}")


def sample(e: Expr, xs: np.ndarray) -> np.ndarray:
    """Vectorised evaluation over an array of points.

    Non-finite results are returned as-is (inf/nan); callers that integrate
    sampled values are responsible for flagging them.
    """
    xs = np.asarray(xs, dtype=float)
    with np.errstate(all="ignore"):
        return np.asarray(_sample(e, xs), dtype=float)


def _sample(e: Expr, xs: np.ndarray):
    if isinstance(e, Const):
        return np.full(xs.shape, e.value)
    if isinstance(e, Var):
        return xs
    if isinstance(e, Add):
        return _sample(e.left, xs) + _sample(e.right, xs)
    if isinstance(e, Sub):
        return _sample(e.left, xs) - _sample(e.right, xs)
    if isinstance(e, Mul):
        return _sample(e.left, xs) * _sample(e.right, xs)
    if isinstance(e, Div):
        return _sample(e.left, xs) / _sample(e.right, xs)
    if isinstance(e, Pow):
        return _sample(e.base, xs) ** e.exponent
    if isinstance(e, Neg):
        return -_sample(e.operand, xs)
    if isinstance(e, Call):
        return _NP_FUNCS[e.func](_sample(e.arg, xs))
    raise TypeError(f"not an Expr node: {e!r}")


# ---------------------------------------------------------------------------
# calculus

def _d(e: Expr) -> Expr:
    if isinstance(e, Const):
        return _const(0.0)
    if isinstance(e, Var):
        return _const(1.0)
    if isinstance(e, Add):
        return _add(_d(e.left), _d(e.right))
    if isinstance(e, Sub):
        return _sub(_d(e.left), _d(e.right))
    if isinstance(e, Mul):
        return _add(_mul(_d(e.left), e.right), _mul(e.left, _d(e.right)))
    if isinstance(e, Div):
        num = _sub(_mul(_d(e.left), e.right), _mul(e.left, _d(e.right)))
        return _div(num, _pow(e.right, 2))
    if isinstance(e, Pow):
        inner = _mul(_const(e.exponent), _pow(e.base, e.exponent - 1))
        return _mul(inner, _d(e.base))
    if isinstance(e, Neg):
        return _neg(_d(e.operand))
    if isinstance(e, Call):
        outer = {
            "sin": lambda a: Call("cos", a),
            "cos": lambda a: _neg(Call("sin", a)),
            "exp": lambda a: Call("exp", a),
            "sinh": lambda a: Call("cosh", a),
            "cosh": lambda a: Call("sinh", a),
        }[e.func](e.arg)
        return _mul(outer, _d(e.arg))
    raise TypeError(f"not an Expr node: {e!r}")


def differentiate(e: Expr, order: int = 1) -> Expr:
    """Exact derivative of the given order (order 0 returns ``e``)."""
    if not isinstance(order, int) or order < 0:
        raise ValueError(f"derivative order must be a nonnegative integer, got {order!r}")
    for _ in range(order):
        e = _d(e)
    return e


def reflect(e: Expr) -> Expr:
    """The expression ``x -> e(-x)``."""
    if isinstance(e, (Const,)):
        return e
    if isinstance(e, Var):
        return Neg(X)
    if isinstance(e, Add):
        return Add(reflect(e.left), reflect(e.right))
    if isinstance(e, Sub):
        return Sub(reflect(e.left), reflect(e.right))
    if isinstance(e, Mul):
        return Mul(reflect(e.left), reflect(e.right))
    if isinstance(e, Div):
        return Div(reflect(e.left), reflect(e.right))
    if isinstance(e, Pow):
        return Pow(reflect(e.base), e.exponent)
    if isinstance(e, Neg):
        return Neg(reflect(e.operand))
    if isinstance(e, Call):
        return Call(e.func, reflect(e.arg))
    raise TypeError(f"not an Expr node: {e!r}")


# ---------------------------------------------------------------------------
# printing

_LEVEL_ADD = 1
_LEVEL_MUL = 2
_LEVEL_NEG = 3
_LEVEL_POW = 4
_LEVEL_ATOM = 9


def _level(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return _LEVEL_ADD
    if isinstance(e, (Mul, Div)):
        return _LEVEL_MUL
    if isinstance(e, Neg):
        return _LEVEL_NEG
    if isinstance(e, Const) and (e.value < 0.0 or math.copysign(1.0, e.value) < 0):
        return _LEVEL_NEG
    if isinstance(e, Pow):
        return _LEVEL_POW
    return _LEVEL_ATOM


def _emit(e: Expr, min_level: int) -> str:
    text = _emit_node(e)
    if _level(e) < min_level:
        return f"({text})"
    return text


def _emit_node(e: Expr) -> str:
    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Add):
        return f"{_emit(e.left, _LEVEL_ADD)} + {_emit(e.right, _LEVEL_ADD + 1)}"
    if isinstance(e, Sub):
        return f"{_emit(e.left, _LEVEL_ADD)} - {_emit(e.right, _LEVEL_ADD + 1)}"
    if isinstance(e, Mul):
        return f"{_emit(e.left, _LEVEL_MUL)} * {_emit(e.right, _LEVEL_MUL + 1)}"
    if isinstance(e, Div):
        return f"{_emit(e.left, _LEVEL_MUL)} / {_emit(e.right, _LEVEL_MUL + 1)}"
    if isinstance(e, Neg):
        # the operand of a printed unary minus must reparse as `signed`
        inner = e.operand
        if isinstance(inner, (Neg, Var, Call)):
            return f"-{_emit_node(inner)}"
        if isinstance(inner, Const) and _level(inner) == _LEVEL_ATOM:
            return f"-{_emit_node(inner)}"
        return f"-({_emit_node(inner)})"
    if isinstance(e, Pow):
        base = e.base
        if isinstance(base, (Var, Call, Neg)) or (
                isinstance(base, Const) and _level(base) == _LEVEL_ATOM):
            base_text = _emit_node(base)
        else:
            base_text = f"({_emit_node(base)})"
        return f"{base_text}^{e.exponent}"
    if isinstance(e, Call):
        return f"{e.func}({_emit_node(e.arg)})"
    raise TypeError(f"not an Expr node: {e!r}")


def to_source(e: Expr) -> str:
    """Render the AST back to parseable source (``parse(to_source(e))``
    evaluates identically to ``e``)."""
    return _emit_node(e)
