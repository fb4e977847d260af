"""Scalar expressions for problem data: a small recursive-descent parser and evaluator.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | NAME | NAME '(' args ')' | '(' expr ')'

Evaluation accepts floats or numpy arrays for the variables and is vectorized.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

F_VARS = frozenset({"t", "x", "y"})
DELAY_VARS = frozenset({"t"})

FUNCTIONS = {
    "abs": 1,
    "sqrt": 1,
    "cbrt": 1,
    "exp": 1,
    "ln": 1,
    "sin": 1,
    "cos": 1,
    "atan": 1,
    "min": 2,
    "max": 2,
    "pow": 2,
}


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, position: int, source: str):
        self.message = message
        self.position = position
        self.source = source
        super().__init__(f"{message} at position {position} in {source!r}")


class UnknownIdentifierError(ExprSyntaxError):
    pass


class ArityError(ExprSyntaxError):
    pass


class ExprDomainError(ExprError):
    """An argument left a function's real domain.

    ``index`` is the flat position of the first offending element when the
    expression was evaluated on arrays, else None.
    """

    def __init__(self, message: str, index: int | None = None):
        self.message = message
        self.index = index
        super().__init__(message if index is None else f"{message} (element {index})")


# ---------------------------------------------------------------- tree nodes


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]


Expr = Union[Num, Var, Neg, BinOp, Call]


# ------------------------------------------------------------------- lexing

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos, source)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(_Token("end", "", n))
    return tokens


# ------------------------------------------------------------------ parsing


class _Parser:
    def __init__(self, source: str, allowed_vars):
        self.source = source
        self.allowed = frozenset(allowed_vars)
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None, cls=ExprSyntaxError):
        tok = tok or self.tok
        return cls(message, tok.pos, self.source)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if self.tok.kind == "op" and self.tok.text == "(":
                return self.call(tok)
            if tok.text in FUNCTIONS:
                raise self.error(f"function {tok.text!r} needs arguments", tok, ArityError)
            if tok.text not in self.allowed:
                allowed = ", ".join(sorted(self.allowed)) or "none"
                raise self.error(
                    f"unknown identifier {tok.text!r} (allowed variables: {allowed})",
                    tok,
                    UnknownIdentifierError,
                )
            return Var(tok.text)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise self.error(f"expected a number, variable, function or '(', found {found!r}")

    def call(self, name: _Token) -> Expr:
        if name.text not in FUNCTIONS:
            raise self.error(
                f"unknown function {name.text!r}", name, UnknownIdentifierError
            )
        self.expect("(")
        args = [self.expr()]
        while self.accept(","):
            args.append(self.expr())
        self.expect(")")
        arity = FUNCTIONS[name.text]
        if len(args) != arity:
            raise self.error(
                f"{name.text} takes {arity} argument(s), got {len(args)}", name, ArityError
            )
        return Call(name.text, tuple(args))


def parse(source: str, allowed_vars=F_VARS) -> Expr:
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0, source or "")
    return _Parser(source, allowed_vars).parse()


def variables(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    return frozenset().union(*(variables(a) for a in e.args))


# ----------------------------------------------------------------- printing


def to_source(e: Expr) -> str:
    """Render ``e`` so that ``parse(to_source(e))`` rebuilds the same tree."""
    if isinstance(e, Num):
        if e.value < 0 or not math.isfinite(e.value):
            raise ExprError(f"cannot print literal {e.value!r}")
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    return f"{e.func}({', '.join(to_source(a) for a in e.args)})"


# --------------------------------------------------------------- evaluation


def _first_bad(mask) -> int | None:
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return None
    return int(np.flatnonzero(mask.ravel())[0])


def _domain(cond, message: str) -> None:
    """Raise if any element of ``cond`` is true."""
    if np.any(cond):
        raise ExprDomainError(message, _first_bad(cond))


def _power(base, expo):
    base = np.asarray(base, dtype=float)
    expo = np.asarray(expo, dtype=float)
    base, expo = np.broadcast_arrays(base, expo)
    _domain((base < 0) & (expo != np.floor(expo)), "negative base with non-integer exponent")
    _domain((base == 0) & (expo < 0), "zero raised to a negative power")
    with np.errstate(over="ignore"):
        return np.power(base, expo)


def _unary(name: str, a):
    if name == "abs":
        return np.abs(a)
    if name == "sqrt":
        _domain(np.asarray(a) < 0, "sqrt of a negative number")
        return np.sqrt(a)
    if name == "cbrt":
        return np.cbrt(a)
    if name == "exp":
        with np.errstate(over="ignore"):
            return np.exp(a)
    if name == "ln":
        _domain(np.asarray(a) <= 0, "ln of a nonpositive number")
        return np.log(a)
    if name == "sin":
        return np.sin(a)
    if name == "cos":
        return np.cos(a)
    if name == "atan":
        return np.arctan(a)
    raise ExprError(f"unknown function {name!r}")


def _eval(e: Expr, env: Mapping):
    if isinstance(e, Num):
        return np.float64(e.value)
    if isinstance(e, Var):
        try:
            return np.asarray(env[e.name], dtype=float)
        except KeyError:
            raise ExprError(f"no value bound for variable {e.name!r}") from None
    if isinstance(e, Neg):
        return -_eval(e.operand, env)
    if isinstance(e, BinOp):
        a = _eval(e.left, env)
        b = _eval(e.right, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            _domain(np.asarray(b) == 0, "division by zero")
            return a / b
        return _power(a, b)
    args = [_eval(a, env) for a in e.args]
    if e.func == "min":
        return np.minimum(*args)
    if e.func == "max":
        return np.maximum(*args)
    if e.func == "pow":
        return _power(*args)
    return _unary(e.func, args[0])


def evaluate(e: Expr, env: Mapping):
    """Evaluate ``e``; returns a float for scalar bindings, else an array.

    Results that overflow to inf are reported as domain errors.
    """
    with np.errstate(invalid="ignore", divide="ignore"):
        out = _eval(e, env)
    out = np.asarray(out, dtype=float)
    _domain(~np.isfinite(out), "result is not finite")
    if out.ndim == 0:
        return float(out)
    return out
