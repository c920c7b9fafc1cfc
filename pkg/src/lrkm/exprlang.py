"""Arithmetic expressions for coefficient functions and right-hand sides.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")"

Variables are ``xi``, ``z`` and ``zp``; constants ``pi`` and ``e``; functions
``sin cos tan exp ln sqrt abs gamma``. There is no implicit multiplication.
Evaluation happens in the working precision and raises :class:`EvalError`
instead of returning non-finite values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from lrkm import fracops
from lrkm._precision import REAL
from lrkm.errors import DomainError, LrkmError

VARIABLES = ("xi", "z", "zp")
CONSTANTS = {
    "pi": REAL("3.14159265358979323846264338327950288"),
    "e": REAL("2.71828182845904523536028747135266250"),
}
FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "sqrt", "abs", "gamma")

END = "end of input"


class ParseError(LrkmError):
    def __init__(self, message: str, offset: int, expected=frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"; expected {', '.join(sorted(self.expected))}" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class UnknownIdentifierError(ParseError):
    def __init__(self, name: str, offset: int):
        self.name = name
        LrkmError.__init__(self, f"unknown identifier {name!r} at offset {offset}")
        self.offset = offset
        self.expected = frozenset()


class EvalError(LrkmError, ArithmeticError):
    pass


@dataclass(frozen=True)
class Num:
    text: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
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
    arg: "Expr"


Expr = Union[Num, Var, Const, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, text, pos = self.peek()
        found = END if kind == "end" else repr(text)
        raise ParseError(f"unexpected {found}", pos, expected)

    def expect(self, op):
        kind, text, _ = self.peek()
        if kind != "op" or text != op:
            self.fail({op})
        self.take()

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, pos = self.peek()
        if kind == "num":
            self.take()
            return Num(text)
        if kind == "name":
            self.take()
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in VARIABLES:
                return Var(text)
            if text in CONSTANTS:
                return Const(text)
            raise UnknownIdentifierError(text, pos)
        if (kind, text) == ("op", "("):
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.fail({"number", "identifier", "(", "-"})


def parse(src: str) -> Expr:
    """Parse source text into an expression tree.

    Raises
    ------
    ParseError
        With the byte offset of the offending token and the expected set.
    UnknownIdentifierError
        For names that are not variables, constants or functions.
    """
    p = _Parser(src)
    tree = p.expr()
    if p.peek()[0] != "end":
        p.fail({"+", "-", "*", "/", "^", END})
    return tree


def to_source(e: Expr) -> str:
    """Fully parenthesized source that parses back to the same tree."""
    if isinstance(e, Num):
        return e.text
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    return f"{e.func}({to_source(e.arg)})"


def free_vars(e: Expr) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Neg):
        return free_vars(e.operand)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Call):
        return free_vars(e.arg)
    return frozenset()


def _finite(value, what):
    if not np.isfinite(value):
        raise EvalError(f"{what} produced a non-finite value")
    return value


def _call(func, x):
    if func == "ln":
        if x <= 0:
            raise EvalError(f"ln of non-positive argument {float(x)!r}")
        return np.log(x)
    if func == "sqrt":
        if x < 0:
            raise EvalError(f"sqrt of negative argument {float(x)!r}")
        return np.sqrt(x)
    if func == "gamma":
        try:
            return fracops.gamma(x)
        except DomainError:
            raise EvalError(f"gamma of non-positive argument {float(x)!r}") from None
    return {"sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "abs": np.abs}[
        func
    ](x)


def _eval(e, env):
    if isinstance(e, Num):
        return REAL(e.text)
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Neg):
        return -_eval(e.operand, env)
    if isinstance(e, Call):
        return _finite(_call(e.func, _eval(e.arg, env)), e.func)
    a = _eval(e.left, env)
    b = _eval(e.right, env)
    if e.op == "+":
        return _finite(a + b, "addition")
    if e.op == "-":
        return _finite(a - b, "subtraction")
    if e.op == "*":
        return _finite(a * b, "multiplication")
    if e.op == "/":
        if b == 0:
            raise EvalError("division by zero")
        return _finite(a / b, "division")
    if a == 0 and b < 0:
        raise EvalError("zero raised to a negative power")
    if a < 0 and b != np.floor(b):
        raise EvalError("negative base raised to a non-integer power")
    with np.errstate(over="ignore", invalid="ignore"):
        return _finite(np.power(a, b), "power")


def evaluate(e: Expr, xi=0, z=0, zp=0):
    """Evaluate ``e`` at the given variable values in the working precision."""
    env = {"xi": REAL(xi), "z": REAL(z), "zp": REAL(zp)}
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _eval(e, env)


eval = evaluate
