"""Target expressions in one variable ``x``.

Grammar (standard precedence, ``^`` binds tightest and takes an integer)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" ["-"] INTEGER)?
    atom   := NUMBER | "x" | "(" expr ")" | ("abs" | "exp") "(" expr ")"

Errors carry the byte offset of the offending token and the set of tokens
that would have been accepted there.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ExpressionEvalError, ExpressionSyntaxError

DIV_FLOOR = 1e-300
FUNCTIONS = ("abs", "exp")


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Var, Num, Neg, BinOp, Pow, Call]

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num" | "name" | "op" | "end"
    text: str
    offset: int  # byte offset


def _tokenize(text: str) -> list:
    out, i = [], 0
    byte = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[i]!r}", byte,
                                        ("number", "name", "+", "-", "*", "/", "^", "(", ")"))
        if m.lastgroup != "ws":
            out.append(_Tok(m.lastgroup, m.group(), byte))
        byte += len(m.group().encode("utf-8"))
        i = m.end()
    out.append(_Tok("end", "", byte))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected, what=None):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ExpressionSyntaxError(what or f"unexpected {found}", t.offset, expected)

    def eat(self, text):
        if self.tok.text != text or self.tok.kind == "end":
            self.fail((text,))
        self.i += 1

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail(("+", "-", "*", "/", "^", "end of input"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.i += 1
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            sign = 1
            if self.tok.kind == "op" and self.tok.text == "-":
                sign = -1
                self.i += 1
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                self.fail(("integer",), "exponent must be an integer literal")
            self.i += 1
            return Pow(base, sign * int(t.text))
        return base

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(float(t.text))
        if t.kind == "name":
            if t.text == "x":
                self.i += 1
                return Var()
            if t.text in FUNCTIONS:
                self.i += 1
                self.eat("(")
                arg = self.expr()
                self.eat(")")
                return Call(t.text, arg)
            self.fail(("number", "x", "abs", "exp", "("), f"unknown name {t.text!r}")
        if t.kind == "op" and t.text == "(":
            self.i += 1
            node = self.expr()
            self.eat(")")
            return node
        self.fail(("number", "x", "abs", "exp", "(", "-"))


def parse_expression(text: str) -> Node:
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0, ("number", "x", "abs", "exp", "(", "-"))
    return _Parser(text).parse()


# precedence levels used by the printer
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def to_string(node: Node) -> str:
    """Canonical text with the fewest parentheses that preserve the tree."""
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Num):
        s = repr(float(node.value))
        return f"({s})" if node.value < 0 or s.startswith("-") else s
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    if isinstance(node, Neg):
        inner = to_string(node.operand)
        return f"-{inner}" if _prec(node.operand) >= 3 else f"-({inner})"
    if isinstance(node, Pow):
        inner = to_string(node.base)
        if _prec(node.base) < 5:
            inner = f"({inner})"
        return f"{inner} ^ {node.exponent}"
    p = _PREC[node.op]
    left = to_string(node.left)
    if _prec(node.left) < p:
        left = f"({left})"
    right = to_string(node.right)
    # left-associative: an equal-precedence right operand needs brackets
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


def evaluate(node: Node, x):
    """Vectorized evaluation; raises on division by (near) zero."""
    x = np.asarray(x, dtype=float)
    if isinstance(node, Var):
        return x
    if isinstance(node, Num):
        return np.full_like(x, node.value)
    if isinstance(node, Neg):
        return -evaluate(node.operand, x)
    if isinstance(node, Call):
        v = evaluate(node.arg, x)
        if node.func == "abs":
            return np.abs(v)
        with np.errstate(over="ignore"):
            return np.exp(v)
    if isinstance(node, Pow):
        v = evaluate(node.base, x)
        if node.exponent < 0:
            if np.any(np.abs(v) <= DIV_FLOOR):
                raise ExpressionEvalError("negative power of zero")
            # invert first: v ** k can underflow to 0 for tiny v
            v = 1.0 / v
        with np.errstate(over="ignore"):
            return v ** abs(node.exponent)
    left, right = evaluate(node.left, x), evaluate(node.right, x)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if np.any(np.abs(right) <= DIV_FLOOR):
        raise ExpressionEvalError("division by zero")
    return left / right


class Expression:
    """A parsed expression usable as a callable ``f(x)``."""

    def __init__(self, text: str):
        self.tree = parse_expression(text)
        self.text = to_string(self.tree)

    def __call__(self, x):
        out = evaluate(self.tree, x)
        return out if np.ndim(out) else float(out)

    def __repr__(self):
        return f"Expression({self.text!r})"
