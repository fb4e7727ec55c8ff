"""Arithmetic expressions in one variable ``x``: parsing, evaluation, derivatives.

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ('^' factor)?
    atom   := number | 'x' | func '(' expr ')' | '(' expr ')' | '-' atom
    func   := exp | ln | sin | cos | sqrt

Unary minus binds tighter than ``^``, so ``-x^2`` means ``(-x)^2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ExprDomainError, ExprSyntaxError, UnknownIdentifierError

FUNCTIONS = ("exp", "ln", "sin", "cos", "sqrt")
BINARY_OPS = ("+", "-", "*", "/", "^")


class Node:
    """Base class of expression tree nodes. Nodes are immutable."""

    __slots__ = ()

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    pass


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary operator {self.op!r}")


@dataclass(frozen=True)
class Func(Node):
    name: str
    arg: Node

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")


ExprAst = Node
Number = Union[float, np.ndarray]


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []  # (kind, value, char_offset)
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos == len(text):
                break
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ExprSyntaxError(self._bytes(pos), "number, 'x', function or operator", text)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.end = len(text)
        self.i = 0

    def _bytes(self, char_offset):
        return len(self.text[:char_offset].encode("utf-8"))

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("eof", "", self.end)

    def fail(self, expected):
        raise ExprSyntaxError(self._bytes(self.peek()[2]), expected, self.text)

    def accept_op(self, *ops):
        kind, value, _ = self.peek()
        if kind == "op" and value in ops:
            self.i += 1
            return value
        return None

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "eof":
            self.fail("operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while (op := self.accept_op("+", "-")) is not None:
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while (op := self.accept_op("*", "/")) is not None:
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        base = self.atom()
        if self.accept_op("^") is not None:
            return BinOp("^", base, self.factor())
        return base

    def atom(self):
        kind, value, offset = self.peek()
        if kind == "num":
            self.i += 1
            return Const(float(value))
        if kind == "name":
            self.i += 1
            if value == "x":
                return Var()
            if value in FUNCTIONS:
                if self.accept_op("(") is None:
                    self.fail("'('")
                arg = self.expr()
                if self.accept_op(")") is None:
                    self.fail("')'")
                return Func(value, arg)
            raise UnknownIdentifierError(value, self._bytes(offset))
        if self.accept_op("(") is not None:
            node = self.expr()
            if self.accept_op(")") is None:
                self.fail("')'")
            return node
        if self.accept_op("-") is not None:
            return Neg(self.atom())
        self.fail("expression")


def parse_expression(text: str) -> Node:
    """Parse ``text`` into an expression tree.

    Raises ExprSyntaxError (with a byte offset) or UnknownIdentifierError.
    """
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# printing

def _fmt_const(value):
    s = repr(float(value))
    return f"({s})" if value < 0 or s.startswith("-") else s


def _is_atom(node):
    return isinstance(node, (Const, Var, Func, Neg))


def to_text(node: Node) -> str:
    """Render ``node`` so that parsing the result gives back the same tree."""
    if isinstance(node, Const):
        return _fmt_const(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Func):
        return f"{node.name}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        return f"-{inner}" if _is_atom(node.operand) else f"-({inner})"
    left, right = to_text(node.left), to_text(node.right)
    if node.op in "+-":
        if isinstance(node.right, BinOp) and node.right.op in "+-":
            right = f"({right})"
        return f"{left} {node.op} {right}"
    if node.op in "*/":
        if isinstance(node.left, BinOp) and node.left.op in "+-":
            left = f"({left})"
        if isinstance(node.right, BinOp) and node.right.op != "^":
            right = f"({right})"
        return f"{left}{node.op}{right}"
    # '^' is right-associative and its base must be an atom
    if not _is_atom(node.left):
        left = f"({left})"
    if not (_is_atom(node.right) or (isinstance(node.right, BinOp) and node.right.op == "^")):
        right = f"({right})"
    return f"{left}^{right}"


# --------------------------------------------------------------------------
# evaluation

def _first_bad(x, mask):
    """Input value at the first position where ``mask`` holds."""
    x = np.asarray(x, dtype=float)
    mask = np.broadcast_to(np.asarray(mask), np.broadcast_shapes(x.shape, np.shape(mask)))
    xs = np.broadcast_to(x, mask.shape)
    return float(xs[mask].flat[0])


def has_variable(node: Node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Const):
        return False
    if isinstance(node, Neg):
        return has_variable(node.operand)
    if isinstance(node, Func):
        return has_variable(node.arg)
    return has_variable(node.left) or has_variable(node.right)


def _integer_exponent(node):
    """The exponent as an int when it is an x-free subtree with integer value."""
    if has_variable(node):
        return None
    value = float(_eval(node, 0.0))
    if math.isfinite(value) and value.is_integer():
        return int(value)
    return None


def _eval(node, x):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    if isinstance(node, Func):
        a = _eval(node.arg, x)
        if node.name == "exp":
            return np.exp(a)
        if node.name == "ln":
            bad = np.asarray(a) <= 0
            if np.any(bad):
                raise ExprDomainError("ln of non-positive argument", _first_bad(x, bad))
            return np.log(a)
        if node.name == "sqrt":
            bad = np.asarray(a) < 0
            if np.any(bad):
                raise ExprDomainError("sqrt of negative argument", _first_bad(x, bad))
            return np.sqrt(a)
        if node.name == "sin":
            return np.sin(a)
        return np.cos(a)
    a = _eval(node.left, x)
    if node.op == "^":
        n = _integer_exponent(node.right)
        if n is not None:
            if n < 0:
                bad = np.asarray(a) == 0
                if np.any(bad):
                    raise ExprDomainError("negative power of zero", _first_bad(x, bad))
            return _int_power(a, n)
        b = _eval(node.right, x)
        bad = np.asarray(a) <= 0
        if np.any(bad):
            raise ExprDomainError("non-integer power of non-positive base", _first_bad(x, bad))
        return np.exp(b * np.log(a))
    b = _eval(node.right, x)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    bad = np.asarray(b) == 0
    if np.any(bad):
        raise ExprDomainError("division by zero", _first_bad(x, bad))
    return a / b


def _int_power(a, n):
    if n < 0:
        return 1.0 / _int_power(a, -n)
    result = np.ones_like(np.asarray(a, dtype=float)) if np.ndim(a) else 1.0
    base = a
    while n:
        if n & 1:
            result = result * base
        base = base * base
        n >>= 1
    return result


def evaluate(node: Node, x: Number) -> Number:
    """Evaluate ``node`` at ``x`` (a float or an ndarray, elementwise)."""
    scalar = np.ndim(x) == 0
    xv = float(x) if scalar else np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = _eval(node, xv)
    if scalar:
        return float(out)
    return np.broadcast_to(np.asarray(out, dtype=float), np.shape(xv)).copy()


# --------------------------------------------------------------------------
# differentiation

def _try_fold(node):
    try:
        value = evaluate(node, 0.0)
    except ExprDomainError:
        return node
    if not math.isfinite(value):
        return node
    return Const(value)


def _is(node, value):
    return isinstance(node, Const) and node.value == value


def _bin(op, a, b):
    node = BinOp(op, a, b)
    if isinstance(a, Const) and isinstance(b, Const):
        return _try_fold(node)
    # identities that keep derivative trees readable
    if op == "*" and (_is(a, 0) or _is(b, 0)):
        return Const(0.0)
    if op == "*" and _is(a, 1):
        return b
    if op in ("*", "/") and _is(b, 1):
        return a
    if op == "+" and _is(a, 0):
        return b
    if op in ("+", "-") and _is(b, 0):
        return a
    if op == "-" and _is(a, 0):
        return _neg(b)
    return node


def _neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    return Neg(a)


def _func(name, a):
    node = Func(name, a)
    if isinstance(a, Const):
        return _try_fold(node)
    return node


def fold_constants(node: Node) -> Node:
    """Collapse every subtree that contains no ``x`` into a single constant."""
    if isinstance(node, (Const, Var)):
        return node
    if isinstance(node, Neg):
        return _neg(fold_constants(node.operand))
    if isinstance(node, Func):
        return _func(node.name, fold_constants(node.arg))
    return _bin(node.op, fold_constants(node.left), fold_constants(node.right))


def differentiate(node: Node) -> Node:
    """Symbolic d/dx of ``node``, with literal-only subtrees folded."""
    if isinstance(node, Const):
        return Const(0.0)
    if isinstance(node, Var):
        return Const(1.0)
    if isinstance(node, Neg):
        return _neg(differentiate(node.operand))
    if isinstance(node, Func):
        u = node.arg
        du = differentiate(u)
        if node.name == "exp":
            outer = _func("exp", u)
        elif node.name == "ln":
            return _bin("/", du, u)
        elif node.name == "sin":
            outer = _func("cos", u)
        elif node.name == "cos":
            outer = _neg(_func("sin", u))
        else:
            return _bin("/", du, _bin("*", Const(2.0), _func("sqrt", u)))
        return _bin("*", outer, du)

    u, v = node.left, node.right
    du = differentiate(u)
    if node.op in "+-":
        return _bin(node.op, du, differentiate(v))
    if node.op == "*":
        return _bin("+", _bin("*", du, v), _bin("*", u, differentiate(v)))
    if node.op == "/":
        dv = differentiate(v)
        num = _bin("-", _bin("*", du, v), _bin("*", u, dv))
        return _bin("/", num, _bin("^", v, Const(2.0)))
    # power
    if not has_variable(v):
        c = fold_constants(v)
        return _bin("*", _bin("*", c, _bin("^", u, _bin("-", c, Const(1.0)))), du)
    # u^v = exp(v ln u)  =>  u^v (v' ln u + v u'/u)
    dv = differentiate(v)
    inner = _bin("+", _bin("*", dv, _func("ln", u)), _bin("/", _bin("*", v, du), u))
    return _bin("*", fold_constants(node), inner)
