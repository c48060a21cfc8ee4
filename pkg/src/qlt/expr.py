"""Complex-valued expressions of n real variables.

Grammar (loosest to tightest binding)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' integer)?
    atom    := number | 'i' | name | func '(' sum ')' | '(' sum ')'

``i`` is the imaginary unit, ``func`` is one of exp, sin, cos, log and the
exponent after ``^`` must be an integer literal, optionally signed or
parenthesised.  Expressions are immutable; every function here is pure.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    ExprSyntaxError,
    NonIntegerExponent,
    UnknownIdentifier,
)

FUNCTIONS = ("exp", "sin", "cos", "log")
BINARY_OPS = ("+", "-", "*", "/")


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Binary:
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


Node = Var | Const | Neg | Binary | Pow | Call


@dataclass(frozen=True)
class Expr:
    """An expression tree together with its ordered variable names."""

    root: Node
    variables: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.variables)

    def __call__(self, *point: float) -> complex:
        return evaluate(self, point)

    def __str__(self) -> str:
        return to_source(self)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


@dataclass(frozen=True)
class _Token:
    kind: str  # 'num', 'name', 'op' or 'end'
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(source) and source[pos].isspace():
            pos += 1
        if pos >= len(source):
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.lastgroup is None:
            raise ExprSyntaxError(pos, "number, name or operator", source[pos])
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, variables: Sequence[str]):
        self.tokens = _tokenize(source)
        self.k = 0
        self.index = {name: j for j, name in enumerate(variables)}

    @property
    def tok(self) -> _Token:
        return self.tokens[self.k]

    def take(self) -> _Token:
        t = self.tokens[self.k]
        self.k += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind != "op":
            raise ExprSyntaxError(self.tok.pos, repr(text), self.tok.text)
        self.k += 1

    def parse(self) -> Node:
        node = self.sum()
        if self.tok.kind != "end":
            raise ExprSyntaxError(self.tok.pos, "operator or end of input", self.tok.text)
        return node

    def sum(self) -> Node:
        node = self.product()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            node = Binary(op, node, self.product())
        return node

    def product(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.take().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        start = self.tok.pos
        sign = 1
        parens = 0
        while self.tok.kind == "op" and self.tok.text in "(-+":
            t = self.take().text
            if t == "(":
                parens += 1
            elif t == "-":
                sign = -sign
        tok = self.tok
        if tok.kind != "num":
            if tok.kind == "end":
                raise ExprSyntaxError(tok.pos, "integer exponent")
            raise NonIntegerExponent(f"exponent at offset {start} must be an integer literal")
        if not re.fullmatch(r"\d+", tok.text):
            raise NonIntegerExponent(
                f"exponent {tok.text!r} at offset {tok.pos} is not an integer"
            )
        self.take()
        for _ in range(parens):
            if self.tok.kind == "op" and self.tok.text == ")":
                self.take()
            else:
                raise NonIntegerExponent(f"exponent at offset {start} must be an integer literal")
        value = sign * int(tok.text)
        # right associative: x^2^3 == x^8
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            inner = self.exponent()
            if inner < 0:
                raise NonIntegerExponent(f"exponent at offset {start} is not an integer")
            value = value ** inner
        return value

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.take()
            return Const(complex(float(tok.text)))
        if tok.kind == "name":
            self.take()
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.sum()
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text in self.index:
                return Var(self.index[tok.text])
            if tok.text == "i":
                return Const(1j)
            raise UnknownIdentifier(tok.text, tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self.take()
            node = self.sum()
            self.expect(")")
            return node
        raise ExprSyntaxError(tok.pos, "expression", tok.text)


def parse(source: str, variables: Sequence[str]) -> Expr:
    """Parse ``source`` into an expression over the given variable names."""
    variables = tuple(variables)
    if len(set(variables)) != len(variables):
        raise ValueError(f"variable names are not distinct: {variables}")
    for name in variables:
        if not _IDENT.match(name) or name == "i" or name in FUNCTIONS:
            raise ValueError(f"invalid variable name {name!r}")
    return Expr(_Parser(source, variables).parse(), variables)


def split_top_level(source: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside parentheses (used for path component lists)."""
    parts, depth, start = [], 0, 0
    for k, ch in enumerate(source):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append(source[start:k])
            start = k + 1
    parts.append(source[start:])
    return [p.strip() for p in parts]


# --------------------------------------------------------------------------
# generic evaluation

T = TypeVar("T")


def walk(
    node: Node,
    leaves: Sequence[T],
    const: Callable[[complex], T],
    funcs: dict[str, Callable[[T], T]],
) -> T:
    """Evaluate ``node`` in any number system supporting + - * / and int powers.

    ``leaves`` holds the value of each variable, ``const`` lifts a complex
    literal and ``funcs`` supplies exp/sin/cos/log for that number system.
    """
    memo: dict[int, T] = {}

    def go(nd: Node) -> T:
        key = id(nd)
        if key in memo:
            return memo[key]
        if isinstance(nd, Var):
            out = leaves[nd.index]
        elif isinstance(nd, Const):
            out = const(nd.value)
        elif isinstance(nd, Neg):
            out = -go(nd.arg)
        elif isinstance(nd, Binary):
            a, b = go(nd.left), go(nd.right)
            if nd.op == "+":
                out = a + b
            elif nd.op == "-":
                out = a - b
            elif nd.op == "*":
                out = a * b
            else:
                out = a / b
        elif isinstance(nd, Pow):
            out = go(nd.base) ** nd.exponent
        else:
            out = funcs[nd.func](go(nd.arg))
        memo[key] = out
        return out

    return go(node)


def _log(z: complex) -> complex:
    if z == 0:
        raise DomainError("log of zero")
    return cmath.log(z)


_COMPLEX_FUNCS: dict[str, Callable[[complex], complex]] = {
    "exp": cmath.exp,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "log": _log,
}


def _check_point(e: Expr, point: Sequence[float]) -> list[complex]:
    pt = np.asarray(point, dtype=float).ravel()
    if pt.size != e.n:
        raise DimensionError(f"point has dimension {pt.size}, expression expects {e.n}")
    if not np.all(np.isfinite(pt)):
        raise DimensionError("point is not finite")
    return [complex(v) for v in pt]


def cdiv(a: complex, b: complex) -> complex:
    """a/b as a*conj(b)/|b|^2, which makes a/a exactly 1.

    Meant for quotients with |b| well above the underflow range.
    """
    d = b.real * b.real + b.imag * b.imag
    if d == 0:
        raise DomainError("division by zero")
    return complex((a.real * b.real + a.imag * b.imag) / d, (a.imag * b.real - a.real * b.imag) / d)


def evaluate(e: Expr, point: Sequence[float]) -> complex:
    """Value of ``e`` at a real point."""
    leaves = _check_point(e, point)
    try:
        value = walk(e.root, leaves, complex, _COMPLEX_FUNCS)
    except ZeroDivisionError as exc:
        raise DomainError(f"division by zero ({exc})") from None
    except OverflowError as exc:
        raise DomainError(f"overflow ({exc})") from None
    if not cmath.isfinite(value):
        raise DomainError(f"non-finite value {value}")
    return value


# --------------------------------------------------------------------------
# symbolic differentiation

_ZERO = Const(0j)
_ONE = Const(1 + 0j)


def _add(a: Node, b: Node) -> Node:
    if a == _ZERO:
        return b
    if b == _ZERO:
        return a
    return Binary("+", a, b)


def _sub(a: Node, b: Node) -> Node:
    if b == _ZERO:
        return a
    if a == _ZERO:
        return Neg(b)
    return Binary("-", a, b)


def _mul(a: Node, b: Node) -> Node:
    if a == _ZERO or b == _ZERO:
        return _ZERO
    if a == _ONE:
        return b
    if b == _ONE:
        return a
    return Binary("*", a, b)


def _d(node: Node, j: int) -> Node:
    if isinstance(node, Var):
        return _ONE if node.index == j else _ZERO
    if isinstance(node, Const):
        return _ZERO
    if isinstance(node, Neg):
        d = _d(node.arg, j)
        return _ZERO if d == _ZERO else Neg(d)
    if isinstance(node, Binary):
        a, b = node.left, node.right
        da, db = _d(a, j), _d(b, j)
        if node.op == "+":
            return _add(da, db)
        if node.op == "-":
            return _sub(da, db)
        if node.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        # quotient rule
        num = _sub(_mul(da, b), _mul(a, db))
        return _ZERO if num == _ZERO else Binary("/", num, Pow(b, 2))
    if isinstance(node, Pow):
        n = node.exponent
        da = _d(node.base, j)
        if n == 0 or da == _ZERO:
            return _ZERO
        inner = _ONE if n == 1 else (node.base if n == 2 else Pow(node.base, n - 1))
        return _mul(_mul(Const(complex(n)), inner), da)
    da = _d(node.arg, j)
    if da == _ZERO:
        return _ZERO
    if node.func == "exp":
        return _mul(node, da)
    if node.func == "sin":
        return _mul(Call("cos", node.arg), da)
    if node.func == "cos":
        return _mul(Neg(Call("sin", node.arg)), da)
    return Binary("/", da, node.arg)


def partial(e: Expr, j: int) -> Expr:
    """Exact symbolic partial derivative with respect to variable ``j``."""
    if not 0 <= j < e.n:
        raise DimensionError(f"variable index {j} out of range for n={e.n}")
    return Expr(_d(e.root, j), e.variables)


# --------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt_const(c: complex) -> str:
    def num(v: float) -> str:
        if v == int(v) and abs(v) < 1e15:
            return str(int(v))
        return repr(v)

    if c.imag == 0:
        return num(c.real)
    if c.real == 0:
        return "i" if c.imag == 1 else f"{num(c.imag)}*i"
    return f"({num(c.real)}+{num(c.imag)}*i)"


def _src(node: Node, names: tuple[str, ...]) -> tuple[str, int]:
    # returns (text, precedence): 1 sum, 2 product, 3 unary, 3.5 power, 4 atom
    if isinstance(node, Var):
        return names[node.index], 4
    if isinstance(node, Const):
        text = _fmt_const(node.value)
        if text.startswith("-"):
            return f"({text})", 4
        return text, (2 if "*" in text and not text.startswith("(") else 4)
    if isinstance(node, Neg):
        s, p = _src(node.arg, names)
        return "-" + (s if p >= 3 else f"({s})"), 3
    if isinstance(node, Pow):
        s, p = _src(node.base, names)
        exp = str(node.exponent) if node.exponent >= 0 else f"({node.exponent})"
        return (s if p >= 4 else f"({s})") + "^" + exp, 3.5
    if isinstance(node, Call):
        return f"{node.func}({_src(node.arg, names)[0]})", 4
    prec = _PREC[node.op]
    ls, lp = _src(node.left, names)
    rs, rp = _src(node.right, names)
    if lp < prec:
        ls = f"({ls})"
    if rp <= prec and not (node.op in "+*" and rp == prec):
        rs = f"({rs})"
    return f"{ls} {node.op} {rs}", prec


def to_source(e: Expr) -> str:
    """Render ``e`` back to text that :func:`parse` accepts."""
    return _src(e.root, e.variables)[0]

