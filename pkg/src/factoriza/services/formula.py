"""Order formulas, parameter expressions and the group-shape order parser.

Table entries carry their parameter dependence as small expression trees
(``q**3 * (q**3 - 1) / gcd(2, q - 1)``) so that one object both evaluates and
prints. Group shapes are written in an ASCII notation and turned into orders
by ``shape_order``:

* ``3^4:2``, ``(3^3:13:3).2``, ``2^{3+6}:(63:3)``, ``5 x PSL2(16)``
* ``3_+^{1+2}`` for extraspecial groups, ``@``, ``@1``, ``@2`` for the
  optional outer parts
* families ``PSL3(4)``, ``O8+(2)``, ``POmega8+(3)``, ``AGammaL1(8)``, ``M11``
"""

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Mapping, Union

from src.factoriza.services.field_core import PrimePower
from src.factoriza.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# expression trees


class Expr:
    """Node of an integer-valued parameter expression."""

    def evaluate(self, env: Mapping[str, int]) -> Fraction:
        raise NotImplementedError

    def value(self, env: Mapping[str, int]) -> int:
        """Integer value; a non-integral result is a table inconsistency."""
        v = self.evaluate(env)
        if v.denominator != 1:
            raise ValidationError(f"{self} is not an integer at {dict(env)}", {"value": str(v)})
        return int(v)

    def __add__(self, other: "ExprLike") -> "Expr":
        return BinOp("+", self, lift(other))

    def __radd__(self, other: "ExprLike") -> "Expr":
        return BinOp("+", lift(other), self)

    def __sub__(self, other: "ExprLike") -> "Expr":
        return BinOp("-", self, lift(other))

    def __rsub__(self, other: "ExprLike") -> "Expr":
        return BinOp("-", lift(other), self)

    def __mul__(self, other: "ExprLike") -> "Expr":
        return BinOp("*", self, lift(other))

    def __rmul__(self, other: "ExprLike") -> "Expr":
        return BinOp("*", lift(other), self)

    def __truediv__(self, other: "ExprLike") -> "Expr":
        return BinOp("/", self, lift(other))

    def __rtruediv__(self, other: "ExprLike") -> "Expr":
        return BinOp("/", lift(other), self)

    def __pow__(self, other: "ExprLike") -> "Expr":
        return BinOp("^", self, lift(other))


ExprLike = Union[Expr, int]


@dataclass(frozen=True, eq=False)
class Const(Expr):
    v: int

    def evaluate(self, env: Mapping[str, int]) -> Fraction:
        return Fraction(self.v)

    def __str__(self) -> str:
        return str(self.v)


@dataclass(frozen=True, eq=False)
class Var(Expr):
    name: str

    def evaluate(self, env: Mapping[str, int]) -> Fraction:
        if self.name not in env:
            raise ValidationError(f"parameter {self.name} is not set", {"needs": self.name})
        return Fraction(env[self.name])

    def __str__(self) -> str:
        return self.name


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


@dataclass(frozen=True, eq=False)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def evaluate(self, env: Mapping[str, int]) -> Fraction:
        a, b = self.left.evaluate(env), self.right.evaluate(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return a / b
        if b.denominator != 1:
            raise ValidationError(f"non-integral exponent in {self}")
        return a ** int(b)

    def _wrap(self, child: Expr, right: bool) -> str:
        text = str(child)
        if isinstance(child, BinOp):
            mine, theirs = _PRECEDENCE[self.op], _PRECEDENCE[child.op]
            if theirs < mine or (right and theirs == mine and self.op in "-/^"):
                return f"({text})"
        return text

    def __str__(self) -> str:
        return f"{self._wrap(self.left, False)}{self.op}{self._wrap(self.right, True)}"


@dataclass(frozen=True, eq=False)
class Gcd(Expr):
    a: Expr
    b: Expr

    def evaluate(self, env: Mapping[str, int]) -> Fraction:
        return Fraction(math.gcd(self.a.value(env), self.b.value(env)))

    def __str__(self) -> str:
        return f"({self.a},{self.b})"


def lift(x: ExprLike) -> Expr:
    return x if isinstance(x, Expr) else Const(int(x))


def gcd(a: ExprLike, b: ExprLike) -> Expr:
    return Gcd(lift(a), lift(b))


n, m, q, d, e = (Var(s) for s in "nmqde")


# ---------------------------------------------------------------------------
# group orders


def _prod(values: list[int]) -> int:
    return reduce(lambda x, y: x * y, values, 1)


def order_gl(n_: int, q_: int) -> int:
    return q_ ** (n_ * (n_ - 1) // 2) * _prod([q_**i - 1 for i in range(1, n_ + 1)])


def order_sl(n_: int, q_: int) -> int:
    return order_gl(n_, q_) // (q_ - 1)


def order_pgl(n_: int, q_: int) -> int:
    return order_sl(n_, q_)


def order_psl(n_: int, q_: int) -> int:
    return order_sl(n_, q_) // math.gcd(n_, q_ - 1)


def order_sp(dim: int, q_: int) -> int:
    m_ = dim // 2
    return q_ ** (m_ * m_) * _prod([q_ ** (2 * i) - 1 for i in range(1, m_ + 1)])


def order_psp(dim: int, q_: int) -> int:
    return order_sp(dim, q_) // math.gcd(2, q_ - 1)


def order_gu(n_: int, q_: int) -> int:
    return q_ ** (n_ * (n_ - 1) // 2) * _prod([q_**i - (-1) ** i for i in range(1, n_ + 1)])


def order_su(n_: int, q_: int) -> int:
    return order_gu(n_, q_) // (q_ + 1)


def order_psu(n_: int, q_: int) -> int:
    return order_su(n_, q_) // math.gcd(n_, q_ + 1)


def order_go(dim: int, q_: int, sign: str = "odd") -> int:
    """Full isometry group of a nondegenerate quadratic form."""
    if dim % 2:
        m_ = dim // 2
        return (2 if q_ % 2 else 1) * q_ ** (m_ * m_) * _prod([q_ ** (2 * i) - 1 for i in range(1, m_ + 1)])
    m_ = dim // 2
    eps = 1 if sign == "+" else -1
    return 2 * q_ ** (m_ * (m_ - 1)) * (q_**m_ - eps) * _prod([q_ ** (2 * i) - 1 for i in range(1, m_)])


def order_so(dim: int, q_: int, sign: str = "odd") -> int:
    return order_go(dim, q_, sign) // math.gcd(2, q_ - 1)


def order_omega(dim: int, q_: int, sign: str = "odd") -> int:
    if dim % 2:
        return order_so(dim, q_) // math.gcd(2, q_ - 1)
    return order_go(dim, q_, sign) // (2 * math.gcd(2, q_ - 1))


def order_pso(dim: int, q_: int, sign: str) -> int:
    return order_so(dim, q_, sign) // math.gcd(2, q_ - 1)


def order_pomega(dim: int, q_: int, sign: str = "odd") -> int:
    if dim % 2:
        return order_omega(dim, q_)
    m_ = dim // 2
    eps = 1 if sign == "+" else -1
    # centre of Omega has order (4, q^m - eps) / (2, q - 1)
    return order_omega(dim, q_, sign) // (math.gcd(4, q_**m_ - eps) // math.gcd(2, q_ - 1))


def order_g2(q_: int) -> int:
    return q_**6 * (q_**6 - 1) * (q_**2 - 1)


def field_degree(q_: int) -> int:
    return PrimePower.from_order(q_).f


SPORADIC_ORDERS = {
    "M10": 720,
    "M11": 7920,
    "M12": 95040,
    "M22": 443520,
    "M23": 10200960,
    "M24": 244823040,
    "J2": 604800,
    "HS": 44352000,
    "He": 4030387200,
    "Suz": 448345497600,
}


def family_order(name: str, k: int | None, sign: str | None, arg: int | None) -> int:
    """Order of a named family member such as PSL_k(arg) or A_k.

    Raises:
        ValidationError: unknown family or missing parameters.
    """
    key = f"{name}{k if k is not None else ''}"
    if key in SPORADIC_ORDERS and arg is None:
        return SPORADIC_ORDERS[key]
    if arg is None:
        if k is None:
            raise ValidationError(f"family {name} needs a parameter")
        small = {
            "A": lambda t: math.factorial(t) // 2 if t > 1 else 1,
            "S": math.factorial,
            "C": lambda t: t,
            "D": lambda t: t,
            "Q": lambda t: t,
            "SD": lambda t: t,
        }
        if name not in small:
            raise ValidationError(f"unknown family {name}{k}")
        return int(small[name](k))
    if k is None:
        raise ValidationError(f"family {name}(..) needs a dimension")
    sgn = sign or "odd"
    f = field_degree(arg)
    table = {
        "GL": lambda: order_gl(k, arg),
        "SL": lambda: order_sl(k, arg),
        "PGL": lambda: order_pgl(k, arg),
        "PSL": lambda: order_psl(k, arg),
        "GammaL": lambda: order_gl(k, arg) * f,
        "PGammaL": lambda: order_pgl(k, arg) * f,
        "AGL": lambda: arg**k * order_gl(k, arg),
        "AGammaL": lambda: arg**k * order_gl(k, arg) * f,
        "Sp": lambda: order_sp(k, arg),
        "PSp": lambda: order_psp(k, arg),
        "PGSp": lambda: order_sp(k, arg),
        "GU": lambda: order_gu(k, arg),
        "SU": lambda: order_su(k, arg),
        "PGU": lambda: order_su(k, arg),
        "PSU": lambda: order_psu(k, arg),
        "O": lambda: order_go(k, arg, sgn),
        "SO": lambda: order_so(k, arg, sgn),
        "PSO": lambda: order_pso(k, arg, sgn),
        "Omega": lambda: order_omega(k, arg, sgn),
        "POmega": lambda: order_pomega(k, arg, sgn),
        "G": lambda: order_g2(arg),
    }
    if name not in table:
        raise ValidationError(f"unknown family {name}")
    return int(table[name]())


# ---------------------------------------------------------------------------
# shape parser

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z]+)|(?P<op>[().:^{}+\-_@,]))")


def _tokens(text: str) -> list[str]:
    out: list[str] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None or mt.end() == pos:
            raise ValidationError(f"cannot read shape {text!r} at position {pos}")
        out.append(mt.group(mt.lastgroup or "op"))
        pos = mt.end()
    return out


class _ShapeParser:
    """Recursive descent over the token list; every product sign multiplies orders."""

    def __init__(self, text: str, outer: Mapping[str, int]) -> None:
        self.text = text
        self.toks = _tokens(text)
        self.i = 0
        self.outer = outer

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValidationError(f"malformed shape {self.text!r}: expected {expected or 'token'}, got {tok}")
        self.i += 1
        return tok

    def parse(self) -> int:
        value = self.expr()
        if self.peek() is not None:
            raise ValidationError(f"trailing input in shape {self.text!r}: {self.peek()}")
        return value

    def expr(self) -> int:
        value = self.factor()
        while self.peek() in (":", ".", "x"):
            self.take()
            value *= self.factor()
        return value

    def factor(self) -> int:
        base = self.primary()
        if self.peek() == "_":
            # extraspecial sign: p_+^{1+2m} and p_-^{1+2m} have the same order
            self.take()
            if self.peek() in ("+", "-"):
                self.take()
        if self.peek() == "^":
            self.take()
            return int(base ** self.exponent())
        return base

    def exponent(self) -> int:
        if self.peek() == "{":
            self.take()
            total = int(self.take())
            while self.peek() == "+":
                self.take()
                total += int(self.take())
            self.take("}")
            return total
        return int(self.take())

    def primary(self) -> int:
        tok = self.peek()
        if tok is None:
            raise ValidationError(f"shape {self.text!r} ends early")
        if tok.isdigit():
            self.take()
            return int(tok)
        if tok == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value
        if tok == "@":
            self.take()
            label = "@"
            if self.peek() is not None and self.peek().isdigit():  # type: ignore[union-attr]
                label += self.take()
            return self.outer.get(label, 1)
        return self.family()

    def family(self) -> int:
        name = self.take()
        k: int | None = None
        sign: str | None = None
        arg: int | None = None
        if self.peek() is not None and self.peek().isdigit():  # type: ignore[union-attr]
            k = int(self.take())
        if self.peek() in ("+", "-") and self.i + 1 < len(self.toks) and self.toks[self.i + 1] == "(":
            sign = self.take()
        if self.peek() == "(" and name not in ("C", "D", "A", "S", "Q", "SD"):
            self.take()
            arg = self.expr()
            self.take(")")
        return family_order(name, k, sign, arg)


def shape_order(text: str, outer: Mapping[str, int] | None = None) -> int:
    """Order of a group written in the table notation.

    Args:
        text: the shape, e.g. ``"(3^3:13:3).2"``.
        outer: values of the optional outer parts ``@``, ``@1``, ``@2``
            (default 1).

    Raises:
        ValidationError: unreadable shape or unknown family.
    """
    return _ShapeParser(text, outer or {}).parse()
