"""Tiny expression language for the functions ``f`` and ``g``.

Grammar (one variable ``x``)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ['-'] power
    power  := atom ['^' factor]
    atom   := number | 'x' | func '(' expr [',' expr] ')' | '(' expr ')'
    func   := exp | log | sqrt | sin | cos | abs | pow

``^`` is right-associative and binds tighter than unary minus, so
``-x^0.5`` is ``-(x^0.5)``.  ``pow`` takes two arguments, every other
function takes one.
"""

from __future__ import annotations

import math
import re
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from fracmat.errors import (
    EvalDomainError,
    InversionFailure,
    NonMonotoneSamples,
    OutOfRange,
    ParseError,
    UnknownCatalogEntry,
)

__all__ = [
    "BinOp",
    "Call",
    "Expression",
    "FunctionSpec",
    "Neg",
    "Num",
    "Var",
    "catalog",
    "derivative",
    "differentiate",
    "evaluate",
    "invert_monotone",
    "parse",
    "to_string",
]

FUNCTIONS = {"exp": 1, "log": 1, "sqrt": 1, "sin": 1, "cos": 1, "abs": 1, "pow": 2}
SCREEN_POINTS = 1024


# {{{ syntax tree


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: Expression


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Expression, ...]


Expression = Union[Num, Var, Neg, BinOp, Call]

# }}}


# {{{ parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


@dataclass
class _Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            pos = len(src)
            break
        m = _TOKEN.match(src, pos)
        if m is None:
            start = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ParseError(f"unexpected character {src[start]!r}", start)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(_Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str) -> None:
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind != "op":
            raise ParseError(f"unexpected {self._describe()}", self.tok.offset, (repr(text),))
        self.advance()

    def _describe(self) -> str:
        return "end of input" if self.tok.kind == "end" else f"token {self.tok.text!r}"

    def parse(self) -> Expression:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(
                f"unexpected {self._describe()}", self.tok.offset, ("'+'", "'-'", "'*'", "'/'", "'^'", "end")
            )
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expression:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.power())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Expression:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "name":
            self.advance()
            if t.text == "x":
                return Var()
            if t.text not in FUNCTIONS:
                raise ParseError(f"unknown name {t.text!r}", t.offset, ("'x'", *sorted(FUNCTIONS)))
            self.expect("(")
            args = [self.expr()]
            for _ in range(FUNCTIONS[t.text] - 1):
                self.expect(",")
                args.append(self.expr())
            self.expect(")")
            return Call(t.text, tuple(args))
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {self._describe()}", t.offset, ("number", "'x'", "function", "'('"))


def parse(src: str) -> Expression:
    """Parse an expression string into a syntax tree.

    Raises
    ------
    ParseError
        with the offset of the offending token and the expected tokens.
    """
    if not src or not src.strip():
        raise ParseError("empty expression", 0, ("number", "'x'", "function", "'('"))
    return _Parser(src).parse()


# }}}


# {{{ printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt_num(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_string(node: Expression) -> str:
    """Print a tree so that :func:`parse` gives back the same tree."""
    return _show(node, 0)


def _show(node: Expression, ctx: int) -> str:
    # ctx: 0 expr, 1 right of +/-, 2 left of */, 3 right of */ (a factor),
    # 4 base of ^ (an atom)
    if isinstance(node, Num):
        text = _fmt_num(node.value)
        # negative literals only come out of differentiation
        return f"({text})" if node.value < 0 and ctx in (1, 4) else text
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(_show(a, 0) for a in node.args)})"
    if isinstance(node, Neg):
        text = "-" + _show(node.arg, 4 if not _is_power(node.arg) else 5)
        return f"({text})" if ctx in (1, 4) else text
    if node.op == "^":
        text = f"{_show(node.left, 4)}^{_show(node.right, 3)}"
        return f"({text})" if ctx == 4 else text
    prec = _PREC[node.op]
    if prec == 1:
        text = f"{_show(node.left, 0)}{node.op}{_show(node.right, 1)}"
        return f"({text})" if ctx >= 1 else text
    text = f"{_show(node.left, 2)}{node.op}{_show(node.right, 3)}"
    return f"({text})" if ctx >= 3 else text


def _is_power(node: Expression) -> bool:
    return isinstance(node, BinOp) and node.op == "^"


# }}}


# {{{ evaluation


def _check(ok, what: str) -> None:
    if not np.all(ok):
        raise EvalDomainError(what)


def evaluate(node: Expression, x):
    """Evaluate the tree at ``x`` (scalar or array).

    Raises
    ------
    EvalDomainError
        on log/sqrt of out-of-domain values, division by zero, or a
        non-integer power of a negative base.
    """
    if isinstance(node, Num):
        return node.value + 0.0 * np.asarray(x, dtype=float)
    if isinstance(node, Var):
        return np.asarray(x, dtype=float)
    if isinstance(node, Neg):
        return -evaluate(node.arg, x)
    if isinstance(node, Call):
        args = [evaluate(a, x) for a in node.args]
        u = args[0]
        if node.name == "exp":
            with np.errstate(over="ignore"):
                out = np.exp(u)
            _check(np.isfinite(out), "exp overflow")
            return out
        if node.name == "log":
            _check(u > 0, "log of a non-positive value")
            return np.log(u)
        if node.name == "sqrt":
            _check(u >= 0, "sqrt of a negative value")
            return np.sqrt(u)
        if node.name == "sin":
            return np.sin(u)
        if node.name == "cos":
            return np.cos(u)
        if node.name == "abs":
            return np.abs(u)
        if node.name == "pow":
            return _power(u, args[1])
        raise AssertionError(node.name)
    left = evaluate(node.left, x)
    right = evaluate(node.right, x)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        _check(right != 0, "division by zero")
        return left / right
    return _power(left, right)


def _power(base, expo):
    base = np.asarray(base, dtype=float)
    expo = np.asarray(expo, dtype=float)
    integral = expo == np.round(expo)
    _check((base >= 0) | integral, "non-integer power of a negative value")
    _check((base != 0) | (expo >= 0), "negative power of zero")
    with np.errstate(over="ignore"):
        out = np.power(base, expo)
    _check(np.isfinite(out), "power overflow")
    return out


# }}}


# {{{ symbolic differentiation


def _num(v: float) -> Num:
    return Num(float(v))


def _cval(node: Expression) -> float | None:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg) and isinstance(node.arg, Num):
        return -node.arg.value
    return None


def _is_const(node: Expression, value: float | None = None) -> bool:
    v = _cval(node)
    if v is None:
        return False
    return value is None or v == value


def _add(a: Expression, b: Expression) -> Expression:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if _is_const(a) and _is_const(b):
        return _num(_cval(a) + _cval(b))
    return BinOp("+", a, b)


def _sub(a: Expression, b: Expression) -> Expression:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    if _is_const(a) and _is_const(b):
        return _num(_cval(a) - _cval(b))
    return BinOp("-", a, b)


def _mul(a: Expression, b: Expression) -> Expression:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return _num(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b):
        return _num(_cval(a) * _cval(b))
    if _is_const(a, -1.0):
        return _neg(b)
    if _is_const(b, -1.0):
        return _neg(a)
    return BinOp("*", a, b)


def _div(a: Expression, b: Expression) -> Expression:
    if _is_const(a, 0.0):
        return _num(0.0)
    if _is_const(b, 1.0):
        return a
    return BinOp("/", a, b)


def _neg(a: Expression) -> Expression:
    if _is_const(a):
        return _num(-_cval(a))
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _pow(a: Expression, b: Expression) -> Expression:
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return _num(1.0)
    return BinOp("^", a, b)


def differentiate(node: Expression) -> Expression:
    """Symbolic derivative with respect to ``x``."""
    if isinstance(node, Num):
        return _num(0.0)
    if isinstance(node, Var):
        return _num(1.0)
    if isinstance(node, Neg):
        return _neg(differentiate(node.arg))
    if isinstance(node, Call):
        u = node.args[0]
        du = differentiate(u)
        if node.name == "exp":
            return _mul(node, du)
        if node.name == "log":
            return _div(du, u)
        if node.name == "sqrt":
            return _div(du, _mul(_num(2.0), node))
        if node.name == "sin":
            return _mul(Call("cos", (u,)), du)
        if node.name == "cos":
            return _neg(_mul(Call("sin", (u,)), du))
        if node.name == "abs":
            return _mul(_div(u, node), du)
        if node.name == "pow":
            return differentiate(BinOp("^", u, node.args[1]))
        raise AssertionError(node.name)
    a, b = node.left, node.right
    da, db = differentiate(a), differentiate(b)
    if node.op == "+":
        return _add(da, db)
    if node.op == "-":
        return _sub(da, db)
    if node.op == "*":
        return _add(_mul(da, b), _mul(a, db))
    if node.op == "/":
        return _div(_sub(_mul(da, b), _mul(a, db)), _pow(b, _num(2.0)))
    # power
    if _is_const(db, 0.0):
        return _mul(_mul(b, _pow(a, _sub(b, _num(1.0)))), da)
    # a^b (b' log a + b a'/a)
    return _mul(node, _add(_mul(db, Call("log", (a,))), _div(_mul(b, da), a)))


# }}}


# {{{ function specs


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """A parsed function on a declared interval ``[a, b]`` (``b`` may be ``inf``).

    ``inverse`` and ``derivative_expr`` may be supplied in closed form (the
    catalog does); otherwise the derivative is derived symbolically and
    inversion is numeric.
    """

    expr: Expression
    a: float = 0.0
    b: float = 1.0
    name: str = ""
    inverse: Callable[[float], float] | None = None
    derivative_expr: Expression | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")
        if self.derivative_expr is None:
            object.__setattr__(self, "derivative_expr", differentiate(self.expr))

    @classmethod
    def from_string(cls, src: str, a: float = 0.0, b: float = 1.0) -> FunctionSpec:
        return cls(parse(src), a=a, b=b, name=src)

    def __call__(self, x):
        out = evaluate(self.expr, x)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, x):
        out = evaluate(self.derivative_expr, x)
        return float(out) if np.ndim(out) == 0 else out

    def __str__(self) -> str:
        return self.name or to_string(self.expr)

    def shifted(self, c: float) -> FunctionSpec:
        """Return ``x -> self(x) - c`` sharing derivative and (shifted) inverse."""
        inv = self.inverse
        return FunctionSpec(
            BinOp("-", self.expr, _num(c)),
            a=self.a,
            b=self.b,
            name=f"({self})-{c!r}",
            inverse=None if inv is None else (lambda y, inv=inv, c=c: inv(y + c)),
            derivative_expr=self.derivative_expr,
        )

    def screen_interval(self) -> tuple[float, float]:
        b = self.b if math.isfinite(self.b) else self.a + 100.0 * max(1.0, abs(self.a))
        return self.a, b

    def monotonicity(self) -> str:
        """``"increasing"``, ``"decreasing"`` or ``"none"`` on a 1024-point screen."""
        if "mono" not in self._cache:
            lo, hi = self.screen_interval()
            xs = np.linspace(lo, hi, SCREEN_POINTS)
            try:
                d = np.diff(self(xs))
            except EvalDomainError:
                # endpoints may sit on a domain boundary (e.g. log at 0)
                xs = xs[1:-1]
                d = np.diff(self(xs))
            if np.all(d > 0):
                verdict = "increasing"
            elif np.all(d < 0):
                verdict = "decreasing"
            else:
                verdict = "none"
            self._cache["mono"] = verdict
        return self._cache["mono"]

    def image(self) -> tuple[float, float]:
        """Interval ``[min g, max g]`` over ``[a, b]`` (monotone specs only)."""
        ends = [self(self.a), self(self.b) if math.isfinite(self.b) else None]
        if ends[1] is None:
            sign = 1.0 if self.monotonicity() == "increasing" else -1.0
            ends[1] = sign * math.inf
        return min(ends), max(ends)


def derivative(spec: FunctionSpec, x):
    """Value of the symbolic derivative of ``spec`` at ``x``."""
    return spec.derivative(x)


def invert_monotone(spec: FunctionSpec, y: float, tol: float = 1e-12) -> float:
    """Solve ``g(x) = y`` on ``[a, b]`` for a monotone ``g``.

    Bracketed bisection down to a width of ``1e-12 (b - a)``, then at most
    five Newton steps kept inside the bracket.  A closed-form inverse, when
    present, is used directly.

    Raises
    ------
    OutOfRange
        if ``y`` is outside the image of ``[a, b]``.
    InversionFailure
        if the result misses ``|g(x) - y| <= tol (1 + |y|)``.
    NonMonotoneSamples
        if the monotonicity screen fails.
    """
    mono = spec.monotonicity()
    if mono == "none":
        raise NonMonotoneSamples(f"{spec} is not monotone on [{spec.a}, {spec.b}]")
    lo_y, hi_y = spec.image()
    slack = tol * (1.0 + abs(y))
    if not (lo_y - slack <= y <= hi_y + slack):
        raise OutOfRange(f"{y!r} is outside the image [{lo_y!r}, {hi_y!r}]")
    if spec.inverse is not None:
        x = float(spec.inverse(y))
        return min(max(x, spec.a), spec.b)

    sign = 1.0 if mono == "increasing" else -1.0
    lo = spec.a
    hi = spec.b
    if not math.isfinite(hi):
        hi = spec.a + max(1.0, abs(spec.a))
        while sign * (spec(hi) - y) < 0:
            hi = spec.a + 2.0 * (hi - spec.a)
            if hi > 1e300:
                raise InversionFailure("could not bracket the root")
    width = 1e-12 * (hi - lo)
    for _ in range(200):
        if hi - lo <= width:
            break
        mid = 0.5 * (lo + hi)
        if sign * (spec(mid) - y) < 0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(5):
        r = spec(x) - y
        if abs(r) <= 2.0 * np.finfo(float).eps * (1.0 + abs(y)):
            break
        try:
            d = spec.derivative(x)
        except EvalDomainError:
            break
        if d == 0 or not math.isfinite(d):
            break
        step = x - r / d
        if not lo <= step <= hi:
            break
        x = step
    if not abs(spec(x) - y) <= slack:
        raise InversionFailure(f"inversion of {spec} at {y!r} did not converge")
    return x


def _power_spec(beta: float, sign: float, a: float, b: float, name: str) -> FunctionSpec:
    expr = BinOp("^", Var(), _num(beta))
    dexpr = _mul(_num(beta), _pow(Var(), _num(beta - 1.0)))
    if sign < 0:
        expr, dexpr = Neg(expr), _neg(dexpr)
    return FunctionSpec(
        expr,
        a=a,
        b=b,
        name=name,
        inverse=lambda u: (sign * u) ** (1.0 / beta),
        derivative_expr=dexpr,
    )


def catalog(name: str, a: float | None = None, b: float | None = None, **params) -> FunctionSpec:
    """Prebuilt specs with exact derivative and closed-form inverse.

    ``power-beta`` (``x^beta``), ``neg-power-beta`` (``-x^beta``),
    ``identity``, ``monomial`` (``x^p``) and ``expfun`` (``exp(x)``).
    Power families default to ``[0, inf)``, the others to ``[0, 1]``.
    """
    if name in ("power-beta", "neg-power-beta"):
        beta = float(params.get("beta", 1.0))
        if beta <= 0:
            raise ValueError("beta must be positive")
        sign = 1.0 if name == "power-beta" else -1.0
        label = f"{'' if sign > 0 else '-'}x^{_fmt_num(beta)}"
        return _power_spec(beta, sign, 0.0 if a is None else a, math.inf if b is None else b, label)
    if name == "identity":
        return FunctionSpec(Var(), a=0.0 if a is None else a, b=1.0 if b is None else b,
                            name="x", inverse=lambda u: u, derivative_expr=_num(1.0))
    if name == "monomial":
        p = float(params.get("p", 1.0))
        return _power_spec(p, 1.0, 0.0 if a is None else a, 1.0 if b is None else b, f"x^{_fmt_num(p)}")
    if name == "expfun":
        expr = Call("exp", (Var(),))
        return FunctionSpec(expr, a=0.0 if a is None else a, b=1.0 if b is None else b,
                            name="exp(x)", inverse=math.log, derivative_expr=expr)
    raise UnknownCatalogEntry(name)


# }}}
