"""Expression trees for right-hand sides ``f_i(x1, ..., xn)``.

A small recursive-descent parser turns text such as ``mu*(1-x1^2)*x2 - x1``
into an immutable AST. Evaluation is vectorised: state variables may be
scalars or numpy arrays of a common shape, which is what the quadrature and
the RK4 integrator feed in.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-x1^2``
means ``-(x1^2)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import ArityError, DomainError, ExprSyntaxError, UnknownSymbol

__all__ = [
    "Expr", "Num", "Var", "Param", "Neg", "BinOp", "Call",
    "FUNCTIONS", "parse_expr", "to_string", "evaluate", "evaluate_array",
    "substitute", "variables", "parameters", "uses_function", "is_linear",
    "additive_terms",
]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Param, Neg, BinOp, Call]

# name -> arity; all are unary
FUNCTIONS = {"sin": 1, "cos": 1, "tan": 1, "exp": 1, "ln": 1, "sqrt": 1, "abs": 1}
CONSTANTS = {"pi": math.pi}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)
_VAR_RE = re.compile(r"x([1-9]\d*)$")


def _tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", start,
                                  {"NUMBER", "IDENT", "(", "-"})
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, n, params, aliases):
        self.tokens = _tokenize(text)
        self.i = 0
        self.n = n
        self.params = params
        self.aliases = aliases

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.peek()
        if val != value or kind != "op":
            raise ExprSyntaxError(f"unexpected {val or 'end of input'!r}", pos, {value})
        self.take()

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ExprSyntaxError(f"unexpected {val!r}", pos, {"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.peek()[0:2] == ("op", "-"):
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.factor())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            if self.peek()[0:2] == ("op", "("):
                if val not in FUNCTIONS:
                    raise UnknownSymbol(val, pos)
                self.take()
                args = [self.expr()]
                while self.peek()[0:2] == ("op", ","):
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[val]:
                    raise ArityError(val, FUNCTIONS[val], len(args))
                return Call(val, args[0])
            return self.symbol(val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected {val or 'end of input'!r}", pos, {"NUMBER", "IDENT", "(", "-"})

    def symbol(self, name, pos):
        if name in self.aliases:
            return Var(self.aliases[name])
        m = _VAR_RE.match(name)
        if m:
            idx = int(m.group(1)) - 1
            if idx < self.n:
                return Var(idx)
            raise UnknownSymbol(name, pos)
        if name in self.params:
            return Param(name)
        if name in CONSTANTS:
            return Num(CONSTANTS[name])
        if name in FUNCTIONS:
            raise ExprSyntaxError(f"function {name!r} used without arguments", pos, {"("})
        raise UnknownSymbol(name, pos)


def parse_expr(text: str, n: int, params: Sequence[str] = ()) -> Expr:
    """Parse one right-hand side for an ``n``-state system.

    ``x`` and ``xdot`` are accepted as aliases of ``x1`` and ``x2`` when
    ``n == 2``.
    """
    aliases = {"x": 0, "xdot": 1} if n == 2 else {}
    return _Parser(text, n, frozenset(params), aliases).parse()


# -- serialisation -----------------------------------------------------------

def to_string(e: Expr) -> str:
    """Fully parenthesised text that parses back to an equivalent tree."""
    match e:
        case Num(v):
            return repr(v) if v >= 0 else f"(-{repr(-v)})"
        case Var(i):
            return f"x{i + 1}"
        case Param(name):
            return name
        case Neg(a):
            return f"(-{to_string(a)})"
        case BinOp(op, a, b):
            return f"({to_string(a)} {op} {to_string(b)})"
        case Call(f, a):
            return f"{f}({to_string(a)})"
    raise TypeError(f"not an expression: {e!r}")


# -- evaluation --------------------------------------------------------------

def _power(base, expo, node):
    base = np.asarray(base, dtype=float)
    expo = np.asarray(expo, dtype=float)
    integral = np.equal(np.mod(expo, 1.0), 0.0)
    if np.any((base < 0) & ~integral):
        raise DomainError("real exponent of a negative base", to_string(node))
    if np.any((base == 0) & (expo < 0)):
        raise DomainError("division by zero", to_string(node))
    return np.power(base, expo)


def _call(func, x, node):
    if func == "ln":
        if np.any(x <= 0):
            raise DomainError("ln of a non-positive value", to_string(node))
        return np.log(x)
    if func == "sqrt":
        if np.any(x < 0):
            raise DomainError("sqrt of a negative value", to_string(node))
        return np.sqrt(x)
    return _UFUNCS[func](x)


_UFUNCS = {"sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "abs": np.abs}


def _eval(e, xs, params):
    match e:
        case Num(v):
            return np.float64(v)
        case Var(i):
            return xs[i]
        case Param(name):
            return np.float64(params[name])
        case Neg(a):
            return -_eval(a, xs, params)
        case BinOp(op, a, b):
            left = _eval(a, xs, params)
            right = _eval(b, xs, params)
            if op == "+":
                return left + right
            if op == "-":
                return left - right
            if op == "*":
                return left * right
            if op == "/":
                if np.any(right == 0):
                    raise DomainError("division by zero", to_string(e))
                return left / right
            return _power(left, right, e)
        case Call(f, a):
            return _call(f, _eval(a, xs, params), e)
    raise TypeError(f"not an expression: {e!r}")


def evaluate_array(e: Expr, xs: Sequence, params: Mapping[str, float] | None = None) -> np.ndarray:
    """Evaluate on broadcastable arrays; ``xs[i]`` holds state ``x_{i+1}``."""
    with np.errstate(all="ignore"):
        out = _eval(e, xs, params or {})
    return np.asarray(out, dtype=float)


def evaluate(e: Expr, state: Sequence[float], params: Mapping[str, float] | None = None) -> float:
    xs = [np.float64(v) for v in state]
    missing = [i for i in variables(e) if i >= len(xs)]
    if missing:
        raise UnknownSymbol(f"x{missing[0] + 1}")
    return float(evaluate_array(e, xs, params))


# -- tree utilities ----------------------------------------------------------

def substitute(e: Expr, mapping: Mapping[int, Expr]) -> Expr:
    """Replace ``Var(i)`` by ``mapping[i]`` wherever present."""
    match e:
        case Var(i):
            return mapping.get(i, e)
        case Neg(a):
            return Neg(substitute(a, mapping))
        case BinOp(op, a, b):
            return BinOp(op, substitute(a, mapping), substitute(b, mapping))
        case Call(f, a):
            return Call(f, substitute(a, mapping))
    return e


def _walk(e):
    yield e
    match e:
        case Neg(a) | Call(_, a):
            yield from _walk(a)
        case BinOp(_, a, b):
            yield from _walk(a)
            yield from _walk(b)


def variables(e: Expr) -> set[int]:
    return {node.index for node in _walk(e) if isinstance(node, Var)}


def parameters(e: Expr) -> set[str]:
    return {node.name for node in _walk(e) if isinstance(node, Param)}


def uses_function(e: Expr, name: str) -> bool:
    return any(isinstance(node, Call) and node.func == name for node in _walk(e))


def additive_terms(e: Expr) -> list[Expr]:
    """Split a top-level sum/difference into its terms (signs dropped)."""
    match e:
        case BinOp("+" | "-", a, b):
            return additive_terms(a) + additive_terms(b)
        case Neg(a):
            return additive_terms(a)
    return [e]


def is_linear(e: Expr) -> bool:
    """True when ``e`` is affine in the state variables (structural check)."""
    return _degree(e) <= 1


def _degree(e):
    # 0 constant, 1 linear, 2 anything nonlinear
    match e:
        case Num() | Param():
            return 0
        case Var():
            return 1
        case Neg(a):
            return _degree(a)
        case BinOp("+" | "-", a, b):
            return max(_degree(a), _degree(b))
        case BinOp("*", a, b):
            return min(_degree(a) + _degree(b), 2)
        case BinOp("/", a, b):
            return _degree(a) if _degree(b) == 0 else 2
        case BinOp("^", a, b):
            return 0 if _degree(a) == 0 and _degree(b) == 0 else 2
        case Call(_, a):
            return 0 if _degree(a) == 0 else 2
    return 2
