"""Text syntax for differential operators.

Two forms are accepted::

    Dt + (1+2i) Dx + 3/2i                  literal operator
    p(Dx)=Dx^2; q(Dt)=Dt^2+1/2             separable zero form P(xi) + Q(k)

In the literal form Dt and Dx stand for d/dt and d/dx; coefficients are
rationals (``3/2``), ``i``, ``sin(t)``, ``cos(t)`` and products or sums of
these.  A rational literal binds before ``i``, so ``1/2i`` means i/2.
Multiplication is ``*`` or juxtaposition; ``^`` takes a nonnegative integer.
In the separable form ``Dx`` and ``Dt`` are the polynomial variables xi and k.

Every parsed text normalizes to exactly one operator variant or raises
:class:`ParseError` (syntax, with a byte offset and the expected tokens) or
:class:`NormalizeError` (well-formed text outside the supported classes).
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .core import (FirstOrderConstant, FirstOrderVariable, OperatorError,
                   SeparablePoly, TrigPolynomial)
from .rational import I, ONE, ZERO, ComplexRational, cpoly, imag_part

__all__ = ["ParseError", "NormalizeError", "RationalizeWarning", "OperatorSpecAST", "parse_ast",
           "normalize", "parse_operator", "pretty"]


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at byte {offset}{detail}")

    def to_json(self) -> dict:
        return {"error": "parse", "message": str(self), "offset": self.offset,
                "expected": list(self.expected)}


class RationalizeWarning(UserWarning):
    """A decimal literal was replaced by a nearby rational."""


class NormalizeError(ValueError):
    def __init__(self, message: str, offset: int = 0):
        self.offset = offset
        super().__init__(message)

    def to_json(self) -> dict:
        return {"error": "normalize", "message": str(self), "offset": self.offset}


# ----------------------------------------------------------------------
# AST
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: ComplexRational
    offset: int


@dataclass(frozen=True)
class Trig:
    name: str  # "sin" or "cos"
    offset: int


@dataclass(frozen=True)
class Deriv:
    var: str  # "t" or "x"
    offset: int


@dataclass(frozen=True)
class Neg:
    arg: "Node"
    offset: int


@dataclass(frozen=True)
class Add:
    terms: tuple
    offset: int


@dataclass(frozen=True)
class Mul:
    factors: tuple
    offset: int


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: int
    offset: int


Node = Union[Num, Trig, Deriv, Neg, Add, Mul, Pow]


@dataclass(frozen=True)
class OperatorSpecAST:
    """Either a literal expression or the two sides of a separable form."""

    kind: str  # "literal" or "separable"
    expr: Optional[Node] = None
    p: Optional[Node] = None
    q: Optional[Node] = None
    text: str = ""


# ----------------------------------------------------------------------
# lexer
# ----------------------------------------------------------------------

_TOKENS = [
    ("SIN", r"sin\s*\(\s*t\s*\)"),
    ("COS", r"cos\s*\(\s*t\s*\)"),
    ("DT", r"Dt"),
    ("DX", r"Dx"),
    ("NUM", r"\d+(?:\.\d+)?(?:\s*/\s*\d+)?"),
    ("I", r"i"),
    ("OP", r"[-+*^()]"),
    ("WS", r"\s+"),
]
_LEX = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKENS))
_SEPARABLE = re.compile(r"^\s*p\s*\(\s*Dx\s*\)\s*=(?P<p>[^;]*);\s*q\s*\(\s*Dt\s*\)\s*=(?P<q>.*)$",
                        re.S)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int  # character position


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _lex(text: str, start: int, end: int, full: str) -> list[_Tok]:
    toks, pos = [], start
    while pos < end:
        m = _LEX.match(full, pos, end)
        if m is None:
            raise ParseError(f"unexpected character {full[pos]!r}", _byte_offset(full, pos),
                             ("number", "i", "Dt", "Dx", "sin(t)", "cos(t)", "(", "+", "-"))
        kind = m.lastgroup
        if kind == "OP":
            kind = m.group()
        if kind != "WS":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("EOF", "", end))
    return toks


def _number(tok: _Tok, full: str, rationalize: Optional[float]) -> Fraction:
    text = re.sub(r"\s+", "", tok.text)
    num, _, den = text.partition("/")
    if "." in num:
        if rationalize is None:
            raise ParseError(f"decimal literal {num!r} needs a rationalize tolerance",
                             _byte_offset(full, tok.pos))
        value = _rationalize(float(num), rationalize)
        warnings.warn(f"decimal {num} read as {value} (tolerance {rationalize:g})",
                      RationalizeWarning, stacklevel=2)
    else:
        value = Fraction(int(num))
    if den:
        if int(den) == 0:
            raise ParseError("zero denominator", _byte_offset(full, tok.pos))
        value /= int(den)
    return value


def _rationalize(v: float, tol: float) -> Fraction:
    """Simplest fraction within ``tol`` of ``v``."""
    if tol <= 0:
        raise ValueError("rationalize tolerance must be positive")
    d = 1
    while True:
        r = Fraction(v).limit_denominator(d)
        if abs(float(r) - v) <= tol:
            return r
        d *= 2


# ----------------------------------------------------------------------
# recursive descent
# ----------------------------------------------------------------------

_ATOM_START = {"NUM", "I", "DT", "DX", "SIN", "COS", "("}


class _Parser:
    def __init__(self, full: str, start: int, end: int, rationalize: Optional[float]):
        self.full = full
        self.toks = _lex(full, start, end, full)
        self.i = 0
        self.rationalize = rationalize

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def off(self, tok: Optional[_Tok] = None) -> int:
        return _byte_offset(self.full, (tok or self.tok).pos)

    def fail(self, expected):
        t = self.tok
        what = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(f"unexpected {what}", self.off(), expected)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "EOF":
            self.fail({"+", "-", "*", "^", "end of input"} | (_ATOM_START - {"NUM"}) | {"number"})
        return node

    def expr(self) -> Node:
        start = self.off()
        terms = [self.signed()]
        while self.tok.kind in ("+", "-"):
            op = self.tok
            self.i += 1
            t = self.signed()
            terms.append(Neg(t, self.off(op)) if op.kind == "-" else t)
        return terms[0] if len(terms) == 1 else Add(tuple(terms), start)

    def signed(self) -> Node:
        if self.tok.kind in ("+", "-"):
            op = self.tok
            self.i += 1
            inner = self.signed()
            return Neg(inner, self.off(op)) if op.kind == "-" else inner
        return self.term()

    def term(self) -> Node:
        start = self.off()
        factors = [self.power()]
        while True:
            if self.tok.kind == "*":
                self.i += 1
                factors.append(self.signed_power())
            elif self.tok.kind in _ATOM_START:
                factors.append(self.power())
            else:
                break
        return factors[0] if len(factors) == 1 else Mul(tuple(factors), start)

    def signed_power(self) -> Node:
        if self.tok.kind == "-":
            op = self.tok
            self.i += 1
            return Neg(self.signed_power(), self.off(op))
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.kind == "^":
            op = self.tok
            self.i += 1
            if self.tok.kind != "NUM" or not self.tok.text.isdigit():
                self.fail({"nonnegative integer"})
            exp = int(self.tok.text)
            self.i += 1
            return Pow(base, exp, self.off(op))
        return base

    def atom(self) -> Node:
        t = self.tok
        off = self.off()
        if t.kind == "NUM":
            self.i += 1
            return Num(ComplexRational(_number(t, self.full, self.rationalize)), off)
        if t.kind == "I":
            self.i += 1
            return Num(I, off)
        if t.kind in ("DT", "DX"):
            self.i += 1
            return Deriv("t" if t.kind == "DT" else "x", off)
        if t.kind in ("SIN", "COS"):
            self.i += 1
            return Trig(t.kind.lower(), off)
        if t.kind == "(":
            self.i += 1
            inner = self.expr()
            if self.tok.kind != ")":
                self.fail({")", "+", "-", "*"})
            self.i += 1
            return inner
        self.fail({"number", "i", "Dt", "Dx", "sin(t)", "cos(t)", "("})


def parse_ast(text: str, rationalize: Optional[float] = None) -> OperatorSpecAST:
    m = _SEPARABLE.match(text)
    if m:
        p = _Parser(text, m.start("p"), m.end("p"), rationalize).parse()
        q = _Parser(text, m.start("q"), m.end("q"), rationalize).parse()
        return OperatorSpecAST("separable", p=p, q=q, text=text)
    if ";" in text or "=" in text:
        pos = min(i for i in (text.find(";"), text.find("=")) if i >= 0)
        raise ParseError("malformed separable form", _byte_offset(text, pos),
                         ("p(Dx)=...; q(Dt)=...",))
    return OperatorSpecAST("literal", expr=_Parser(text, 0, len(text), rationalize).parse(),
                           text=text)


# ----------------------------------------------------------------------
# evaluation: dict {(t order, x order): TrigPolynomial}
# ----------------------------------------------------------------------

def _trig(name: str) -> TrigPolynomial:
    return TrigPolynomial.sin() if name == "sin" else TrigPolynomial.cos()


def _clean(terms: dict) -> dict:
    return {m: c for m, c in terms.items() if c.coeffs}


def _mul(a: dict, b: dict, offset: int) -> dict:
    if any(sum(m) > 0 for m in a) and any(not c.is_constant for c in b.values()):
        raise NormalizeError("a derivative may not act on a non-constant coefficient; "
                             "write coefficients to the left of Dt and Dx", offset)
    out: dict = {}
    for (ta, xa), ca in a.items():
        for (tb, xb), cb in b.items():
            key = (ta + tb, xa + xb)
            out[key] = out.get(key, TrigPolynomial.constant(0)) + ca * cb
    return _clean(out)


def _eval(node: Node) -> dict:
    if isinstance(node, Num):
        return _clean({(0, 0): TrigPolynomial.constant(node.value)})
    if isinstance(node, Trig):
        return {(0, 0): _trig(node.name)}
    if isinstance(node, Deriv):
        return {(1, 0) if node.var == "t" else (0, 1): TrigPolynomial.constant(1)}
    if isinstance(node, Neg):
        return {m: c * TrigPolynomial.constant(-1) for m, c in _eval(node.arg).items()}
    if isinstance(node, Add):
        out: dict = {}
        for t in node.terms:
            for m, c in _eval(t).items():
                out[m] = out.get(m, TrigPolynomial.constant(0)) + c
        return _clean(out)
    if isinstance(node, Mul):
        acc = _eval(node.factors[0])
        for f in node.factors[1:]:
            acc = _mul(acc, _eval(f), f.offset if hasattr(f, "offset") else node.offset)
        return acc
    if isinstance(node, Pow):
        base = _eval(node.base)
        acc = {(0, 0): TrigPolynomial.constant(1)}
        for _ in range(node.exp):
            acc = _mul(acc, base, node.offset)
        return acc
    raise TypeError(node)


def _const(c: TrigPolynomial, what: str, offset: int) -> ComplexRational:
    if not c.is_constant:
        raise NormalizeError(f"{what} must have a constant coefficient", offset)
    return c.mean()


def _normalize_literal(node: Node):
    terms = _eval(node)
    off = getattr(node, "offset", 0)
    if any(t and x for t, x in terms):
        raise NormalizeError("mixed Dt*Dx products are not supported", off)
    zero = TrigPolynomial.constant(0)
    t_order = max((t for t, _ in terms), default=0)
    x_order = max((x for _, x in terms), default=0)
    if t_order == 0 and x_order == 0:
        raise NormalizeError("the operator contains no derivative", off)
    if t_order <= 1 and x_order <= 1:
        c1, c2, c3 = (terms.get(m, zero) for m in ((1, 0), (0, 1), (0, 0)))
        if c1.is_constant and c2.is_constant and c3.is_constant:
            return FirstOrderConstant(c1.mean(), c2.mean(), c3.mean())
        if not (c1.is_constant and c1.mean() == ONE):
            raise NormalizeError("variable coefficients require the form Dt + a(t) Dx + q(t)", off)
        if not c2.is_real:
            raise NormalizeError("the coefficient a(t) of Dx must be real valued", off)
        return FirstOrderVariable(c2, c3)
    for m, c in terms.items():
        _const(c, "every term of a higher-order operator", off)
    return _literal_to_separable({m: c.mean() for m, c in terms.items()}, off)


def _literal_to_separable(terms: dict, off: int) -> SeparablePoly:
    # symbol = sum c_j (i xi)^j + sum d_j (i k)^j = i * (P(xi) + Q(k)) with the
    # constant placed in P; P_j = -i c_j i^j
    nx = max(x for _, x in terms) + 1
    nt = max(t for t, _ in terms) + 1
    P = [(-I) * terms.get((0, j), ZERO) * I ** (j % 4) for j in range(nx)]
    Q = [ZERO] + [(-I) * terms.get((j, 0), ZERO) * I ** (j % 4) for j in range(1, nt)]
    P, Q = cpoly(P), cpoly(Q)
    if len(P) < 2 or len(Q) < 2:
        raise NormalizeError("a higher-order operator needs both Dt and Dx terms", off)
    if not imag_part(P) or not imag_part(Q):
        return SeparablePoly(P, Q)
    # rotate the form by a constant so that one side is real
    for lead in (Q[-1], P[-1]):
        lam = ONE / lead
        sP = cpoly(lam * c for c in P)
        sQ = cpoly(lam * c for c in Q)
        if not imag_part(sP) or not imag_part(sQ):
            return SeparablePoly(sP, sQ, scale=lead)
        # the constant may sit on either side
        c0 = sP[0]
        sP2 = cpoly((ZERO,) + tuple(sP[1:]))
        sQ2 = cpoly((sQ[0] + c0,) + tuple(sQ[1:]))
        if not imag_part(sQ2) or (len(sP2) >= 2 and not imag_part(sP2)):
            return SeparablePoly(sP2, sQ2, scale=lead)
    raise NormalizeError("no constant multiple of this operator has a zero form with a "
                         "real side; the separable decision does not apply", off)


def _side_poly(node: Node, var: str, name: str) -> tuple:
    terms = _eval(node)
    other = "t" if var == "x" else "x"
    out = {}
    for (t, x), c in terms.items():
        if (t if other == "t" else x):
            raise NormalizeError(f"{name} may only use D{var}", getattr(node, "offset", 0))
        out[x if var == "x" else t] = _const(c, name, getattr(node, "offset", 0))
    n = max(out, default=-1) + 1
    return cpoly(out.get(j, ZERO) for j in range(n))


def normalize(ast: OperatorSpecAST):
    """Map an AST to FirstOrderConstant, FirstOrderVariable or SeparablePoly."""
    if ast.kind == "separable":
        p = _side_poly(ast.p, "x", "p(Dx)")
        q = _side_poly(ast.q, "t", "q(Dt)")
        try:
            return SeparablePoly(p, q)
        except OperatorError as exc:
            raise NormalizeError(str(exc)) from None
    try:
        return _normalize_literal(ast.expr)
    except OperatorError as exc:
        raise NormalizeError(str(exc)) from None


def parse_operator(text: str, rationalize: Optional[float] = None):
    return normalize(parse_ast(text, rationalize))


def pretty(op) -> str:
    """Canonical text; parse_operator(pretty(op)) == op for parsed operators."""
    return op.to_text()
