"""Exact complex scalars and univariate polynomials over Q.

Polynomials are tuples of :class:`fractions.Fraction` in ascending order
(``p[i]`` multiplies ``x**i``) with trailing zeros stripped, so the zero
polynomial is ``()``.  Real-root isolation uses Sturm sequences on the
square-free part and bisection on rational endpoints.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

Poly = tuple  # tuple[Fraction, ...]


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and rational strings to a Fraction.

    Floats are refused: they are almost never the rational the caller meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True, eq=False)
class ComplexRational:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", as_fraction(self.re))
        object.__setattr__(self, "im", as_fraction(self.im))

    @classmethod
    def of(cls, value) -> "ComplexRational":
        if isinstance(value, ComplexRational):
            return value
        if isinstance(value, complex):
            raise TypeError("complex floats are not exact; build from rationals")
        return cls(as_fraction(value), Fraction(0))

    @classmethod
    def from_complex(cls, z: complex, tol: float) -> "ComplexRational":
        """Nearest small-denominator rational approximation within ``tol``."""
        z = complex(z)
        return cls(_rationalize(z.real, tol), _rationalize(z.imag, tol))

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash(self.re) if not self.im else hash((self.re, self.im))

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return ComplexRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return ComplexRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return ComplexRational(self.re * o.re - self.im * o.im,
                               self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("division by complex zero")
        n = self * o.conjugate()
        return ComplexRational(n.re / d, n.im / d)

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self):
        return format_complex(self)

    def __repr__(self):
        return f"ComplexRational({self})"


def _coerce(value):
    if isinstance(value, ComplexRational):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return ComplexRational(Fraction(value))
    return NotImplemented


def _rationalize(x: float, tol: float) -> Fraction:
    if not math.isfinite(x):
        raise ValueError(f"cannot rationalize {x!r}")
    exact = Fraction(x)
    den = 1
    while True:
        cand = exact.limit_denominator(den)
        if abs(float(cand) - x) <= tol:
            return cand
        den *= 2


ZERO = ComplexRational(0, 0)
ONE = ComplexRational(1, 0)
I = ComplexRational(0, 1)


def format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_complex(z: ComplexRational) -> str:
    """Text form accepted back by the operator parser, e.g. ``(1+3/2i)``."""
    if z.im == 0:
        return format_fraction(z.re)
    im = format_fraction(abs(z.im)) + "i"
    if z.re == 0:
        return ("-" if z.im < 0 else "") + im
    sign = "-" if z.im < 0 else "+"
    return f"({format_fraction(z.re)}{sign}{im})"


# ----------------------------------------------------------------------
# rational polynomials
# ----------------------------------------------------------------------

def poly(coeffs: Iterable) -> Poly:
    out = [as_fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def degree(p: Poly) -> int:
    return len(p) - 1  # -1 for the zero polynomial


def padd(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return poly((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                for i in range(n))


def pscale(p: Poly, c) -> Poly:
    c = as_fraction(c)
    return poly(c * a for a in p)


def psub(p: Poly, q: Poly) -> Poly:
    return padd(p, pscale(q, -1))


def pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly(out)


def pdivmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq = len(q) - 1
    lead = q[-1]
    quot = [Fraction(0)] * max(len(p) - dq, 0)
    while len(r) - 1 >= dq and r:
        shift = len(r) - 1 - dq
        c = r[-1] / lead
        quot[shift] = c
        for j, b in enumerate(q):
            r[shift + j] -= c * b
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return poly(quot), poly(r)


def monic(p: Poly) -> Poly:
    return pscale(p, 1 / p[-1]) if p else p


def pgcd(p: Poly, q: Poly) -> Poly:
    """Monic greatest common divisor (``()`` only if both are zero)."""
    a, b = poly(p), poly(q)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return monic(a)


def pderiv(p: Poly) -> Poly:
    return poly(i * p[i] for i in range(1, len(p)))


@lru_cache(maxsize=8192)
def _int_form(p: Poly) -> tuple[tuple, int]:
    """Integer coefficients and the common denominator they were scaled by."""
    L = math.lcm(*(c.denominator for c in p)) if p else 1
    return tuple(c.numerator * (L // c.denominator) for c in p), L


def _homogeneous(p: Poly, x) -> tuple[int, int]:
    """p(x) = num / den with den > 0, by Horner in integers."""
    a, L = _int_form(p)
    if not a:
        return 0, 1
    n, d = x.numerator, x.denominator
    acc, dp = a[-1], 1
    for c in reversed(a[:-1]):
        dp *= d
        acc = acc * n + c * dp
    return acc, L * dp


def peval(p: Poly, x) -> Fraction:
    if isinstance(x, Rational) and all(isinstance(c, Rational) for c in p):
        return Fraction(*_homogeneous(p, x))
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def psign(p: Poly, x) -> int:
    """Sign of p at a rational point."""
    v = _homogeneous(p, x)[0]
    return (v > 0) - (v < 0)


def peval_float(p: Sequence, x):
    """Horner evaluation on floats or numpy arrays."""
    acc = 0.0 * x
    for c in reversed(p):
        acc = acc * x + float(c)
    return acc


def squarefree(p: Poly) -> Poly:
    if degree(p) < 1:
        return monic(p)
    return monic(pdivmod(p, pgcd(p, pderiv(p)))[0])


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, pderiv(p)]
    while seq[-1]:
        r = pdivmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append(pscale(r, -1))
    return seq


def _variations(seq: list[Poly], x: Fraction) -> int:
    signs = [s for s in (psign(f, x) for f in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def cauchy_bound(p: Poly) -> Fraction:
    """Every complex root satisfies ``|z| < bound``."""
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def count_roots(p: Poly, lo, hi) -> int:
    """Number of distinct real roots of ``p`` in the closed interval [lo, hi]."""
    lo, hi = as_fraction(lo), as_fraction(hi)
    if degree(p) < 1:
        if not p:
            raise ValueError("zero polynomial has infinitely many roots")
        return 0
    if lo > hi:
        return 0
    sf = squarefree(p)
    if lo == hi:
        return int(peval(sf, lo) == 0)
    seq = sturm_sequence(sf)
    n = 0
    if peval(sf, lo) == 0:
        n += 1
    # Sturm counts (lo, hi]; lo root already handled above
    return n + _variations(seq, lo) - _variations(seq, hi)


def has_real_root(p: Poly) -> bool:
    if degree(p) < 1:
        return False
    b = cauchy_bound(p)
    return count_roots(p, -b, b) > 0


def isolate_real_roots(p: Poly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals, each holding exactly one distinct real root.

    Exact rational roots met during bisection are returned as ``(r, r)``.
    Open intervals ``(lo, hi)`` never have a root at an endpoint.
    """
    if degree(p) < 1:
        return []
    sf = squarefree(p)
    seq = sturm_sequence(sf)
    b = cauchy_bound(sf)
    out = []
    stack = [(-b, b)]
    while stack:
        lo, hi = stack.pop()
        n = _variations(seq, lo) - _variations(seq, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if peval(sf, mid) == 0:
            out.append((mid, mid))
            delta = (hi - lo) / 4
            while _variations(seq, mid - delta) - _variations(seq, mid + delta) != 1 \
                    or peval(sf, mid - delta) == 0 or peval(sf, mid + delta) == 0:
                delta /= 2
            stack.append((lo, mid - delta))
            stack.append((mid + delta, hi))
        else:
            stack.append((lo, mid))
            stack.append((mid, hi))
    return sorted(out)


def refine_root(p: Poly, lo, hi, width) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval of ``p`` until ``hi - lo <= width``."""
    lo, hi, width = as_fraction(lo), as_fraction(hi), as_fraction(width)
    if lo == hi:
        return lo, hi
    sf = squarefree(p)
    flo = psign(sf, lo)
    if flo == 0:
        return lo, lo
    if psign(sf, hi) == 0:
        return hi, hi
    # square-free with one simple root inside: the sign changes across it
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = psign(sf, mid)
        if fm == 0:
            return mid, mid
        if fm == flo:
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


def interval_eval(p: Poly, lo, hi) -> tuple[Fraction, Fraction]:
    """Rational enclosure of ``p`` over [lo, hi] by interval Horner."""
    lo, hi = as_fraction(lo), as_fraction(hi)
    a = b = Fraction(0)
    for c in reversed(p):
        prods = (a * lo, a * hi, b * lo, b * hi)
        a, b = min(prods) + c, max(prods) + c
    return a, b


def eventual_bound(p: Poly, level) -> int:
    """Smallest power of two K with ``p(k) > level`` whenever ``|k| > K``.

    ``p`` must tend to ``+inf`` in both directions (even degree, positive
    leading coefficient).
    """
    d = degree(p)
    if d < 2 or d % 2 or p[-1] <= 0:
        raise ValueError("polynomial does not tend to +inf at both ends")
    c = p[-1]
    s = sum((abs(x) for x in p[:-1]), Fraction(0))
    level = as_fraction(level)
    K = 1
    while not (c * K > s and c * K ** d - s * K ** (d - 1) > level):
        K *= 2
    return K


def abs_eventual_bound(p: Poly, level) -> int:
    """Smallest power of two K with ``|p(k)| > level`` whenever ``|k| > K``."""
    d = degree(p)
    if d < 1:
        raise ValueError("constant polynomial")
    c = abs(p[-1])
    s = sum((abs(x) for x in p[:-1]), Fraction(0))
    level = max(as_fraction(level), Fraction(0))
    K = 1
    while not (c * K > s and c * K ** d - s * K ** (d - 1) > level):
        K *= 2
    return K


def sqrt_lower(q: Fraction, bits: int = 60) -> Fraction:
    """Rational r with r*r <= q, exact when q is a perfect rational square."""
    q = as_fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    scale = 1 << bits
    # floor(sqrt(n*d) * scale) / (d * scale) <= sqrt(n/d)
    return Fraction(math.isqrt(n * d * scale * scale), d * scale)


# ----------------------------------------------------------------------
# complex-rational polynomials, stored as lists of ComplexRational
# ----------------------------------------------------------------------

def cpoly(coeffs: Iterable) -> tuple:
    out = [ComplexRational.of(c) for c in coeffs]
    while out and not out[-1]:
        out.pop()
    return tuple(out)


def real_part(cp: Sequence[ComplexRational]) -> Poly:
    return poly(c.re for c in cp)


def imag_part(cp: Sequence[ComplexRational]) -> Poly:
    return poly(c.im for c in cp)


def ceval(cp: Sequence[ComplexRational], x) -> ComplexRational:
    acc = ZERO
    x = ComplexRational.of(x)
    for c in reversed(cp):
        acc = acc * x + c
    return acc


def ceval_complex(cp: Sequence[ComplexRational], x):
    """Horner on floats or arrays, returning complex values."""
    acc = 0j * x
    for c in reversed(cp):
        acc = acc * x + complex(c)
    return acc
