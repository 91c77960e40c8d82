"""Grids, sampled fields, spectra and operator descriptions on the cylinder.

The cylinder is T^1 x R with t in [0, 2pi) periodic and x truncated to
[-X, X).  The dual lattice is k in {-n_t/2, ..., n_t/2 - 1} and
xi_m = (pi / X) m for m in {-n_x/2, ..., n_x/2 - 1}.  Every spectrum is
stored in ascending (centered) order along its transformed axes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .rational import (ONE, ZERO, ComplexRational, I, cpoly, format_complex,
                       format_fraction, imag_part)


class GridError(ValueError):
    pass


class OperatorError(ValueError):
    """An operator description violates the invariants of its variant."""


@dataclass(frozen=True)
class CylinderGrid:
    """Uniform grid on T^1 x [-X, X) together with its dual lattice."""

    n_t: int
    n_x: int
    X: float

    def __post_init__(self):
        for name in ("n_t", "n_x"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
                raise GridError(f"{name} must be an integer, got {n!r}")
            if n < 4 or n % 2:
                raise GridError(f"{name} must be even and >= 4, got {n}")
            object.__setattr__(self, name, int(n))
        X = float(self.X)
        if not math.isfinite(X) or X <= 0:
            raise GridError(f"half width X must be positive, got {self.X!r}")
        object.__setattr__(self, "X", X)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_t, self.n_x)

    @property
    def dt(self) -> float:
        return 2 * math.pi / self.n_t

    @property
    def dx(self) -> float:
        return 2 * self.X / self.n_x

    @property
    def dxi(self) -> float:
        return math.pi / self.X

    @property
    def xi_max(self) -> float:
        return math.pi * self.n_x / (2 * self.X)

    @property
    def t(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_t) / self.n_t

    @property
    def x(self) -> np.ndarray:
        return -self.X + self.dx * np.arange(self.n_x)

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.n_t // 2, self.n_t // 2)

    @property
    def m(self) -> np.ndarray:
        return np.arange(-self.n_x // 2, self.n_x // 2)

    @property
    def xi(self) -> np.ndarray:
        return self.dxi * self.m

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical mesh ``(T, X)`` indexed ``[l, j]``."""
        return np.meshgrid(self.t, self.x, indexing="ij")

    def dual_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Dual mesh ``(K, XI)`` indexed ``[k, m]`` in centered order."""
        return np.meshgrid(self.k, self.xi, indexing="ij")

    def to_json(self) -> dict:
        return {"n_t": self.n_t, "n_x": self.n_x, "X": self.X}


def make_grid(n_t: int, n_x: int, X: float) -> CylinderGrid:
    return CylinderGrid(n_t, n_x, X)


class Kind(enum.IntEnum):
    """Kind byte of the shared binary format."""

    FIELD = 0
    TORUS = 1
    LINE = 2
    MIXED = 3


@dataclass(frozen=True, eq=False)
class _GridArray:
    grid: CylinderGrid
    values: np.ndarray
    kind = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.shape != self.grid.shape:
            raise GridError(f"values have shape {vals.shape}, grid expects {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise GridError("values contain non-finite entries")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __repr__(self):
        return f"{type(self).__name__}(grid={self.grid!r})"

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


class SampledField(_GridArray):
    """Point samples ``values[l, j] = f(t_l, x_j)``."""

    kind = Kind.FIELD


class TorusSpectrum(_GridArray):
    """``values[k, j] = f^(k, x_j)``, k ascending."""

    kind = Kind.TORUS


class LineSpectrum(_GridArray):
    """``values[l, m] = f^(t_l, xi_m)``, m ascending."""

    kind = Kind.LINE


class MixedSpectrum(_GridArray):
    """``values[k, m] = f~(k, xi_m)``, both axes ascending."""

    kind = Kind.MIXED


KIND_CLASSES = {Kind.FIELD: SampledField, Kind.TORUS: TorusSpectrum,
                Kind.LINE: LineSpectrum, Kind.MIXED: MixedSpectrum}


# ----------------------------------------------------------------------
# builtin test functions
# ----------------------------------------------------------------------

BUILTINS = ("gaussian_wave", "plane_wave", "lorentz_wave", "tanbump",
            "constant_one", "zero")


_BUILTIN_PARAMS = {"gaussian_wave": {"k0"}, "plane_wave": {"k0", "xi0"}, "lorentz_wave": {"k0"}}


def _int_param(params, name, default):
    v = params.get(name, default)
    if isinstance(v, float) and v.is_integer():
        v = int(v)
    if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
        raise ValueError(f"{name} must be an integer (periodicity in t), got {v!r}")
    return int(v)


def tanbump_values(grid: CylinderGrid) -> np.ndarray:
    """Samples of tan(t) exp(-1 / (1 - (x - tan t)^2)) on |x - tan t| < 1."""
    n = grid.n_t
    l = np.arange(n)
    # cos t = 0 exactly when 4l/n_t is an odd integer
    pole = ((4 * l) % n == 0) & (((4 * l) // n) % 2 == 1)
    tan = np.tan(grid.t)
    tan[pole] = 0.0
    s = grid.x[None, :] - tan[:, None]
    inside = np.abs(s) < 1
    out = np.zeros(grid.shape)
    denom = np.where(inside, 1 - s * s, 1.0)
    out[inside] = (tan[:, None] * np.exp(-1.0 / denom))[inside]
    return out


def sample_builtin(name: str, grid: CylinderGrid, **params) -> SampledField:
    """Evaluate a closed-form builtin on the grid.

    gaussian_wave  e^{i k0 t} e^{-x^2/2}
    plane_wave     e^{i (k0 t + xi0 x)} / (2 pi)
    lorentz_wave   e^{i k0 t} / (1 + x^2)
    tanbump        the smooth non-Schwartz bump riding on x = tan t
    constant_one   1
    zero           0
    """
    if name not in BUILTINS:
        raise ValueError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")
    extra = set(params) - _BUILTIN_PARAMS.get(name, set())
    if extra:
        raise ValueError(f"unexpected parameters for {name}: {sorted(extra)}")
    T, Xm = grid.mesh()
    if name == "gaussian_wave":
        k0 = _int_param(params, "k0", 1)
        vals = np.exp(1j * k0 * T) * np.exp(-Xm ** 2 / 2)
    elif name == "plane_wave":
        k0 = _int_param(params, "k0", 1)
        xi0 = float(params.get("xi0", 0.0))
        if not math.isfinite(xi0):
            raise ValueError("xi0 must be finite")
        vals = np.exp(1j * (k0 * T + xi0 * Xm)) / (2 * np.pi)
    elif name == "lorentz_wave":
        k0 = _int_param(params, "k0", 1)
        vals = np.exp(1j * k0 * T) / (1 + Xm ** 2)
    elif name == "tanbump":
        vals = tanbump_values(grid)
    elif name == "constant_one":
        vals = np.ones(grid.shape)
    else:
        vals = np.zeros(grid.shape)
    return SampledField(grid, vals)


# ----------------------------------------------------------------------
# trigonometric polynomials
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TrigPolynomial:
    """c(t) = sum_k c_k e^{ikt} with finitely many ComplexRational c_k."""

    coeffs: tuple = ()  # sorted ((k, ComplexRational), ...), no zeros

    def __post_init__(self):
        items = dict(self.coeffs) if not isinstance(self.coeffs, dict) else self.coeffs
        clean = tuple(sorted((int(k), ComplexRational.of(c)) for k, c in items.items()
                             if ComplexRational.of(c)))
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def constant(cls, c) -> "TrigPolynomial":
        return cls({0: c})

    @classmethod
    def sin(cls, c=1) -> "TrigPolynomial":
        c = ComplexRational.of(c)
        half = c / (ComplexRational(0, 2))
        return cls({1: half, -1: -half})

    @classmethod
    def cos(cls, c=1) -> "TrigPolynomial":
        half = ComplexRational.of(c) / 2
        return cls({1: half, -1: half})

    def coef(self, k: int) -> ComplexRational:
        return dict(self.coeffs).get(k, ZERO)

    @property
    def is_real(self) -> bool:
        d = dict(self.coeffs)
        return all(d.get(-k, ZERO) == c.conjugate() for k, c in d.items())

    @property
    def is_constant(self) -> bool:
        return all(k == 0 for k, _ in self.coeffs)

    @property
    def bandwidth(self) -> int:
        return max((abs(k) for k, _ in self.coeffs), default=0)

    def mean(self) -> ComplexRational:
        return self.coef(0)

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        d = dict(self.coeffs)
        for k, c in other.coeffs:
            d[k] = d.get(k, ZERO) + c
        return TrigPolynomial(d)

    def __neg__(self):
        return TrigPolynomial({k: -c for k, c in self.coeffs})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "TrigPolynomial":
        if not isinstance(other, TrigPolynomial):
            other = TrigPolynomial.constant(other)
        d: dict = {}
        for k1, c1 in self.coeffs:
            for k2, c2 in other.coeffs:
                d[k1 + k2] = d.get(k1 + k2, ZERO) + c1 * c2
        return TrigPolynomial(d)

    __rmul__ = __mul__

    def derivative(self) -> "TrigPolynomial":
        return TrigPolynomial({k: c * ComplexRational(0, k) for k, c in self.coeffs})

    def integral_from_zero(self) -> "TrigPolynomial":
        """int_0^t (c(s) - c_0) ds as a trig polynomial; it vanishes at t = 0."""
        d = {k: c / ComplexRational(0, k) for k, c in self.coeffs if k != 0}
        d[0] = -sum(d.values(), ZERO)
        return TrigPolynomial(d)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=np.complex128)
        for k, c in self.coeffs:
            out += complex(c) * np.exp(1j * k * t)
        return out

    def to_text(self) -> str:
        """Parser-compatible text built from sin(t) and cos(t)."""
        if self.is_constant:
            return format_complex(self.mean())
        if self.bandwidth > 1:
            # e^{ikt} = (cos(t) + i sin(t))^k
            parts = []
            for k, c in self.coeffs:
                base = "1" if k == 0 else \
                    f"(cos(t){'+' if k > 0 else '-'}1i*sin(t))" + (f"^{abs(k)}" if abs(k) > 1 else "")
                parts.append(format_complex(c) if k == 0 else
                             (base if c == ONE else f"{format_complex(c)}*{base}"))
            return "(" + _join(parts) + ")"
        # c_1 e^{it} + c_-1 e^{-it} = (c_1 + c_-1) cos t + i (c_1 - c_-1) sin t
        c1, cm1 = self.coef(1), self.coef(-1)
        parts = []
        cc, sc = c1 + cm1, I * (c1 - cm1)
        for c, name in ((sc, "sin(t)"), (cc, "cos(t)")):
            if c:
                parts.append(name if c == ONE else f"{format_complex(c)}*{name}")
        if self.mean():
            parts.append(format_complex(self.mean()))
        return "(" + _join(parts) + ")"

    def to_json(self) -> dict:
        return {str(k): [format_fraction(c.re), format_fraction(c.im)] for k, c in self.coeffs}


# ----------------------------------------------------------------------
# operators
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SeparablePoly:
    """Operator whose Fourier symbol is i * scale * (P(xi) + Q(k)).

    ``p`` and ``q`` hold the coefficients of P and Q in ascending order; the
    real zeros of P(xi) + Q(k) on Z x R are exactly the zeros of the symbol.
    With P(xi) = xi, Q(k) = k and scale 1 this is d/dt + d/dx.  ``scale`` is a
    nonzero constant that never affects the zero set; the parser uses it
    to put literal higher-order operators into a form with a real side.
    """

    p: tuple
    q: tuple
    scale: ComplexRational = ONE

    def __post_init__(self):
        p, q = cpoly(self.p), cpoly(self.q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "scale", ComplexRational.of(self.scale))
        if not self.scale:
            raise OperatorError("scale must be nonzero")
        if len(p) < 2 or len(q) < 2:
            raise OperatorError("p and q must be non-constant polynomials")
        if self.real_side is None:
            raise OperatorError("p or q must have real coefficients")

    @property
    def real_side(self) -> Optional[str]:
        p_real = not imag_part(self.p)
        q_real = not imag_part(self.q)
        if p_real and q_real:
            return "both"
        return "p" if p_real else ("q" if q_real else None)

    def literal_coefficients(self) -> tuple[list, list]:
        """Coefficients of d/dx^j and d/dt^j (constant term in the first list)."""
        # i s c (xi)^j = lit_j (i xi)^j  =>  lit_j = s c i^{1-j}
        px = [self.scale * c * I ** ((1 - j) % 4) for j, c in enumerate(self.p)]
        qt = [self.scale * c * I ** ((1 - j) % 4) for j, c in enumerate(self.q)]
        px[0] = px[0] + qt[0]
        qt[0] = ZERO
        return px, qt

    def to_text(self) -> str:
        if self.scale == ONE:
            return f"p(Dx)={_poly_text(self.p, 'Dx')}; q(Dt)={_poly_text(self.q, 'Dt')}"
        px, qt = self.literal_coefficients()
        return _join(_poly_terms(qt, "Dt") + _poly_terms(px, "Dx"), spaced=True)

    def to_json(self) -> dict:
        return {"type": "separable", "p": [str(c) for c in self.p],
                "q": [str(c) for c in self.q], "scale": str(self.scale),
                "text": self.to_text()}


def _join(parts, spaced: bool = False) -> str:
    """Join signed terms, writing a - b rather than a+-b."""
    plus, minus = (" + ", " - ") if spaced else ("+", "-")
    out = parts[0]
    for p in parts[1:]:
        out += minus + p[1:] if p.startswith("-") else plus + p
    return out


def _poly_terms(cp, var) -> list:
    parts = []
    for i in range(len(cp) - 1, -1, -1):
        c = cp[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            parts.append(format_complex(c))
        elif c == ONE or c == -ONE:
            parts.append(mono if c == ONE else "-" + mono)
        else:
            parts.append(f"{format_complex(c)}*{mono}")
    return parts


def _poly_text(cp, var) -> str:
    parts = _poly_terms(cp, var)
    return _join(parts) if parts else "0"


@dataclass(frozen=True)
class FirstOrderConstant:
    """L = c1 d/dt + c2 d/dx + c3."""

    c1: ComplexRational
    c2: ComplexRational
    c3: ComplexRational = ZERO

    def __post_init__(self):
        for name in ("c1", "c2", "c3"):
            object.__setattr__(self, name, ComplexRational.of(getattr(self, name)))
        if not self.c1 and not self.c2:
            raise OperatorError("c1 and c2 cannot both vanish")

    def to_text(self) -> str:
        parts = []
        for c, d in ((self.c1, "Dt"), (self.c2, "Dx")):
            if c:
                parts.append(d if c == ONE else "-" + d if c == -ONE else f"{format_complex(c)}*{d}")
        if self.c3:
            parts.append(format_complex(self.c3))
        return _join(parts, spaced=True)

    def to_json(self) -> dict:
        return {"type": "first_order_constant", "c1": str(self.c1), "c2": str(self.c2),
                "c3": str(self.c3), "text": self.to_text()}


@dataclass(frozen=True)
class FirstOrderVariable:
    """L = d/dt + a(t) d/dx + q(t) with real-valued trig polynomial a."""

    a: TrigPolynomial
    q: TrigPolynomial

    def __post_init__(self):
        if not isinstance(self.a, TrigPolynomial):
            object.__setattr__(self, "a", TrigPolynomial.constant(self.a))
        if not isinstance(self.q, TrigPolynomial):
            object.__setattr__(self, "q", TrigPolynomial.constant(self.q))
        if not self.a.is_real:
            raise OperatorError("a(t) must be real valued")

    def to_text(self) -> str:
        parts = ["Dt"]
        if self.a.coeffs:
            parts.append(f"{self.a.to_text()}*Dx")
        if self.q.coeffs:
            parts.append(self.q.to_text())
        return _join(parts, spaced=True)

    def to_json(self) -> dict:
        return {"type": "first_order_variable", "a": self.a.to_json(),
                "q": self.q.to_json(), "text": self.to_text()}


DifferentialOperator = (SeparablePoly, FirstOrderConstant, FirstOrderVariable)


# ----------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------

class Verdict(str, enum.Enum):
    SGH = "SGH"
    NOT_SGH = "NotSGH"


class Method(str, enum.Enum):
    FIRST_ORDER = "first-order-closed-form"
    SEPARABLE = "separable-poly-decision"
    CONJUGATED = "conjugated-to-constant"


@dataclass(frozen=True)
class Witness:
    """Lattice zero (k, xi) of the symbol; xi lies in [xi_lo, xi_hi]."""

    k: int
    xi_lo: Fraction
    xi_hi: Fraction

    @property
    def exact(self) -> bool:
        return self.xi_lo == self.xi_hi

    @property
    def xi(self) -> float:
        return float((self.xi_lo + self.xi_hi) / 2)

    def to_json(self) -> dict:
        return {"k": self.k, "xi_lo": _frac_json(self.xi_lo), "xi_hi": _frac_json(self.xi_hi)}


def _frac_json(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}


@dataclass(frozen=True)
class SghReport:
    verdict: Verdict
    method: Method
    witness: Optional[Witness] = None
    gap: Optional[Fraction] = None
    gap_certified: bool = False
    normal_form: Optional[FirstOrderConstant] = None
    notes: tuple = field(default_factory=tuple)
    operator: Optional[str] = None

    def __post_init__(self):
        if (self.verdict is Verdict.NOT_SGH) != (self.witness is not None):
            raise ValueError("NotSGH verdicts carry a witness and SGH verdicts do not")
        if self.verdict is Verdict.SGH and (self.gap is None or self.gap <= 0):
            raise ValueError("SGH verdicts carry a positive gap")

    @property
    def is_sgh(self) -> bool:
        return self.verdict is Verdict.SGH

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "method": self.method.value,
            "witness": self.witness.to_json() if self.witness else None,
            "gap": _frac_json(self.gap) if self.gap is not None else None,
            "gap_certified": self.gap_certified,
            "normal_form": self.normal_form.to_json() if self.normal_form else None,
            "notes": list(self.notes),
            "operator": self.operator,
        }
