"""Mixed Fourier analysis on the cylinder T^1 x R.

Partial Fourier series in t, partial Fourier transform in x, decay
diagnostics for the Schwartz class, an exact decision procedure for
Schwartz global hypoellipticity of constant-coefficient operators, a
symbol-division solver and the gauge conjugations that reduce
d/dt + a(t) d/dx + q(t) to constant coefficients.
"""

from .core import (CylinderGrid, FirstOrderConstant, FirstOrderVariable,
                   LineSpectrum, Method, MixedSpectrum, SampledField,
                   SeparablePoly, SghReport, TorusSpectrum, TrigPolynomial,
                   Verdict, Witness, make_grid, sample_builtin)
from .parser import parse_operator
from .rational import ComplexRational
from .symbols import decide_sgh

__all__ = [
    "ComplexRational", "CylinderGrid", "FirstOrderConstant", "FirstOrderVariable",
    "LineSpectrum", "Method", "MixedSpectrum", "SampledField", "SeparablePoly",
    "SghReport", "TorusSpectrum", "TrigPolynomial", "Verdict", "Witness",
    "decide_sgh", "make_grid", "parse_operator", "sample_builtin",
]

__version__ = "0.1.0"
