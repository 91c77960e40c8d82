import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cylfourier.core import (BUILTINS, CylinderGrid, FirstOrderConstant, FirstOrderVariable,
                             GridError, Method, MixedSpectrum, OperatorError, SampledField,
                             SeparablePoly, SghReport, TrigPolynomial, Verdict, Witness,
                             sample_builtin, tanbump_values)
from cylfourier.rational import I, ONE, ComplexRational


@pytest.mark.parametrize("args", [(7, 64, 8.0), (8, 2, 8.0), (8, 64, 0.0), (8, 64, -1.0),
                                  (8, 64, math.inf), (8.0, 64, 1.0), (True, 64, 1.0)])
def test_grid_validation(args):
    with pytest.raises(GridError):
        CylinderGrid(*args)


def test_grid_geometry():
    g = CylinderGrid(8, 16, 4.0)
    assert g.shape == (8, 16)
    assert g.x[0] == -4.0 and g.x[-1] == pytest.approx(4.0 - g.dx)
    assert g.t[2] == pytest.approx(np.pi / 2)
    assert list(g.k) == list(range(-4, 4))
    assert g.xi[8] == 0.0 and g.dxi == pytest.approx(np.pi / 4)
    assert g.xi_max == pytest.approx(-g.xi[0])
    K, XI = g.dual_mesh()
    assert K.shape == XI.shape == g.shape
    assert g.to_json() == {"n_t": 8, "n_x": 16, "X": 4.0}


def test_arrays_are_immutable_copies(grid_small):
    raw = np.ones(grid_small.shape)
    f = SampledField(grid_small, raw)
    raw[0, 0] = 5
    assert f.values[0, 0] == 1
    with pytest.raises(ValueError):
        f.values[0, 0] = 2
    with pytest.raises(GridError):
        SampledField(grid_small, np.ones((3, 3)))
    with pytest.raises(GridError):
        MixedSpectrum(grid_small, np.full(grid_small.shape, np.nan))


def test_builtins(grid_small):
    for name in BUILTINS:
        assert sample_builtin(name, grid_small).values.shape == grid_small.shape
    g = sample_builtin("gaussian_wave", grid_small, k0=2)
    T, X = grid_small.mesh()
    np.testing.assert_allclose(g.values, np.exp(2j * T - X ** 2 / 2))
    pw = sample_builtin("plane_wave", grid_small, k0=1, xi0=-1.0)
    np.testing.assert_allclose(np.abs(pw.values), 1 / (2 * np.pi))
    with pytest.raises(ValueError):
        sample_builtin("gaussian_wave", grid_small, k0=0.5)
    with pytest.raises(ValueError):
        sample_builtin("nope", grid_small)
    with pytest.raises(ValueError):
        sample_builtin("zero", grid_small, k0=1)


def test_tanbump_profile():
    g = CylinderGrid(16, 2048, 16.0)
    v = tanbump_values(g)
    assert np.all(v[4] == 0) and np.all(v[12] == 0)  # cos t = 0 rows
    l = 3  # t = 3 pi / 8
    assert np.max(np.abs(v[l])) == pytest.approx(math.tan(3 * math.pi / 8) / math.e, rel=1e-4)
    # support of each row is |x - tan t| < 1
    x = g.x[np.abs(v[l]) > 0]
    assert np.all(np.abs(x - math.tan(3 * math.pi / 8)) < 1)


def test_trig_polynomial_algebra():
    s, c = TrigPolynomial.sin(), TrigPolynomial.cos()
    t = np.linspace(0, 2 * np.pi, 17)
    np.testing.assert_allclose(s(t), np.sin(t), atol=1e-15)
    np.testing.assert_allclose((s * s + c * c)(t), 1, atol=1e-14)
    assert s * s + c * c == TrigPolynomial.constant(1)
    assert s.derivative() == c and c.derivative() == -s
    assert s.is_real and not (I * c).is_real
    assert (s + TrigPolynomial.constant(1)).mean() == ONE
    A = (s + TrigPolynomial.constant(1)).integral_from_zero()
    assert A == TrigPolynomial.constant(1) - c
    assert A(np.array([0.0]))[0] == 0
    assert TrigPolynomial({0: 0}).coeffs == ()


small = st.fractions(min_value=-3, max_value=3, max_denominator=4)
trig = st.dictionaries(st.integers(-3, 3), st.builds(ComplexRational, small, small), max_size=4) \
    .map(TrigPolynomial)


@given(trig)
def test_integral_inverts_derivative(p):
    A = p.integral_from_zero()
    assert A.derivative() + TrigPolynomial.constant(p.mean()) == p
    assert abs(A(np.array([0.0]))[0]) < 1e-12


@given(trig, trig)
def test_trig_product_matches_pointwise(p, q):
    t = np.linspace(0, 2 * np.pi, 9)
    np.testing.assert_allclose((p * q)(t), p(t) * q(t), atol=1e-12)


def test_operator_validation():
    with pytest.raises(OperatorError):
        FirstOrderConstant(0, 0, 1)
    with pytest.raises(OperatorError):
        SeparablePoly((1,), (0, 1))
    with pytest.raises(OperatorError):
        SeparablePoly((0, I), (0, I))
    with pytest.raises(OperatorError):
        FirstOrderVariable(TrigPolynomial.constant(I), TrigPolynomial.constant(0))
    sp = SeparablePoly((0, 0, 1), (Fraction(1, 2), 0, 1))
    assert sp.real_side == "both"
    assert SeparablePoly((0, I), (0, 1)).real_side == "q"


def test_report_invariants():
    w = Witness(0, Fraction(0), Fraction(0))
    with pytest.raises(ValueError):
        SghReport(Verdict.NOT_SGH, Method.FIRST_ORDER)
    with pytest.raises(ValueError):
        SghReport(Verdict.SGH, Method.FIRST_ORDER, gap=Fraction(0))
    with pytest.raises(ValueError):
        SghReport(Verdict.SGH, Method.FIRST_ORDER, witness=w, gap=Fraction(1))
    r = SghReport(Verdict.NOT_SGH, Method.FIRST_ORDER, witness=w)
    assert not r.is_sgh and r.to_json()["witness"]["k"] == 0
    assert w.exact and w.xi == 0.0
