import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylfourier.core import (FirstOrderConstant, FirstOrderVariable, SeparablePoly,
                             TrigPolynomial, Witness)
from cylfourier.rational import I, ComplexRational
from cylfourier.symbols import (certified_gap_separable, DecisionError, InconsistencyError, StaleWitnessError, Symbol,
                                brute_force_min_symbol, decide_sgh, decide_sgh_first_order,
                                decide_sgh_separable, first_order_gap_squared, gap_estimate,
                                oracle_check, refined_scan, symbol_of, witness_verify)

from conftest import l_condition, tilde_condition, validate

C = ComplexRational


def _line_distance_oracle(c1, c2, c3, K=400):
    """min over |k| <= K of the exact distance from c1 k - i c3 to the line c2 R."""
    c1, c2, d = complex(c1), complex(c2), -1j * complex(c3)
    best = math.inf
    for k in range(-K, K + 1):
        z = c1 * k + d
        if c2:
            dist = abs((np.conj(c2) * z).imag) / abs(c2)
        else:
            dist = abs(z)
        best = min(best, dist)
    return best


# -- symbol convention ----------------------------------------------------

def test_symbol_of_first_order():
    s = symbol_of(FirstOrderConstant(1, 1, 0))
    assert s.form_exact(3, -3) == 0 and s.form_exact(2, 1) == C(3)
    assert symbol_of(FirstOrderConstant(1, 0, 0)).form_exact(5, F(7, 3)) == C(5)
    # d/dt + 2 d/dx + 3 on e^{i(k t + xi x)} multiplies by i(k + 2 xi - 3i)
    s = symbol_of(FirstOrderConstant(1, 2, 3))
    k0, xi0 = 2, -0.75
    assert s.fourier(k0, xi0) == pytest.approx(1j * (k0 + 2 * xi0 - 3j))
    with pytest.raises(DecisionError):
        symbol_of(FirstOrderVariable(TrigPolynomial.sin(), TrigPolynomial.constant(0)))


def test_symbol_of_scaled_separable():
    op = SeparablePoly((0, 0, 1), (0, 0, -1), scale=I)
    s = symbol_of(op)
    assert s.fourier(1, 2.0) == pytest.approx(1j * 1j * (4 - 1))


# -- first order ----------------------------------------------------------

def test_first_order_examples():
    r = decide_sgh_first_order(1, 1, 0)
    assert not r.is_sgh and r.witness == Witness(0, F(0), F(0))
    assert decide_sgh_first_order(1, C(1, 2), 1).is_sgh
    assert not decide_sgh_first_order(C(3), 1, C(0, 5)).is_sgh
    r = decide_sgh_first_order(1, I, C(0, F(1, 2)))
    assert r.is_sgh and r.gap == F(1, 2) and r.gap_certified
    with pytest.raises(DecisionError):
        decide_sgh_first_order(0, 0, 1)
    validate(r.to_json(), "sgh_report")


@pytest.mark.parametrize("c,gap2", [
    ((1, C(1, 2), 1), F(1, 5)),            # (2k+1)^2 / 5 minimized at k = 0
    ((1, I, C(0, F(1, 2))), F(1, 4)),       # (k + 1/2)^2 + xi^2
    ((1, 1, 1), F(1)),                      # |Im| = 1 everywhere
    ((C(0, 1), 1, 1), F(0)),                # k = 1 / 1 ... lands on the lattice
    ((2, 3, C(0, 5)), F(0)),
])
def test_gap_squared_frozen(c, gap2):
    assert first_order_gap_squared(*c) == gap2


small = st.fractions(min_value=-3, max_value=3, max_denominator=4)
cplx = st.builds(C, small, small)


@settings(max_examples=300, deadline=None)
@given(cplx, cplx, cplx)
def test_gap_matches_line_distance_oracle(c1, c2, c3):
    if not c1 and not c2:
        return
    g2 = first_order_gap_squared(c1, c2, c3)
    assert math.sqrt(float(g2)) == pytest.approx(_line_distance_oracle(c1, c2, c3), abs=1e-12)
    r = decide_sgh_first_order(c1, c2, c3)
    assert r.is_sgh == (g2 > 0)
    if not r.is_sgh:
        w = r.witness
        assert w.exact and c1 * w.k + c2 * w.xi_lo - I * c3 == 0
        assert witness_verify(FirstOrderConstant(c1, c2, c3), w)
    else:
        assert r.gap ** 2 <= g2


@settings(max_examples=200, deadline=None)
@given(cplx, cplx, cplx, cplx)
def test_scale_invariance_and_determinism(c1, c2, c3, lam):
    if (not c1 and not c2) or not lam:
        return
    r = decide_sgh_first_order(c1, c2, c3)
    s = decide_sgh_first_order(lam * c1, lam * c2, lam * c3)
    assert r.verdict == s.verdict
    assert first_order_gap_squared(lam * c1, lam * c2, lam * c3) == \
        lam.abs2() * first_order_gap_squared(c1, c2, c3)
    assert decide_sgh_first_order(c1, c2, c3) == r


VALS = [F(v) for v in range(-3, 4)] + [F(1, 2), F(-1, 2), F(3, 2), F(-3, 2)]


def test_closed_form_conditions_small_sweep():
    for a, b, rq, iq in itertools.product(range(-2, 3), range(-2, 3), VALS[::2], VALS[1::2]):
        q = C(rq, iq)
        L = decide_sgh_first_order(1, C(a, b), q).is_sgh
        assert L == l_condition(F(a), F(b), rq, iq), (a, b, q)
        if a or b:
            Lt = decide_sgh_first_order(C(a, b), 1, q).is_sgh
            assert Lt == tilde_condition(F(a), F(b), rq, iq), (a, b, q)


def test_integer_divisibility_case():
    # a = b = 2, Re q = 1: b does not divide Re q, yet a Re q / b + Im q is an integer
    assert not decide_sgh_first_order(1, C(2, 2), 1).is_sgh


# -- separable ------------------------------------------------------------

def test_separable_examples():
    r = decide_sgh_separable((1, 0, 1), (0, 0, -1))
    assert not r.is_sgh and r.witness.k in (1, -1) and r.witness.xi_lo == r.witness.xi_hi == 0
    assert witness_verify(SeparablePoly((1, 0, 1), (0, 0, -1)), 1, 0)
    r = decide_sgh_separable((0, 0, 1), (F(1, 2), 0, 1))
    assert r.is_sgh and r.gap == F(1, 2) and r.gap_certified
    r = decide_sgh_separable((0, 1), (0, 1))
    assert not r.is_sgh and r.witness == Witness(0, F(0), F(0))
    validate(r.to_json(), "sgh_report")


def test_separable_more_cases():
    # odd degree in xi always reaches -Q(k)
    assert not decide_sgh_separable((5, 0, 0, 1), (0, 0, 1)).is_sgh
    # xi^2 + 1/3 = -(k^2 - k) has a zero only if k^2 - k <= -1/3: never on Z
    assert decide_sgh_separable((F(1, 3), 0, 1), (0, -1, 1)).is_sgh
    # complex P, real Q: Im P = xi vanishes at 0, Re P(0) = 4 = k^2 at k = +-2
    r = decide_sgh_separable((-4, I), (0, 0, 1))
    assert not r.is_sgh and abs(r.witness.k) == 2 and r.witness.xi == 0
    # complex P, Im P = xi^2 + 1 never vanishes
    assert decide_sgh_separable((I, 1, I), (0, 0, 1)).is_sgh
    # real P, complex Q: Im Q = k - 1/2 never vanishes on Z
    assert decide_sgh_separable((0, 0, 1), (-F(1, 2) * I, 1)).is_sgh
    # real P, complex Q: Im Q = k^2 - 1 vanishes at k = 1; Re Q(1) = -2; xi^3 = 2
    r = decide_sgh_separable((0, 0, 0, 1), (-2 - I, 0, I))
    assert not r.is_sgh and r.witness.k in (1, -1) and not r.witness.exact
    assert abs(r.witness.xi - 2 ** (1 / 3)) < 1e-9
    with pytest.raises(Exception):
        decide_sgh_separable((0, I), (0, I))


def test_witness_verify_examples():
    op = FirstOrderConstant(1, 1, 0)
    assert witness_verify(op, 0, 0)
    assert not witness_verify(op, 0, 1)
    assert witness_verify(op, 0, -1, 1)
    r = decide_sgh(op)
    assert witness_verify(op, r)
    with pytest.raises(StaleWitnessError):
        witness_verify(FirstOrderConstant(1, 2, 0), r)


def test_gap_estimate_examples():
    sym = symbol_of(SeparablePoly((0, 0, 1), (F(1, 2), 0, 1)))
    est = gap_estimate(sym, 10, 10.0, 20001)
    assert est.scan_min == pytest.approx(0.5) and est.value == pytest.approx(0.5)
    est = gap_estimate(symbol_of(FirstOrderConstant(1, I, C(0, F(1, 2)))))
    assert est.scan_min == pytest.approx(0.5)
    with pytest.raises(InconsistencyError):
        gap_estimate(symbol_of(FirstOrderConstant(1, 1, 0)))


def test_brute_force_examples():
    m, arg = brute_force_min_symbol(symbol_of(FirstOrderConstant(1, 1, 0)), 5, 5.0, 101)
    assert m == 0 and arg[0] == -arg[1]
    m, _ = brute_force_min_symbol(symbol_of(FirstOrderConstant(1, I, C(0, F(1, 2)))), 5, 5.0, 101)
    assert m == pytest.approx(0.5)
    m, arg = brute_force_min_symbol(symbol_of(SeparablePoly((1, 0, 1), (0, 0, -1))), 5, 5.0, 101)
    assert m < 1e-12 and abs(arg[0]) == 1 and arg[1] == 0
    with pytest.raises(ValueError):
        brute_force_min_symbol(symbol_of(FirstOrderConstant(1, 1, 0)), 5, 0.0, 10)


def test_variable_operator_uses_normal_form():
    op = FirstOrderVariable(TrigPolynomial.sin() + TrigPolynomial.constant(1),
                            TrigPolynomial.constant(C(1, F(1, 2))))
    r = decide_sgh(op)
    assert r.is_sgh and r.normal_form == FirstOrderConstant(1, 1, C(1, F(1, 2)))
    assert oracle_check(op, r, K=20, Xi=20.0, n=4001)["agrees"]
    bad = FirstOrderVariable(TrigPolynomial.sin(), TrigPolynomial.constant(0))
    r = decide_sgh(bad)
    assert not r.is_sgh and oracle_check(bad, r, K=20, Xi=20.0, n=4001)["agrees"]


ipoly = st.lists(st.integers(-4, 4), min_size=2, max_size=4).filter(lambda c: c[-1] != 0)


@settings(max_examples=60, deadline=None)
@given(ipoly, ipoly, st.booleans(), st.integers(-2, 2))
def test_separable_agrees_with_brute_force(p, q, complex_p, im):
    P = [C(c) for c in p]
    if complex_p:
        P[0] = P[0] + C(0, im)  # constant imaginary shift keeps Q real
    op = SeparablePoly(P, q)
    r = decide_sgh_separable(op)
    assert decide_sgh_separable(op) == r
    sym = symbol_of(op)
    if r.is_sgh:
        m, _ = brute_force_min_symbol(sym, 30, 30.0, 6001)
        assert m > 1e-9
        if r.gap_certified:
            assert m >= float(r.gap) * (1 - 1e-9)
    else:
        assert witness_verify(op, r.witness)
        assert refined_scan(sym, r.witness) < 1e-6


@pytest.mark.parametrize("p, q, expect", [
    # Im P = xi - 3 and steep Re P: the minimum sits at large k, beyond any small box
    ([C(F(-1, 4), -3), C(F(-5, 2), 1), 6, -10], [1, -2], None),
    # constant Im P below the k = 0 minimum: the gap is exactly |Im P|
    ([C(0, F(1, 3)), 0, 1], [5, 1], F(1, 3)),
    # constant Im Q with an odd real side: P + Re Q(k) always has a real zero
    ([0, 1], [C(2, F(1, 2)), 1], F(1, 2)),
])
def test_certified_gap_separable(p, q, expect):
    P, Q = symbol_of(SeparablePoly(p, q)).P, symbol_of(SeparablePoly(p, q)).Q
    g = certified_gap_separable(P, Q)
    assert g is not None and g > 0
    if expect is not None:
        assert g == expect
    m, _ = brute_force_min_symbol(Symbol("separable", P, Q), 600, 8.0, 40001)
    assert m >= float(g) * (1 - 1e-9)
