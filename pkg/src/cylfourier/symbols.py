"""Exact SGH decisions for constant-coefficient operators.

Every constant-coefficient operator here is stored through its zero form
P(xi) + Q(k): the Fourier symbol is i (P(xi) + Q(k)), so the operator is
SGH exactly when the form has no zero on Z x R.  For
L = c1 d/dt + c2 d/dx + c3 the form is c1 k + c2 xi - i c3.

Decisions run in rational arithmetic.  Floating point only appears in the
gap estimate for separable symbols and in the brute-force oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import (FirstOrderConstant, FirstOrderVariable, Method,
                   SeparablePoly, SghReport, Verdict, Witness)
from .rational import (ZERO, ComplexRational, I, abs_eventual_bound,
                       as_fraction, ceval, ceval_complex, count_roots, cpoly,
                       degree, eventual_bound, format_fraction, imag_part,
                       interval_eval, isolate_real_roots, padd, pderiv, peval,
                       pgcd, pmul, pscale, real_part,
                       refine_root, sqrt_lower)

WITNESS_WIDTH = Fraction(1, 2 ** 40)


class DecisionError(ValueError):
    """The operator is outside the scope of the requested decision."""


class InconsistencyError(RuntimeError):
    """Two independent computations disagree; this signals a bug."""


class StaleWitnessError(ValueError):
    pass


@dataclass(frozen=True)
class Symbol:
    """Zero form P(xi) + Q(k) with ComplexRational coefficients (ascending)."""

    kind: str
    P: tuple
    Q: tuple
    scale: ComplexRational = ComplexRational(1)

    def form(self, k, xi):
        """Floating-point form on broadcastable arrays."""
        return ceval_complex(self.P, np.asarray(xi, dtype=float)) + \
            ceval_complex(self.Q, np.asarray(k, dtype=float))

    def fourier(self, k, xi):
        """The factor by which the operator multiplies e^{i(kt + xi x)}."""
        return 1j * complex(self.scale) * self.form(k, xi)

    def form_exact(self, k: int, xi) -> ComplexRational:
        return ceval(self.P, as_fraction(xi)) + ceval(self.Q, int(k))


def symbol_of(op) -> Symbol:
    if isinstance(op, FirstOrderConstant):
        return Symbol("first_order", cpoly((-I * op.c3, op.c2)), cpoly((ZERO, op.c1)))
    if isinstance(op, SeparablePoly):
        return Symbol("separable", op.p, op.q, op.scale)
    if isinstance(op, FirstOrderVariable):
        raise DecisionError("variable coefficients: conjugate to the normal form first")
    raise TypeError(f"not an operator: {op!r}")


# ----------------------------------------------------------------------
# first order
# ----------------------------------------------------------------------

def _dist_to_int(r: Fraction) -> Fraction:
    f = r - math.floor(r)
    return min(f, 1 - f)


def first_order_gap_squared(c1, c2, c3) -> Fraction:
    """inf over Z x R of |c1 k + c2 xi - i c3|^2, in closed form."""
    c1, c2, c3 = (ComplexRational.of(c) for c in (c1, c2, c3))
    d = -I * c3
    if c2:
        g, h = c1 / c2, d / c2
        # the infimum over real xi is the distance to the real axis
        if g.im == 0:
            m = abs(h.im)
        else:
            m = abs(g.im) * _dist_to_int(-h.im / g.im)
        return c2.abs2() * m * m
    w = d / c1
    return c1.abs2() * (_dist_to_int(w.re) ** 2 + w.im ** 2)


def _solve_first_order(c1, c2, c3) -> Optional[tuple[int, Fraction]]:
    """An exact lattice zero (k, xi) of c1 k + c2 xi - i c3, or None."""
    a1, b1, a2, b2, a3, b3 = c1.re, c1.im, c2.re, c2.im, c3.re, c3.im
    # real part: a1 k + a2 xi = -b3 ; imaginary part: b1 k + b2 xi = a3
    rows = [(a1, a2, -b3), (b1, b2, a3)]
    det = a1 * b2 - a2 * b1
    if det:
        k = (-b3 * b2 - a2 * a3) / det
        xi = (a1 * a3 + b1 * b3) / det
        return (int(k), xi) if k.denominator == 1 else None
    alpha, beta, rho = rows[0] if (a1 or a2) else rows[1]
    other = rows[1] if (a1 or a2) else rows[0]
    # rank one: the other row must be a multiple of (alpha, beta, rho)
    if any(x * y2 - y * x2 for (x, y), (x2, y2) in
           [((alpha, rho), (other[0], other[2])), ((beta, rho), (other[1], other[2]))]):
        return None
    if beta:
        if alpha == 0:
            k = 0
        else:
            target = rho / alpha
            cands = sorted({math.floor(target), math.ceil(target)},
                           key=lambda kk: (abs((rho - alpha * kk) / beta), abs(kk), kk))
            k = cands[0]
        return k, (rho - alpha * k) / beta
    k = rho / alpha
    return (int(k), Fraction(0)) if k.denominator == 1 else None


def decide_sgh_first_order(c1, c2, c3) -> SghReport:
    c1, c2, c3 = (ComplexRational.of(c) for c in (c1, c2, c3))
    if not c1 and not c2:
        raise DecisionError("c1 and c2 cannot both vanish")
    text = FirstOrderConstant(c1, c2, c3).to_text()
    zero = _solve_first_order(c1, c2, c3)
    gap2 = first_order_gap_squared(c1, c2, c3)
    if (zero is None) != (gap2 > 0):
        raise InconsistencyError(f"elimination and closed-form gap disagree for {text}")
    if zero is not None:
        k0, xi0 = zero
        if ComplexRational.of(c1) * k0 + c2 * xi0 - I * c3:
            raise InconsistencyError("witness does not annihilate the form")
        return SghReport(Verdict.NOT_SGH, Method.FIRST_ORDER, witness=Witness(k0, xi0, xi0),
                         notes=("witness is exact",), operator=text)
    return SghReport(Verdict.SGH, Method.FIRST_ORDER, gap=sqrt_lower(gap2), gap_certified=True,
                     notes=(f"gap^2 = {format_fraction(gap2)} (exact)",), operator=text)


# ----------------------------------------------------------------------
# separable polynomials
# ----------------------------------------------------------------------

def _k_order(K: int):
    yield 0
    for n in range(1, K + 1):
        yield n
        yield -n


def _real_root_witness(k: int, g) -> Optional[Witness]:
    roots = isolate_real_roots(g)
    if not roots:
        return None
    lo, hi = refine_root(g, *roots[0], WITNESS_WIDTH)
    return Witness(k, lo, hi)


def _poly_lower_bound(p) -> Fraction:
    """Rational lower bound on min p over R (p even degree, positive lead)."""
    crit = isolate_real_roots(pderiv(p))
    best = None
    for lo, hi in crit:
        lo, hi = refine_root(pderiv(p), lo, hi, Fraction(1, 2 ** 30))
        v = interval_eval(p, lo, hi)[0]
        best = v if best is None else min(best, v)
    return best


def _decide_real_real(P, Q, real_P, real_Q):
    """Both forms real: a zero needs P(xi) = -Q(k) for some integer k."""
    if degree(real_P) % 2:
        return _real_root_witness(0, padd(real_P, (real_Q[0],) if real_Q else ())), None
    s = 1 if real_P[-1] > 0 else -1
    sP, sQ = pscale(real_P, s), pscale(real_Q, s)
    m_lo = _poly_lower_bound(sP)
    d = degree(sQ)
    if d % 2 or sQ[-1] < 0:
        # sQ is unbounded below along the integers, so some k pushes below -min sP
        m_hi = peval(sP, 0)
        for k in _k_order(10 ** 9):
            if peval(sQ, k) <= -m_hi:
                return _real_root_witness(k, padd(real_P, (peval(real_Q, k),))), None
    K = eventual_bound(sQ, -m_lo)
    for k in _k_order(K):
        if peval(sQ, k) <= -m_lo:
            w = _real_root_witness(k, padd(real_P, (peval(real_Q, k),)))
            if w is not None:
                return w, None
    # outside |k| <= K0 every value exceeds sQ(0), so the integer minimum lies inside
    K0 = eventual_bound(sQ, peval(sQ, 0))
    best_q = min(peval(sQ, k) for k in range(-K0, K0 + 1))
    return None, m_lo + best_q


def _decide_q_real(P, Q):
    rP, iP, rQ = real_part(P), imag_part(P), real_part(Q)
    if not iP:
        return _decide_real_real(P, Q, rP, rQ)
    roots = isolate_real_roots(iP)
    if not roots:
        return None, None
    B = Fraction(0)
    for lo, hi in roots:
        lo, hi = refine_root(iP, lo, hi, Fraction(1, 2 ** 20))
        a, b = interval_eval(rP, lo, hi)
        B = max(B, abs(a), abs(b))
    K = abs_eventual_bound(rQ, B)
    for k in _k_order(K):
        qk = peval(rQ, k)
        if abs(qk) > B:
            continue
        g = pgcd(iP, padd(rP, (qk,)))
        if degree(g) >= 1:
            w = _real_root_witness(k, g)
            if w is not None:
                return w, None
    return None, None


def _decide_p_real(P, Q):
    rP, rQ, iQ = real_part(P), real_part(Q), imag_part(Q)
    roots = isolate_real_roots(iQ)
    cands = set()
    for lo, hi in roots:
        lo, hi = refine_root(iQ, lo, hi, Fraction(1, 2))
        for k in range(math.ceil(lo), math.floor(hi) + 1):
            if peval(iQ, k) == 0:
                cands.add(k)
    for k in sorted(cands, key=lambda kk: (abs(kk), kk)):
        w = _real_root_witness(k, padd(rP, (peval(rQ, k),)))
        if w is not None:
            return w, None
    return None, None


def decide_sgh_separable(p, q=None) -> SghReport:
    """Decide whether P(xi) + Q(k) has a zero on Z x R.

    Accepts a :class:`SeparablePoly` (``q`` omitted) or coefficient lists.
    """
    op = p if isinstance(p, SeparablePoly) else SeparablePoly(p, q)
    P, Q = op.p, op.q
    if op.real_side in ("q", "both"):
        witness, exact_gap = _decide_q_real(P, Q)
    else:
        witness, exact_gap = _decide_p_real(P, Q)
    text = op.to_text()
    if witness is not None:
        if not witness_verify(Symbol("separable", P, Q), witness):
            raise InconsistencyError("separable witness failed verification")
        notes = ("witness is exact",) if witness.exact else \
            (f"xi isolated in an interval of width {float(witness.xi_hi - witness.xi_lo):.3g}",)
        return SghReport(Verdict.NOT_SGH, Method.SEPARABLE, witness=witness, notes=notes,
                         operator=text)
    sym = Symbol("separable", P, Q)
    est = gap_estimate(sym)  # also traps a scan that contradicts the verdict
    if exact_gap is not None and exact_gap > 0:
        return SghReport(Verdict.SGH, Method.SEPARABLE, gap=exact_gap, gap_certified=True,
                         notes=("gap is a rigorous lower bound (real forms)",), operator=text)
    cert = certified_gap_separable(P, Q)
    if cert is not None and cert > 0:
        return SghReport(Verdict.SGH, Method.SEPARABLE, gap=cert, gap_certified=True,
                         notes=("gap is a rigorous lower bound (per-k minima and tail bound)",
                                f"box scan min {est.scan_min:.6g}"), operator=text)
    return SghReport(Verdict.SGH, Method.SEPARABLE, gap=_rational_below(est.value),
                     gap_certified=False,
                     notes=(f"gap estimate: box scan min {est.scan_min:.6g}",), operator=text)


def _min_over_reals(g) -> Fraction:
    """Rational lower bound of min g over R (g constant, or even degree with positive lead)."""
    if degree(g) <= 0:
        return g[0] if g else Fraction(0)
    best = None
    dg = pderiv(g)
    for lo, hi in isolate_real_roots(dg):
        lo, hi = refine_root(dg, lo, hi, Fraction(1, 2 ** 30))
        # mean-value form: g' vanishes inside, so the error is second order in the width
        m = (lo + hi) / 2
        d0, d1 = interval_eval(dg, lo, hi)
        v = peval(g, m) - max(abs(d0), abs(d1)) * (hi - lo) / 2
        best = v if best is None else min(best, v)
    return max(best, Fraction(0))


def _k_min_sq(P, Q, k: int) -> Fraction:
    """Lower bound of min over real xi of |P(xi) + Q(k)|^2."""
    c = list(P)
    c[0] = c[0] + ceval(Q, k)
    re, im = real_part(c), imag_part(c)
    return _min_over_reals(padd(pmul(re, re), pmul(im, im)))


def _abs_sum_at(p, R: Fraction) -> Fraction:
    return sum((abs(c) * R ** i for i, c in enumerate(p)), Fraction(0))


def _re_ranges(rP, iP, R: Fraction, eps: Fraction, pieces: int = 256) -> list:
    """Merged enclosures of rP over the part of [-R, R] where |iP| may be below eps."""
    h = 2 * R / pieces
    out = []
    for j in range(pieces):
        lo, hi = -R + j * h, -R + (j + 1) * h
        a, b = interval_eval(iP, lo, hi)
        if a >= eps or b <= -eps:
            continue
        r = interval_eval(rP, lo, hi)
        if out and r[0] <= out[-1][1] and r[1] >= out[-1][0]:
            out[-1] = (min(out[-1][0], r[0]), max(out[-1][1], r[1]))
        else:
            out.append(r)
    return out


def certified_gap_separable(P, Q, k_cap: int = 2 ** 15) -> Optional[Fraction]:
    """Rigorous rational lower bound of inf |P(xi) + Q(k)| on Z x R, or None.

    One side must be real and the form must have no lattice zero.  Exact
    minima over xi are taken for finitely many k; every other k is covered
    by a bound that exceeds the k = 0 minimum.
    """
    iP, iQ = imag_part(P), imag_part(Q)
    eps2 = _k_min_sq(P, Q, 0)
    if eps2 <= 0:
        return None
    eps = sqrt_lower(eps2)
    if not iQ:
        if not iP:
            return None  # both real: handled exactly by the decision
        if degree(iP) == 0:
            if abs(iP[0]) < eps:
                return min(eps, abs(iP[0]))  # |Im P| is constant
            K = 0
        else:
            # outside |xi| < R we have |Im P| >= eps ...
            # for |xi| >= R >= 1: |Im P| >= R^(d-1) (c R - s), increasing in R once c R > s
            d, c = degree(iP), abs(iP[-1])
            s_ = sum((abs(x) for x in iP[:-1]), Fraction(0))
            R = Fraction(1)
            while not (c * R > s_ and R ** (d - 1) * (c * R - s_) >= eps):
                R *= 2
            # ... and inside it |P + Q(k)| >= |Q(k)| - |Re P| > eps once |Q(k)| > M + eps
            K = abs_eventual_bound(real_part(Q), _abs_sum_at(real_part(P), R) + eps)
            if K > k_cap:
                return None
            # a k can only beat a level delta if Re Q(k) lies near -Re P(S),
            # S = {|Im P| < delta}; outside, |Im P| or |Re P + Re Q(k)| is >= delta
            rP, rQ = real_part(P), real_part(Q)
            qs = {k: peval(rQ, k) for k in range(-K, K + 1) if k}

            def survivors(delta, ks):
                near = _re_ranges(rP, iP, R, delta)
                return [k for k in ks if any(lo - delta < -qs[k] < hi + delta for lo, hi in near)]

            ks = survivors(eps, qs)
            if not ks:
                return eps
            # exact minimum at the most promising k first, then filter again at that level
            xi = np.linspace(-float(R), float(R), 2001)
            pv = ceval_complex(P, xi)
            ks.sort(key=lambda k: float(np.min(np.abs(pv + float(qs[k])))))
            best = min(eps2, _k_min_sq(P, Q, ks[0]))
            for k in survivors(sqrt_lower(best), ks[1:]):
                best = min(best, _k_min_sq(P, Q, k))
            return min(sqrt_lower(best), eps)
    elif not iP and degree(iQ) >= 1:
        K = abs_eventual_bound(iQ, eps)  # |P + Q(k)| >= |Im Q(k)| > eps for |k| > K
    elif not iP:
        # constant Im Q = c: |P + Q(k)| >= |c|, with equality wherever P + Re Q(k) has a zero
        c = abs(iQ[0])
        rP, rQ = real_part(P), real_part(Q)
        if degree(rP) % 2 or degree(rQ) % 2 or (rP[-1] > 0) != (rQ[-1] > 0):
            return c  # |Im| = c everywhere and the real part vanishes somewhere
        sgn = 1 if rP[-1] > 0 else -1
        sP, sQ = pscale(rP, sgn), pscale(rQ, sgn)
        # sP + sQ(k) >= m + sQ(k) > eps for |k| > K
        K = eventual_bound(sQ, eps - _poly_lower_bound(sP))
    else:
        return None
    if K > k_cap:
        return None
    best = eps2
    for k in range(1, K + 1):
        best = min(best, _k_min_sq(P, Q, k), _k_min_sq(P, Q, -k))
    return min(sqrt_lower(best), eps)


def _rational_below(v: float) -> Fraction:
    r = Fraction(v).limit_denominator(10 ** 6)
    if r > v:
        r = Fraction(math.floor(v * 10 ** 6), 10 ** 6)
    return r if r > 0 else Fraction(v)


# ----------------------------------------------------------------------
# gap estimate and oracles
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GapEstimate:
    value: float
    scan_min: float
    argmin: tuple
    tail: Optional[float]
    certified: bool


def _cabs(c: ComplexRational) -> float:
    return math.hypot(float(c.re), float(c.im))


def _tail_lower(cp, R: float) -> Optional[float]:
    """Lower bound of |p(z)| for real |z| > R from the leading term."""
    d = len(cp) - 1
    if d < 1:
        return None
    c = _cabs(cp[-1])
    s = sum(_cabs(x) for x in cp[:-1])
    if c * R <= s:
        return None
    return R ** (d - 1) * (c * R - s)


def gap_estimate(sym: Symbol, k_range: int = 50, xi_range: float = 50.0,
                 xi_samples: int = 20001, tol: float = 1e-9) -> GapEstimate:
    """Estimate inf |P(xi) + Q(k)| on Z x R for a symbol already decided SGH.

    The box |k| <= k_range, |xi| <= xi_range is scanned; outside it a
    leading-term bound is used where one applies.  ``certified`` is True
    only when every tail regime has a positive analytic bound.
    """
    scan, arg = brute_force_min_symbol(sym, k_range, xi_range, xi_samples)
    if scan < tol:
        raise InconsistencyError(
            f"scan found |symbol| = {scan:.3g} at {arg} although the verdict is SGH")
    P, Q = sym.P, sym.Q
    iP, iQ = imag_part(P), imag_part(Q)
    tails = []
    certified = True
    if not iQ and degree(iP) == 0:
        tails.append(abs(float(iP[0])))  # |Im symbol| is a nonzero constant
    else:
        # |xi| > xi_range
        t1 = _tail_lower(cpoly(ComplexRational(c) for c in iP), xi_range) if not iQ and iP else None
        # |k| > k_range with |xi| <= xi_range
        qt = _tail_lower(Q, k_range)
        pmax = sum(_cabs(c) * xi_range ** i for i, c in enumerate(P))
        t2 = qt - pmax if qt is not None else None
        for t in (t1, t2):
            if t is None or t <= 0:
                certified = False
            else:
                tails.append(t)
    tail = min(tails) if tails else None
    value = min([scan] + tails)
    return GapEstimate(value, scan, arg, tail, certified)


def brute_force_min_symbol(sym: Symbol, K: int, Xi: float, n: int) -> tuple[float, tuple]:
    """min |P(xi) + Q(k)| over integers |k| <= K and n uniform xi in [-Xi, Xi]."""
    if K < 0 or Xi <= 0 or n < 1:
        raise ValueError("K >= 0, Xi > 0 and n >= 1 required")
    xi = np.linspace(-Xi, Xi, n)
    pv = ceval_complex(sym.P, xi)
    ks = np.arange(-K, K + 1)
    qv = ceval_complex(sym.Q, ks.astype(float))
    best, arg = math.inf, (0, 0.0)
    pr, pi = np.ascontiguousarray(pv.real), np.ascontiguousarray(pv.imag)
    a, b = np.empty(n), np.empty(n)
    for j, q in enumerate(qv):
        np.add(pr, q.real, out=a)
        np.multiply(a, a, out=a)
        np.add(pi, q.imag, out=b)
        np.multiply(b, b, out=b)
        a += b
        i = int(np.argmin(a))
        if a[i] < best:
            best = float(a[i])
            arg = (int(ks[j]), float(xi[i]))
    return math.sqrt(best), arg


def refined_scan(sym: Symbol, witness: Witness, width: float = 1e-3, n: int = 4001) -> float:
    """min |form| at k0 over xi sampled densely around the witness interval."""
    lo, hi = float(witness.xi_lo), float(witness.xi_hi)
    xi = np.concatenate([np.linspace(lo - width, hi + width, n), [witness.xi, lo, hi]])
    return float(np.min(np.abs(sym.form(np.full_like(xi, witness.k), xi))))


def oracle_check(op, report: SghReport, K: int = 50, Xi: float = 50.0, n: int = 100001,
                 sgh_floor: float = 1e-3, witness_tol: float = 1e-6) -> dict:
    """Cross-check an exact verdict against a brute-force box scan.

    SGH verdicts need a scan minimum above ``sgh_floor`` that also respects
    a certified gap; NotSGH verdicts need a refined scan near the witness
    below ``witness_tol``.  Variable operators are checked via their
    normal form.
    """
    target = normal_form_operator(op) if isinstance(op, FirstOrderVariable) else op
    sym = symbol_of(target)
    scan, arg = brute_force_min_symbol(sym, K, Xi, n)
    out = {"box": {"K": K, "Xi": Xi, "n": n}, "scan_min": scan, "argmin": list(arg)}
    if report.is_sgh:
        ok = scan > sgh_floor
        if report.gap_certified:
            ok = ok and scan >= float(report.gap) * (1 - 1e-9)
    else:
        near = refined_scan(sym, report.witness)
        out["witness_scan_min"] = near
        ok = near < witness_tol
    out["agrees"] = bool(ok)
    return out


def witness_verify(target, k0=None, xi_lo=None, xi_hi=None) -> bool:
    """Exact check that the form vanishes at (k0, xi) for some xi in [xi_lo, xi_hi].

    ``target`` is an operator or :class:`Symbol`; the witness may be given
    as a :class:`Witness`, an :class:`SghReport`, or explicit numbers.  A
    report produced for a different operator raises StaleWitnessError.
    """
    sym = target if isinstance(target, Symbol) else symbol_of(target)
    w = k0
    if isinstance(w, SghReport):
        if w.operator is not None and not isinstance(target, Symbol) \
                and w.operator != target.to_text():
            raise StaleWitnessError(f"report is for {w.operator!r}, not {target.to_text()!r}")
        if w.witness is None:
            raise ValueError("report has no witness")
        w = w.witness
    if isinstance(w, Witness):
        k0, lo, hi = w.k, w.xi_lo, w.xi_hi
    else:
        lo = as_fraction(xi_lo)
        hi = lo if xi_hi is None else as_fraction(xi_hi)
    if lo > hi:
        lo, hi = hi, lo
    coeffs = list(sym.P) or [ZERO]
    coeffs[0] = coeffs[0] + ceval(sym.Q, int(k0))
    g = pgcd(real_part(coeffs), imag_part(coeffs))
    if not g:
        return True  # the form vanishes for every xi at this k
    if degree(g) == 0:
        return False
    return count_roots(g, lo, hi) > 0


# ----------------------------------------------------------------------
# dispatch
# ----------------------------------------------------------------------

def normal_form_operator(op: FirstOrderVariable) -> FirstOrderConstant:
    return FirstOrderConstant(1, op.a.mean(), op.q.mean())


def decide_sgh(op) -> SghReport:
    """SGH verdict for any supported operator variant."""
    if isinstance(op, FirstOrderConstant):
        return decide_sgh_first_order(op.c1, op.c2, op.c3)
    if isinstance(op, SeparablePoly):
        return decide_sgh_separable(op)
    if isinstance(op, FirstOrderVariable):
        l0 = normal_form_operator(op)
        inner = decide_sgh_first_order(l0.c1, l0.c2, l0.c3)
        return SghReport(inner.verdict, Method.CONJUGATED, witness=inner.witness, gap=inner.gap,
                         gap_certified=inner.gap_certified, normal_form=l0,
                         notes=inner.notes + (f"normal form {l0.to_text()}",),
                         operator=op.to_text())
    raise TypeError(f"not an operator: {op!r}")
