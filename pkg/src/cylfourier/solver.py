"""Operator application, symbol-division solves and gauge conjugation.

For L = d/dt + a(t) d/dx + q(t) with real a, the conjugations

    Psi_a u = F_R^{-1}{ e^{i xi A(t)} u^(t, xi) }      (x-shift by A(t))
    Psi_q u = e^{Q(t)} u

with A(t) = int_0^t a - a0 t and Q(t) = int_0^t q - q0 t satisfy
L_{a0} Psi_a = Psi_a L and L0 Psi_q = Psi_q L_{a0}, where
L_{a0} = d/dt + a0 d/dx + q(t) and L0 = d/dt + a0 d/dx + q0.  Chaining them
gives L0 Psi = Psi L for Psi = Psi_q o Psi_a, and Lu = f is solved as
u = Psi^{-1} L0^{-1} Psi f.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import resample

from .core import (CylinderGrid, FirstOrderConstant, FirstOrderVariable, SampledField,
                   SeparablePoly, SghReport, TrigPolynomial)
from .symbols import InconsistencyError, decide_sgh, symbol_of
from .transforms import (_line_fwd, _line_inv, apply_multiplier, inv_mixed,
                         mixed_transform, spectral_derivative)

log = logging.getLogger(__name__)

SIGMA_FLOOR = 1e-12


class NotSGHError(RuntimeError):
    """Refusal to solve with an operator that is not SGH; carries the report."""

    def __init__(self, report: SghReport):
        self.report = report
        w = report.witness
        super().__init__(f"operator is not SGH; witness k={w.k}, xi in [{w.xi_lo}, {w.xi_hi}]")


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class NormalFormBundle:
    a0: object
    q0: object
    A: TrigPolynomial
    Q: TrigPolynomial
    L0: FirstOrderConstant

    def to_json(self) -> dict:
        return {"a0": str(self.a0), "q0": str(self.q0), "A": self.A.to_json(),
                "Q": self.Q.to_json(), "L0": self.L0.to_json()}


@dataclass(frozen=True)
class SolveResult:
    u: SampledField
    report: SghReport
    residual_inf: float
    normal_form: Optional[NormalFormBundle] = None
    warnings: tuple = field(default_factory=tuple)

    def to_json(self, operator=None) -> dict:
        return {
            "operator": operator.to_json() if operator is not None else self.report.operator,
            "grid": self.u.grid.to_json(),
            "sgh_report": self.report.to_json(),
            "residual_inf": self.residual_inf,
            "normal_form": self.normal_form.to_json() if self.normal_form else None,
            "warnings": list(self.warnings),
        }


def fourier_symbol(op, grid) -> np.ndarray:
    """sigma(k, xi) on the dual mesh: L e^{i(kt + xi x)} = sigma e^{i(kt + xi x)}."""
    K, XI = grid.dual_mesh()
    return symbol_of(op).fourier(K, XI)


def apply_operator(op, u: SampledField) -> SampledField:
    if isinstance(op, (FirstOrderConstant, SeparablePoly)):
        return inv_mixed(apply_multiplier(mixed_transform(u), fourier_symbol(op, u.grid)))
    if isinstance(op, FirstOrderVariable):
        t = u.grid.t[:, None]
        ut = spectral_derivative(u, 1, 0).values
        ux = spectral_derivative(u, 0, 1).values
        return SampledField(u.grid, ut + op.a(t) * ux + op.q(t) * u.values)
    raise TypeError(f"not an operator: {op!r}")


def _max_diff(a: SampledField, b: SampledField) -> float:
    return float(np.max(np.abs(a.values - b.values)))


def solve_constant(op, f: SampledField, report: Optional[SghReport] = None) -> SolveResult:
    """u = inv_mixed(f~ / sigma) for an SGH constant-coefficient operator."""
    if isinstance(op, FirstOrderVariable):
        raise TypeError("variable coefficients: use solve_variable_real")
    report = decide_sgh(op) if report is None else report
    if not report.is_sgh:
        raise NotSGHError(report)
    sigma = fourier_symbol(op, f.grid)
    smallest = float(np.min(np.abs(sigma)))
    if smallest < SIGMA_FLOOR:
        raise InconsistencyError(f"|sigma| = {smallest:.3g} on the lattice of an SGH operator")
    u = inv_mixed(apply_multiplier(mixed_transform(f), 1.0 / sigma))
    residual = _max_diff(apply_operator(op, u), f)
    return SolveResult(u, report, residual)


# ----------------------------------------------------------------------
# conjugation
# ----------------------------------------------------------------------

def compute_normal_form(a: TrigPolynomial, q: TrigPolynomial) -> NormalFormBundle:
    if not a.is_real:
        raise ValueError("a(t) must be real valued")
    a0, q0 = a.mean(), q.mean()
    return NormalFormBundle(a0, q0, a.integral_from_zero(), q.integral_from_zero(),
                            FirstOrderConstant(1, a0, q0))


def _window_warnings(A: TrigPolynomial, grid) -> list[str]:
    shift = float(np.max(np.abs(A(np.linspace(0, 2 * np.pi, 512, endpoint=False)))))
    if shift > grid.X / 4:
        msg = f"max|A| = {shift:.3g} exceeds X/4 = {grid.X / 4:.3g}; x-shifts may hit the window edge"
        warnings.warn(msg, TruncationWarning, stacklevel=3)
        return [msg]
    return []


def psi_a(u: SampledField, A: TrigPolynomial, sign: int = 1) -> SampledField:
    """Multiply the x-spectrum by e^{i sign xi A(t)}: a shift of u by sign A(t) in x."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not A.is_real:
        raise ValueError("A(t) must be real valued")
    grid = u.grid
    phase = np.exp(1j * sign * grid.xi[None, :] * A(grid.t).real[:, None])
    return SampledField(grid, _line_inv(phase * _line_fwd(u.values, grid), grid))


def psi_q(u: SampledField, Q: TrigPolynomial, sign: int = 1) -> SampledField:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return SampledField(u.grid, np.exp(sign * Q(u.grid.t))[:, None] * u.values)


def psi(u: SampledField, bundle: NormalFormBundle, sign: int = 1) -> SampledField:
    """Psi = Psi_q o Psi_a, and its inverse Psi_a^{-1} o Psi_q^{-1} for sign -1."""
    if sign == 1:
        return psi_q(psi_a(u, bundle.A, 1), bundle.Q, 1)
    return psi_a(psi_q(u, bundle.Q, -1), bundle.A, -1)


def intermediate_operator(op: FirstOrderVariable, bundle: NormalFormBundle) -> FirstOrderVariable:
    """L_{a0} = d/dt + a0 d/dx + q(t)."""
    return FirstOrderVariable(TrigPolynomial.constant(bundle.a0), op.q)


def conjugation_residuals(op: FirstOrderVariable, bundle: NormalFormBundle,
                          u: SampledField) -> dict:
    """Sup-norm residuals of the three conjugation identities on ``u``."""
    if bundle != compute_normal_form(op.a, op.q):
        raise ValueError("bundle was not computed from this operator's coefficients")
    la0 = intermediate_operator(op, bundle)
    l0 = FirstOrderVariable(TrigPolynomial.constant(bundle.a0), TrigPolynomial.constant(bundle.q0))
    r_a = _max_diff(apply_operator(la0, psi_a(u, bundle.A)), psi_a(apply_operator(op, u), bundle.A))
    r_q = _max_diff(apply_operator(l0, psi_q(u, bundle.Q)), psi_q(apply_operator(la0, u), bundle.Q))
    r = _max_diff(apply_operator(bundle.L0, psi(u, bundle)), psi(apply_operator(op, u), bundle))
    return {"a": r_a, "q": r_q, "full": r}


def conjugation_residual(op: FirstOrderVariable, bundle: NormalFormBundle,
                         u: SampledField) -> float:
    """||L0 Psi u - Psi L u||_inf."""
    return conjugation_residuals(op, bundle, u)["full"]


def _refine_t(f: SampledField, factor: int) -> SampledField:
    """Trigonometric interpolation of ``f`` onto ``factor`` times as many t nodes."""
    g = f.grid
    fine = CylinderGrid(g.n_t * factor, g.n_x, g.X)
    return SampledField(fine, resample(f.values, fine.n_t, axis=0))


def solve_variable_real(op: FirstOrderVariable, f: SampledField,
                        t_oversample: int = 4) -> SolveResult:
    """Solve Lu = f by conjugation to the normal form.

    The factor e^{i xi A(t)} widens the t-spectrum, so the conjugated
    problem is solved on a t-grid ``t_oversample`` times finer (built by
    trigonometric interpolation of f) and the result is sampled back.
    """
    if isinstance(op, (FirstOrderConstant, SeparablePoly)):
        return solve_constant(op, f)
    if not op.a.is_real:
        raise ValueError("a(t) must be real valued")
    if t_oversample < 1:
        raise ValueError("t_oversample must be a positive integer")
    bundle = compute_normal_form(op.a, op.q)
    report = decide_sgh(op)
    if not report.is_sgh:
        raise NotSGHError(report)
    notes = _window_warnings(bundle.A, f.grid)
    ff = _refine_t(f, t_oversample) if t_oversample > 1 else f
    inner = solve_constant(bundle.L0, psi(ff, bundle), report=decide_sgh(bundle.L0))
    u = SampledField(f.grid, psi(inner.u, bundle, -1).values[::t_oversample])
    residual = _max_diff(apply_operator(op, u), f)
    log.debug("variable solve residual %.3g (inner %.3g)", residual, inner.residual_inf)
    return SolveResult(u, report, residual, bundle, tuple(notes))


def solve(op, f: SampledField) -> SolveResult:
    if isinstance(op, FirstOrderVariable):
        return solve_variable_real(op, f)
    return solve_constant(op, f)

