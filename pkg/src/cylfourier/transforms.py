"""Partial and mixed Fourier transforms on a :class:`CylinderGrid`.

Conventions (all exact discrete sums, evaluated with FFTs)::

    torus   f^(k, x_j)  = (1/n_t) sum_l f(t_l, x_j) e^{-i k t_l}
    line    f^(t_l, xi) = dx sum_j f(t_l, x_j) e^{-i x_j xi}
    inverse torus       = sum_k g(k, x_j) e^{i k t_l}
    inverse line        = (1/2pi) dxi sum_m g(t_l, xi_m) e^{i x_j xi_m}

Because x_j = -X + j dx and xi_m = m pi / X, the kernel e^{-i x_j xi_m}
equals (-1)^m e^{-2 pi i m j / n_x}; the (-1)^m factor is the phase
correction that turns the FFT into the literal quadrature sum.
"""

from __future__ import annotations

import os
from typing import Callable

import numpy as np
import scipy.fft as sfft

from .core import (CylinderGrid, LineSpectrum, MixedSpectrum, SampledField,
                   TorusSpectrum)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("CYL_NUM_THREADS", "1")))
    except ValueError:
        return 1


def _phase(grid: CylinderGrid) -> np.ndarray:
    return np.where(grid.m % 2 == 0, 1.0, -1.0)


def _torus_fwd(a: np.ndarray, n_t: int) -> np.ndarray:
    return sfft.fftshift(sfft.fft(a, axis=0, workers=_workers()), axes=0) / n_t


def _torus_inv(a: np.ndarray, n_t: int) -> np.ndarray:
    return sfft.ifft(sfft.ifftshift(a, axes=0), axis=0, workers=_workers()) * n_t


def _line_fwd(a: np.ndarray, grid: CylinderGrid) -> np.ndarray:
    spec = sfft.fftshift(sfft.fft(a, axis=1, workers=_workers()), axes=1)
    return grid.dx * _phase(grid)[None, :] * spec


def _line_inv(a: np.ndarray, grid: CylinderGrid) -> np.ndarray:
    # (1/2pi) dxi n_x = 1/dx
    b = sfft.ifftshift(_phase(grid)[None, :] * a, axes=1)
    return sfft.ifft(b, axis=1, workers=_workers()) / grid.dx


def _check(obj, cls):
    if not isinstance(obj, cls):
        raise TypeError(f"expected {cls.__name__}, got {type(obj).__name__}")


def fourier_torus(f: SampledField) -> TorusSpectrum:
    _check(f, SampledField)
    return TorusSpectrum(f.grid, _torus_fwd(f.values, f.grid.n_t))


def inv_fourier_torus(g: TorusSpectrum) -> SampledField:
    _check(g, TorusSpectrum)
    return SampledField(g.grid, _torus_inv(g.values, g.grid.n_t))


def fourier_line(f: SampledField) -> LineSpectrum:
    _check(f, SampledField)
    return LineSpectrum(f.grid, _line_fwd(f.values, f.grid))


def inv_fourier_line(g: LineSpectrum) -> SampledField:
    _check(g, LineSpectrum)
    return SampledField(g.grid, _line_inv(g.values, g.grid))


def mixed_transform(f: SampledField, order: str = "torus-first") -> MixedSpectrum:
    """f~(k, xi); ``order`` selects which partial transform runs first."""
    _check(f, SampledField)
    if order == "torus-first":
        vals = _line_fwd(_torus_fwd(f.values, f.grid.n_t), f.grid)
    elif order == "line-first":
        vals = _torus_fwd(_line_fwd(f.values, f.grid), f.grid.n_t)
    else:
        raise ValueError(f"unknown order {order!r}")
    return MixedSpectrum(f.grid, vals)


def inv_mixed(g: MixedSpectrum) -> SampledField:
    _check(g, MixedSpectrum)
    return SampledField(g.grid, _torus_inv(_line_inv(g.values, g.grid), g.grid.n_t))


def mixed_to_torus(g: MixedSpectrum) -> TorusSpectrum:
    _check(g, MixedSpectrum)
    return TorusSpectrum(g.grid, _line_inv(g.values, g.grid))


def mixed_to_line(g: MixedSpectrum) -> LineSpectrum:
    _check(g, MixedSpectrum)
    return LineSpectrum(g.grid, _torus_inv(g.values, g.grid.n_t))


# ----------------------------------------------------------------------
# multipliers
# ----------------------------------------------------------------------

def derivative_multiplier(grid: CylinderGrid, alpha: int, beta: int) -> np.ndarray:
    """(ik)^alpha (i xi)^beta on the dual mesh, including the Nyquist row/column."""
    if alpha < 0 or beta < 0:
        raise ValueError("derivative orders must be nonnegative")
    K, XI = grid.dual_mesh()
    return (1j * K) ** alpha * (1j * XI) ** beta


def spectral_derivative(f: SampledField, alpha: int, beta: int) -> SampledField:
    """d_t^alpha d_x^beta f by multiplication on the mixed spectrum."""
    _check(f, SampledField)
    if alpha == 0 and beta == 0:
        return f
    if alpha < 0 or beta < 0:
        raise ValueError("derivative orders must be nonnegative")
    vals = f.values
    if alpha:
        k = f.grid.k[:, None]
        vals = _torus_inv((1j * k) ** alpha * _torus_fwd(vals, f.grid.n_t), f.grid.n_t)
    if beta:
        xi = f.grid.xi[None, :]
        vals = _line_inv((1j * xi) ** beta * _line_fwd(vals, f.grid), f.grid)
    return SampledField(f.grid, vals)


def apply_multiplier(g: MixedSpectrum, sigma) -> MixedSpectrum:
    """Pointwise product of ``g`` with a symbol.

    ``sigma`` is either an array shaped like the grid (indexed ``[k, m]``) or
    a callable ``sigma(K, XI)`` evaluated on the dual mesh.
    """
    _check(g, MixedSpectrum)
    if callable(sigma):
        K, XI = g.grid.dual_mesh()
        s = np.asarray(sigma(K, XI), dtype=np.complex128)
        s = np.broadcast_to(s, g.grid.shape)
    else:
        s = np.asarray(sigma, dtype=np.complex128)
        if s.shape != g.grid.shape:
            raise ValueError(f"symbol shape {s.shape} does not match grid {g.grid.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("symbol has non-finite values on the lattice")
    return MixedSpectrum(g.grid, g.values * s)


def apply_symbol(f: SampledField, sigma: Callable) -> SampledField:
    return inv_mixed(apply_multiplier(mixed_transform(f), sigma))


# ----------------------------------------------------------------------
# norms and diagnostics
# ----------------------------------------------------------------------

def discrete_l1(f: SampledField) -> float:
    return float(f.grid.dt * f.grid.dx * np.sum(np.abs(f.values)))


def plancherel_sides(f: SampledField, g: MixedSpectrum | None = None) -> tuple[float, float]:
    """(1/n_t) sum |f|^2 dx and sum |f~|^2 dxi / 2pi."""
    g = mixed_transform(f) if g is None else g
    grid = f.grid
    lhs = float(np.sum(np.abs(f.values) ** 2) * grid.dx / grid.n_t)
    rhs = float(np.sum(np.abs(g.values) ** 2) * grid.dxi / (2 * np.pi))
    return lhs, rhs


def truncation_report(f: SampledField) -> dict:
    """Boundary magnitudes showing how well the truncated grid holds ``f``.

    ``x_tail`` is max |f| on the outermost x samples and ``xi_tail`` the
    max of |f~| on the outermost xi columns.
    """
    g = mixed_transform(f)
    a = np.abs(f.values)
    b = np.abs(g.values)
    x_tail = float(max(a[:, 0].max(), a[:, 1].max(), a[:, -1].max()))
    xi_tail = float(max(b[:, 0].max(), b[:, 1].max(), b[:, -1].max()))
    return {"x_tail": x_tail, "xi_tail": xi_tail, "max_abs": float(a.max()),
            "boundary": max(x_tail, xi_tail)}

