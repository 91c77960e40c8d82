"""Grid-level decay certificates for the Schwartz class on the cylinder.

A certificate is the smallest constant C for which a decay inequality
holds at every point of one finite grid.  It can refute membership in
S(T^1 x R) (C blows up under refinement) or support it (C stays put);
it never proves it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import CylinderGrid, MixedSpectrum, SampledField, sample_builtin
from .transforms import (_line_fwd, _torus_fwd, mixed_transform,
                         spectral_derivative)


@dataclass(frozen=True)
class DecayCertificate:
    """Extremal constant of a decay inequality on one grid.

    ``kind`` is ``mixed`` (|d_xi^beta f~(k, xi)|), ``torus``
    (|d_x^beta f^(k, x)|) or ``line`` (|d_t^alpha d_xi^beta f^(t, xi)|),
    each weighted by (1 + row^2)^{N/2} (1 + col^2)^{N/2}; the line
    certificate only weights xi.  ``argmax`` holds the (row, col) indices
    of the maximizing point in the array's own indexing.
    """

    kind: str
    N: int
    beta: int
    C: float
    argmax: tuple
    grid: CylinderGrid
    alpha: int = 0

    def to_json(self) -> dict:
        return {"type": self.kind, "N": self.N, "beta": self.beta, "alpha": self.alpha,
                "C": self.C, "argmax_k": int(self.argmax[0]),
                "argmax_xi_index": int(self.argmax[1]), "grid": self.grid.to_json(),
                "label": f"grid-consistent with order {self.N}"}


def _x_moment(f: SampledField, beta: int) -> np.ndarray:
    """Samples of (-ix)^beta f, whose xi-transform is d_xi^beta of f's."""
    return (-1j * f.grid.x[None, :]) ** beta * f.values


def seminorm(f: SampledField, alpha: int, beta: int, gamma: int) -> float:
    """max over the grid of |x^gamma d_t^alpha d_x^beta f|."""
    if min(alpha, beta, gamma) < 0:
        raise ValueError("orders must be nonnegative")
    d = spectral_derivative(f, alpha, beta).values
    return float(np.max(np.abs(f.grid.x[None, :] ** gamma * d)))


def seminorm_pN(f: SampledField, N: int) -> float:
    """Sum of seminorms over all (alpha, beta, gamma) with alpha + beta + gamma <= N."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    total = 0.0
    for a, b, c in itertools.product(range(N + 1), repeat=3):
        if a + b + c <= N:
            total += seminorm(f, a, b, c)
    return total


def _weights(rows: np.ndarray, cols: np.ndarray, N: int) -> np.ndarray:
    return (1.0 + rows[:, None] ** 2) ** (N / 2) * (1.0 + cols[None, :] ** 2) ** (N / 2)


def _certificate(kind, vals, weights, N, beta, grid, alpha=0) -> DecayCertificate:
    weighted = np.abs(vals) * weights
    idx = np.unravel_index(int(np.argmax(weighted)), weighted.shape)
    return DecayCertificate(kind, N, beta, float(weighted[idx]), tuple(int(i) for i in idx),
                            grid, alpha)


def _check_orders(*orders):
    if min(orders) < 0:
        raise ValueError("orders must be nonnegative")


def mixed_derivative_values(f: SampledField, beta: int) -> np.ndarray:
    """d_xi^beta f~ on the lattice, as the mixed transform of (-ix)^beta f."""
    return mixed_transform(SampledField(f.grid, _x_moment(f, beta))).values


def decay_certificate_mixed(f: SampledField, N: int, beta: int) -> DecayCertificate:
    _check_orders(N, beta)
    g = f.grid
    vals = mixed_derivative_values(f, beta)
    return _certificate("mixed", vals, _weights(g.k, g.xi, N), N, beta, g)


def decay_certificate_torus(f: SampledField, N: int, beta: int) -> DecayCertificate:
    _check_orders(N, beta)
    g = f.grid
    vals = _torus_fwd(spectral_derivative(f, 0, beta).values, g.n_t)
    return _certificate("torus", vals, _weights(g.k, g.x, N), N, beta, g)


def decay_certificate_line(f: SampledField, N: int, alpha: int, beta: int) -> DecayCertificate:
    _check_orders(N, alpha, beta)
    g = f.grid
    vals = _line_fwd(spectral_derivative(SampledField(g, _x_moment(f, beta)), alpha, 0).values, g)
    w = np.broadcast_to((1.0 + g.xi[None, :] ** 2) ** (N / 2), g.shape)
    return _certificate("line", vals, w, N, beta, g, alpha)


def certificate_holds(cert: DecayCertificate, f: SampledField, rtol: float = 1e-12) -> bool:
    """Re-check the raw inequality |value| <= C / weight at every grid point."""
    g = f.grid
    if cert.kind == "mixed":
        vals = mixed_derivative_values(f, cert.beta)
        w = _weights(g.k, g.xi, cert.N)
    elif cert.kind == "torus":
        vals = _torus_fwd(spectral_derivative(f, 0, cert.beta).values, g.n_t)
        w = _weights(g.k, g.x, cert.N)
    elif cert.kind == "line":
        vals = _line_fwd(spectral_derivative(SampledField(g, _x_moment(f, cert.beta)),
                                             cert.alpha, 0).values, g)
        w = np.broadcast_to((1.0 + g.xi[None, :] ** 2) ** (cert.N / 2), g.shape)
    else:
        raise ValueError(f"unknown certificate kind {cert.kind!r}")
    return bool(np.all(np.abs(vals) <= cert.C / w * (1 + rtol) + 1e-300))


@dataclass(frozen=True)
class GrowthCheck:
    ok: bool
    worst: tuple  # (k index, xi index) of the largest |g| / bound
    ratio: float  # max |g| / bound; <= 1 when ok


def tempered_growth_check(g: MixedSpectrum, C: float, N: float) -> GrowthCheck:
    """Does |g(k, xi)| <= C (1 + k^2)^{N/2} (1 + xi^2)^{N/2} hold on the lattice?"""
    if C < 0 or N < 0:
        raise ValueError("C and N must be nonnegative")
    grid = g.grid
    bound = C * _weights(grid.k, grid.xi, N)
    a = np.abs(g.values)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = np.where(bound > 0, a / np.where(bound > 0, bound, 1), np.where(a > 0, np.inf, 0.0))
    idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    worst = float(ratio[idx])
    return GrowthCheck(bool(np.all(a <= bound)), tuple(int(i) for i in idx), worst)


def refinement_divergence_probe(name: str, grids: Sequence[CylinderGrid], **params) -> list[float]:
    """p_0 of a builtin evaluated afresh on each grid of a ladder."""
    return [seminorm_pN(sample_builtin(name, g, **params), 0) for g in grids]


def certificate_table(f: SampledField, Ns: Iterable[int], betas: Iterable[int]) -> list[DecayCertificate]:
    out = []
    for N in Ns:
        for b in betas:
            out.append(decay_certificate_mixed(f, N, b))
            out.append(decay_certificate_torus(f, N, b))
    return out


def is_increasing(values: Sequence[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))
