import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylfourier.core import CylinderGrid, MixedSpectrum, SampledField, sample_builtin
from cylfourier.diagnostics import (certificate_holds, certificate_table,
                                    decay_certificate_line, decay_certificate_mixed,
                                    decay_certificate_torus, is_increasing,
                                    refinement_divergence_probe, seminorm, seminorm_pN,
                                    tempered_growth_check)
from cylfourier.transforms import mixed_transform

from conftest import validate

E_HALF = math.exp(-0.5)


def gaussian(grid):
    return SampledField(grid, np.broadcast_to(np.exp(-grid.x ** 2 / 2), grid.shape))


def test_seminorms_of_constants(grid_small):
    one = sample_builtin("constant_one", grid_small)
    assert seminorm(one, 0, 0, 0) == 1
    assert seminorm(one, 1, 0, 0) < 1e-14
    assert seminorm_pN(one, 0) == 1
    assert seminorm_pN(sample_builtin("zero", grid_small), 3) == 0
    with pytest.raises(ValueError):
        seminorm(one, -1, 0, 0)
    with pytest.raises(ValueError):
        seminorm_pN(one, -1)


def test_gaussian_seminorms(grid_gauss):
    f = gaussian(grid_gauss)
    assert seminorm(f, 0, 0, 1) == pytest.approx(E_HALF, abs=1e-6)
    assert seminorm(f, 0, 1, 0) == pytest.approx(E_HALF, abs=1e-6)
    assert seminorm_pN(f, 1) == pytest.approx(1 + 0 + 2 * E_HALF, abs=1e-6)


def test_plane_wave_first_moment_grows_like_X():
    vals = [seminorm(sample_builtin("plane_wave", CylinderGrid(8, 64, X), k0=1), 0, 0, 1)
            for X in (4.0, 8.0, 16.0)]
    np.testing.assert_allclose(vals, np.array([4.0, 8.0, 16.0]) / (2 * np.pi))


@pytest.mark.parametrize("N", range(7))
def test_torus_certificate_calculus_oracle(N, grid_gauss):
    k0 = 2
    f = sample_builtin("gaussian_wave", grid_gauss, k0=k0)
    cert = decay_certificate_torus(f, N, 0)
    peak = 1.0 if N <= 1 else N ** (N / 2) * math.exp(-(N - 1) / 2)
    assert cert.C == pytest.approx((1 + k0 ** 2) ** (N / 2) * peak, rel=1e-3)
    assert grid_gauss.k[cert.argmax[0]] == k0


def test_zero_field_certificates(grid_small):
    z = sample_builtin("zero", grid_small)
    for N in range(3):
        for b in range(3):
            assert decay_certificate_mixed(z, N, b).C == 0
            assert decay_certificate_torus(z, N, b).C == 0
            assert decay_certificate_line(z, N, 1, b).C == 0


def test_constant_one_certificates():
    Cs_line, Cs_torus = [], []
    for X in (8.0, 16.0, 32.0):
        g = CylinderGrid(8, 256, X)
        one = sample_builtin("constant_one", g)
        assert decay_certificate_torus(one, 0, 0).C == pytest.approx(1.0)
        # only k = 0 survives, so the k weight is 1 and the x weight peaks at x = -X
        assert decay_certificate_torus(one, 4, 0).C == pytest.approx((1 + X ** 2) ** 2)
        Cs_torus.append(decay_certificate_torus(one, 2, 0).C)
        Cs_line.append(decay_certificate_line(one, 1, 0, 0).C)
    assert is_increasing(Cs_line) and is_increasing(Cs_torus)


fields = st.builds(lambda s, kind: (s, kind), st.integers(0, 10 ** 6),
                   st.sampled_from(["random", "gaussian_wave", "lorentz_wave"]))


def _field(seed, kind, grid):
    if kind == "random":
        r = np.random.default_rng(seed)
        return SampledField(grid, r.standard_normal(grid.shape) + 1j * r.standard_normal(grid.shape))
    return sample_builtin(kind, grid, k0=seed % 3)


@settings(max_examples=30, deadline=None)
@given(fields, st.integers(0, 2))
def test_certificates_hold_and_grow_with_N(spec, beta):
    grid = CylinderGrid(8, 64, 6.0)
    f = _field(*spec, grid)
    prev = {}
    for N in range(5):
        for cert in (decay_certificate_mixed(f, N, beta), decay_certificate_torus(f, N, beta),
                     decay_certificate_line(f, N, 1, beta)):
            assert cert.C >= 0
            assert certificate_holds(cert, f)
            assert cert.C >= prev.get(cert.kind, 0.0)
            prev[cert.kind] = cert.C


def test_certificate_json(grid_small):
    f = sample_builtin("gaussian_wave", grid_small)
    for c in certificate_table(f, range(3), range(2)):
        d = validate(c.to_json(), "certificate")
        assert d["grid"] == grid_small.to_json()


def test_mixed_xi_derivative_identity(grid_gauss):
    # d_xi of sqrt(2 pi) e^{-xi^2/2} on the k = 1 row
    f = sample_builtin("gaussian_wave", grid_gauss)
    cert = decay_certificate_mixed(f, 0, 1)
    assert cert.C == pytest.approx(math.sqrt(2 * math.pi) * E_HALF, rel=1e-3)


def test_tempered_growth():
    grid = CylinderGrid(8, 64, 8.0)
    zero = MixedSpectrum(grid, np.zeros(grid.shape))
    assert tempered_growth_check(zero, 0.0, 0).ok
    g = mixed_transform(sample_builtin("constant_one", grid))
    height = float(np.max(np.abs(g.values)))
    assert np.count_nonzero(np.abs(g.values) > 1e-12) == 1
    assert tempered_growth_check(g, height, 0).ok
    low = tempered_growth_check(g, height * (1 - 1e-9), 0)
    assert not low.ok and low.ratio > 1
    assert grid.k[low.worst[0]] == 0 and grid.xi[low.worst[1]] == 0
    gw = mixed_transform(sample_builtin("gaussian_wave", grid))
    assert tempered_growth_check(gw, float(np.max(np.abs(gw.values))), 0).ok
    with pytest.raises(ValueError):
        tempered_growth_check(g, -1.0, 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0, 5), st.floats(0, 3), st.floats(0, 5), st.floats(0, 3))
def test_tempered_growth_monotone(seed, C, N, dC, dN):
    grid = CylinderGrid(4, 16, 3.0)
    r = np.random.default_rng(seed)
    g = MixedSpectrum(grid, r.standard_normal(grid.shape) * 10)
    if tempered_growth_check(g, C, N).ok:
        assert tempered_growth_check(g, C + dC, N + dN).ok


def test_tanbump_ladder_diverges():
    nts = [16, 64, 256]
    grids = [CylinderGrid(n, 1024, 64.0) for n in nts]
    p0 = refinement_divergence_probe("tanbump", grids)
    assert is_increasing(p0) and p0[-1] > 10
    # nearest non-pole sample to pi/2 has tan t = cot(2 pi / n_t); the peak is tan(t)/e
    for n, v in zip(nts, p0):
        assert v == pytest.approx(1 / math.tan(2 * math.pi / n) / math.e, rel=1e-2)


def test_gaussian_and_constant_ladders_are_flat():
    grids = [CylinderGrid(n, 256, 16.0) for n in (16, 64, 256)]
    g = refinement_divergence_probe("gaussian_wave", grids)
    assert max(g) - min(g) < 1e-6
    assert refinement_divergence_probe("constant_one", grids) == [1.0, 1.0, 1.0]


def test_lorentz_third_moment_doubles():
    vals = [seminorm(sample_builtin("lorentz_wave", CylinderGrid(8, n, X)), 0, 0, 3)
            for n, X in ((256, 8.0), (512, 16.0), (1024, 32.0))]
    # sup of |x|^3 / (1 + x^2) on [-X, X) sits at x = -X
    np.testing.assert_allclose(vals, [X ** 3 / (1 + X ** 2) for X in (8.0, 16.0, 32.0)])
    assert vals[1] >= 2 * vals[0] and vals[2] >= 2 * vals[1]


def test_gaussian_certificates_stable_under_refinement():
    ladder = [CylinderGrid(8, n, X) for n, X in ((256, 8.0), (512, 16.0), (1024, 32.0))]
    for N in (0, 4, 8):
        Cs = [decay_certificate_mixed(sample_builtin("gaussian_wave", g), N, 1).C for g in ladder]
        assert (max(Cs) - min(Cs)) / max(Cs) <= 0.1
