"""Transform conventions and multiplier operators.

The coefficient layout is the documented exp(i pi k x) basis, which
differs from raw FFT indexing by an origin phase because the first node
sits at x = -1, not x = 0. Everything here guards that convention.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracpm import spectral as sp
from fracpm.grid import FracParams, PeriodicGrid, ScalarField

from conftest import band_limited


def test_roundtrip_is_identity_1d():
    grid = PeriodicGrid(1, 128)
    f = ScalarField(grid, np.random.default_rng(1).standard_normal(128))
    back = sp.dft_inverse(sp.dft_forward(f))
    assert np.max(np.abs(back.values - f.values)) < 1e-13


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_roundtrip_is_identity_2d(seed):
    grid = PeriodicGrid(2, 32)
    f = ScalarField(grid, np.random.default_rng(seed).standard_normal((32, 32)))
    back = sp.dft_inverse(sp.dft_forward(f))
    assert np.max(np.abs(back.values - f.values)) < 1e-13


def test_constant_field_maps_to_zero_mode():
    grid = PeriodicGrid(1, 64)
    c = sp.dft_forward(ScalarField(grid, np.full(64, 2.75)))
    assert abs(c.values[0] - 2.75) < 1e-14
    assert np.max(np.abs(c.values[1:])) < 1e-14


def test_coefficients_are_position_true_1d():
    """Summing c(k) exp(i pi k x) off the grid must reproduce the field."""
    grid = PeriodicGrid(1, 256)
    x = grid.axis_nodes()

    def fn(t):
        return np.cos(3 * np.pi * t) + 0.25 * np.sin(7 * np.pi * t)

    c = sp.dft_forward(ScalarField(grid, fn(x)))
    xq = 0.1372
    val = np.real(np.sum(c.values * np.exp(1j * np.pi * grid.wavenumbers() * xq)))
    assert abs(val - fn(xq)) < 1e-12


def test_coefficients_are_position_true_2d():
    grid = PeriodicGrid(2, 32)
    X, Y = grid.nodes()
    f = ScalarField(grid, np.sin(np.pi * X) * np.cos(2 * np.pi * Y))
    c = sp.dft_forward(f)
    kx, ky = grid.wavenumbers()
    xq, yq = 0.31, -0.44
    val = np.real(np.sum(c.values * np.exp(1j * np.pi * (kx * xq + ky * yq))))
    assert abs(val - np.sin(np.pi * xq) * np.cos(2 * np.pi * yq)) < 1e-12


def test_gradient_analytic_1d():
    grid = PeriodicGrid(1, 128)
    x = grid.axis_nodes()
    (gx,) = sp.gradient(ScalarField(grid, np.sin(np.pi * x)))
    assert np.max(np.abs(gx.values - np.pi * np.cos(np.pi * x))) < 1e-12


def test_gradient_analytic_2d():
    grid = PeriodicGrid(2, 32)
    X, Y = grid.nodes()
    gx, gy = sp.gradient(ScalarField(grid, np.sin(np.pi * X) * np.cos(2 * np.pi * Y)))
    assert np.max(np.abs(gx.values - np.pi * np.cos(np.pi * X) * np.cos(2 * np.pi * Y))) < 1e-12
    assert np.max(np.abs(gy.values + 2 * np.pi * np.sin(np.pi * X) * np.sin(2 * np.pi * Y))) < 1e-12


def test_divergence_is_negative_adjoint_of_gradient():
    # <grad u, V> = -<u, div V> for periodic fields
    for dim, n in ((1, 256), (2, 32)):
        grid = PeriodicGrid(dim, n)
        u = band_limited(grid, n // 4, seed=3)
        V = [band_limited(grid, n // 4, seed=10 + i) for i in range(dim)]
        lhs = sum(np.sum(g.values * v.values) for g, v in zip(sp.gradient(u), V))
        rhs = -np.sum(u.values * sp.divergence(V).values)
        assert abs(lhs - rhs) * grid.h**dim < 1e-11


def test_frac_multiplier_properties():
    grid = PeriodicGrid(1, 256)
    p = FracParams(0.7)
    m = sp.frac_multiplier_1d(grid, p)
    k = grid.wavenumbers()
    assert m[0] == 0.0
    body = slice(1, 128)
    assert np.max(np.abs(m[body] + m[-1:-128:-1])) < 1e-12  # odd in k
    mags = np.pi * np.abs(k[body]) ** (1.0 - p.epsilon)
    assert np.max(np.abs(np.abs(m[body]) - mags)) < 1e-11


@pytest.mark.parametrize("k", [1, 5, 17])
def test_frac_derivative_of_single_mode(k):
    grid = PeriodicGrid(1, 256)
    p = FracParams(0.7)
    x = grid.axis_nodes()
    out = sp.frac_derivative_1d(ScalarField(grid, np.cos(k * np.pi * x)), p)
    expect = -np.pi * k ** (1.0 - p.epsilon) * np.sin(k * np.pi * x)
    assert np.max(np.abs(out.values - expect)) < 1e-11


def test_nyquist_mode_is_annihilated():
    # odd multiplier at the unpaired mode: the image must be real, hence zero
    grid = PeriodicGrid(1, 256)
    f = ScalarField(grid, np.cos(np.pi * 128 * grid.axis_nodes()))
    out = sp.frac_derivative_1d(f, FracParams(0.7))
    assert np.max(np.abs(out.values)) < 1e-15


def test_divergence_form_reduces_to_laplacian():
    grid = PeriodicGrid(1, 256)
    u = band_limited(grid, 32, seed=7)
    lap = np.real(
        np.fft.ifft(-((np.pi * grid.wavenumbers()) ** 2) * np.fft.fft(u.values))
    )
    pm = sp.pm_divergence_form(ScalarField(grid, np.ones(256)), u)
    assert np.max(np.abs(pm.values - lap)) < 1e-9
