import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracpm.errors import ConfigError
from fracpm.geometry import (
    JumpSet1D,
    WeightField,
    ensure_offgrid,
    exponent_fit,
    periodic_delta,
    probe_distances,
    weight_profile,
    weighted_norm,
)
from fracpm.grid import PeriodicGrid, ScalarField


def test_weight_profile_plateau_and_identity():
    delta = 0.1
    d = np.array([0.0, 0.03, 0.09, 0.21, 0.5, 0.99])
    w = weight_profile(d, delta)
    assert np.allclose(w[:3], d[:3], atol=1e-15)
    assert np.allclose(w[3:], 1.0, atol=1e-15)


def test_weight_profile_blend_is_c3():
    """Fit the exact blend polynomial from sampled values and check that
    value and first three derivatives match both branches at the knots."""
    delta = 0.1
    s = np.linspace(0.02, 0.98, 24)  # strictly inside the blend region
    y = weight_profile(delta * (1.0 + s), delta)
    poly = np.polynomial.Polynomial.fit(s, y, 7).convert()
    resid = np.max(np.abs(poly(s) - y))
    assert resid < 1e-12  # the blend really is a degree-7 polynomial
    derivs = [poly.deriv(m) for m in range(4)]
    # at s=0: value delta, slope delta in s (slope 1 in d), higher zero
    left = [derivs[m](0.0) for m in range(4)]
    assert abs(left[0] - delta) < 1e-9
    assert abs(left[1] - delta) < 1e-7
    assert abs(left[2]) < 1e-5 and abs(left[3]) < 1e-3
    # at s=1: value 1, all derivatives zero
    right = [derivs[m](1.0) for m in range(4)]
    assert abs(right[0] - 1.0) < 1e-9
    assert abs(right[1]) < 1e-7
    assert abs(right[2]) < 1e-5 and abs(right[3]) < 1e-3


@settings(max_examples=40, deadline=None)
@given(delta=st.floats(0.02, 0.4))
def test_weight_profile_monotone(delta):
    d = np.linspace(0.0, 3.0 * delta, 400)
    w = weight_profile(d, delta)
    assert np.all(np.diff(w) >= -1e-12)
    assert np.all((w >= -1e-15) & (w <= 1.0 + 1e-12))


def test_weight_profile_rejects_bad_delta():
    with pytest.raises(ConfigError):
        weight_profile(np.array([0.1]), 0.0)


def test_periodic_delta_wraps_shortest_way():
    assert abs(periodic_delta(1.9, -1.9) - (-0.2)) < 1e-14
    assert abs(periodic_delta(0.3, -0.2) - 0.5) < 1e-14
    assert abs(periodic_delta(-0.99, 0.99) - 0.02) < 1e-14


def test_probe_distances_geometric():
    d = probe_distances(1e-4, 1e-2, 32)
    assert len(d) == 32
    assert abs(d[0] - 1e-4) < 1e-18 and abs(d[-1] - 1e-2) < 1e-16
    ratios = d[1:] / d[:-1]
    assert np.max(np.abs(ratios - ratios[0])) < 1e-12


def test_exponent_fit_recovers_pure_power():
    d = probe_distances(1e-4, 1e-2, 20)
    slope, r2, n_used = exponent_fit(d, 3.7 * d**-0.42)
    assert abs(slope - (-0.42)) < 1e-10
    assert r2 > 1.0 - 1e-12
    assert n_used == 20


def test_exponent_fit_requires_two_decades():
    from fracpm.errors import ExcludedParameterError

    d = probe_distances(1e-3, 5e-2, 16)
    with pytest.raises(ExcludedParameterError):
        exponent_fit(d, d**2)


def test_jump_set_indicator_distance_components():
    geom = JumpSet1D.symmetric_step()
    x = np.array([-0.9, -0.5 + 1e-9, 0.0, 0.49, 0.51])
    ind = geom.indicator(x)
    assert list(ind) == [0.0, 1.0, 1.0, 1.0, 0.0]
    assert geom.component_count() == 2
    d = geom.distance(np.array([0.0, 0.6, -0.95]))
    assert np.allclose(d, [0.5, 0.1, 0.45], atol=1e-14)
    assert np.max(np.abs(geom.jump_sizes() - np.array([1.0, -1.0]))) == 0.0


def test_ensure_offgrid_shifts_by_quarter_cell():
    grid = PeriodicGrid(1, 256)
    geom = JumpSet1D.symmetric_step()
    with pytest.warns(UserWarning):
        moved, shifted = ensure_offgrid(geom, grid)
    assert shifted
    assert np.allclose(
        np.asarray(moved.positions) - np.asarray(geom.positions),
        grid.h / 4.0,
        atol=1e-15,
    )
    # second pass is a no-op
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        again, shifted2 = ensure_offgrid(moved, grid)
    assert not shifted2
    assert again is moved


def _weight_field(grid, geom, delta=0.1):
    d = geom.distance(grid.axis_nodes())
    return WeightField(grid, delta, weight_profile(d, delta), d)


def test_weighted_norm_homogeneity_and_zero_order():
    grid = PeriodicGrid(1, 256)
    geom = JumpSet1D.symmetric_step(half_width=0.5 + grid.h / 4)
    wf = _weight_field(grid, geom)
    f = ScalarField(grid, np.sin(np.pi * grid.axis_nodes()))
    n1 = weighted_norm(f, wf)
    n3 = weighted_norm(ScalarField(grid, 3.0 * f.values), wf)
    assert abs(n3 - 3.0 * n1) < 1e-12 * n1
    assert n1 > 0.0


def test_weighted_norm_gradient_order_kills_constants():
    grid = PeriodicGrid(1, 128)
    geom = JumpSet1D.symmetric_step(half_width=0.5 + grid.h / 4)
    wf = _weight_field(grid, geom)
    const = ScalarField(grid, np.full(128, 4.2))
    assert weighted_norm(const, wf, order=1) < 1e-14
    assert weighted_norm(const, wf, order=0) > 0.0


def test_weighted_norm_theta_weighting_shrinks():
    # weight <= 1 everywhere, so a positive theta power cannot increase it
    grid = PeriodicGrid(1, 128)
    geom = JumpSet1D.symmetric_step(half_width=0.5 + grid.h / 4)
    wf = _weight_field(grid, geom)
    f = ScalarField(grid, 1.0 + 0.3 * np.cos(np.pi * grid.axis_nodes()))
    assert weighted_norm(f, wf, theta=2.0) <= weighted_norm(f, wf) + 1e-15
