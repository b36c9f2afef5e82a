"""Shared fixtures.

Geometry fixtures silence the off-grid collision warning: the default
symmetric step sits exactly on faces of every power-of-two grid, so the
quarter-cell shift fires on nearly every construction and would drown
real warnings in the test output.
"""

import warnings

import numpy as np
import pytest

from fracpm.curves import Circle
from fracpm.geometry import JumpSet1D, ensure_offgrid
from fracpm.grid import FracParams, PeriodicGrid


def offgrid(geom, grid):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        moved, _ = ensure_offgrid(geom, grid)
    return moved


@pytest.fixture(scope="session")
def step_256():
    grid = PeriodicGrid(1, 256)
    return grid, offgrid(JumpSet1D.symmetric_step(), grid)


@pytest.fixture(scope="session")
def circle_64():
    # radius 0.49 keeps every node off the curve, so the geometry is not
    # shifted and the field keeps the full symmetry of the lattice
    grid = PeriodicGrid(2, 64)
    geom, shifted = ensure_offgrid(Circle((0.0, 0.0), 0.49), grid)
    assert not shifted
    return grid, geom


@pytest.fixture(scope="session")
def singular_field_2d(circle_64):
    from fracpm.evolution import precompute_singular_field

    grid, geom = circle_64
    return precompute_singular_field(grid, geom, FracParams(0.3))


def band_limited(grid, kmax, seed=0):
    """Real random field supported on |k| <= kmax along each axis."""
    rng = np.random.default_rng(seed)
    c = np.fft.fftn(rng.standard_normal(grid.shape))
    k = np.fft.fftfreq(grid.n, d=1.0 / grid.n)
    mask = np.abs(k) > kmax
    if grid.dim == 1:
        c[mask] = 0.0
    else:
        c[mask, :] = 0.0
        c[:, mask] = 0.0
    from fracpm.grid import ScalarField

    return ScalarField(grid, np.real(np.fft.ifftn(c)))
