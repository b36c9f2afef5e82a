"""Periodic grids on the box [-1, 1)^N and the field/coefficient containers.

Conventions, used everywhere downstream:

* nodes x_j = -1 + j*h with h = 2/n per axis, node j = 0..n-1 (left endpoint
  included, right excluded);
* Fourier basis e^{i pi k . x} with integer wavevectors k; a real field of n
  nodes per axis resolves k in [-n/2, n/2);
* hat coefficients are normalized so that a constant field c has coefficient
  c at k = 0, i.e. forward transform divides by n^N.

Coefficient arrays are stored in numpy's native FFT layout (frequencies
[0, 1, ..., n/2-1, -n/2, ..., -1] per axis); `PeriodicGrid.wavenumbers`
returns matching integer-k arrays so callers never reorder anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ExcludedParameterError


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic grid, n nodes per axis on [-1, 1)^dim."""

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ConfigError(f"dimension must be 1 or 2, got {self.dim}")
        if self.n < 4 or self.n % 2 != 0:
            raise ConfigError(f"grid size must be even and >= 4, got {self.n}")

    @property
    def h(self) -> float:
        return 2.0 / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    def axis_nodes(self) -> np.ndarray:
        """Node coordinates along one axis."""
        return -1.0 + self.h * np.arange(self.n)

    def nodes(self):
        """Coordinate arrays: 1D -> x; 2D -> (X, Y) meshgrid with ij indexing."""
        x = self.axis_nodes()
        if self.dim == 1:
            return x
        return np.meshgrid(x, x, indexing="ij")

    def wavenumbers(self):
        """Integer wavevectors in FFT layout: 1D -> k; 2D -> (KX, KY)."""
        k = np.fft.fftfreq(self.n, d=1.0 / self.n)
        if self.dim == 1:
            return k
        return np.meshgrid(k, k, indexing="ij")


@dataclass(frozen=True)
class FracParams:
    """Fractional order parameter epsilon in the open interval (0, 1).

    forbid_half guards quantities whose sign analysis degenerates at
    epsilon = 1/2; constructing such a quantity there raises
    ExcludedParameterError rather than returning an untrustworthy number.
    """

    epsilon: float
    forbid_half: bool = False

    def __post_init__(self):
        e = self.epsilon
        if not (0.0 < e < 1.0):
            raise ConfigError(f"epsilon must lie in (0, 1), got {e}")
        if self.forbid_half and abs(e - 0.5) < 1e-12:
            raise ExcludedParameterError(
                "epsilon = 1/2 is excluded for sign-definite quantities"
            )


@dataclass
class ScalarField:
    """Real nodal values on a PeriodicGrid."""

    grid: PeriodicGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ConfigError(
                f"field shape {v.shape} does not match grid {self.grid.shape}"
            )
        self.values = v

    @classmethod
    def from_callable(cls, grid: PeriodicGrid, fn) -> "ScalarField":
        if grid.dim == 1:
            return cls(grid, fn(grid.nodes()))
        X, Y = grid.nodes()
        return cls(grid, fn(X, Y))

    def mean(self) -> float:
        return float(np.mean(self.values))

    def linf(self) -> float:
        return float(np.max(np.abs(self.values)))

    def l2(self) -> float:
        """Continuum-normalized L2 norm over the box of volume 2^dim."""
        cell = self.grid.h ** self.grid.dim
        return float(np.sqrt(np.sum(self.values**2) * cell))


@dataclass
class SpectralCoeffs:
    """Hat coefficients in FFT layout; constants have coeff value at k=0."""

    grid: PeriodicGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ConfigError(
                f"coefficient shape {v.shape} does not match grid {self.grid.shape}"
            )
        self.values = v

    def conj_symmetry_defect(self) -> float:
        """Max |c(k) - conj(c(-k))|; zero (to round-off) for real fields."""
        v = self.values
        flipped = np.conj(np.roll(np.flip(v), 1, axis=tuple(range(v.ndim))))
        return float(np.max(np.abs(v - flipped)))
