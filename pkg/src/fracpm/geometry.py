"""Jump geometry on the periodic box: 1D jump sets, distances, weights.

The 2D curve machinery lives in `curves`; this module owns everything that
is dimension-agnostic (weight profile, norms, log-log fits) plus the 1D
piecewise-constant step fields.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ExcludedParameterError
from .grid import PeriodicGrid, ScalarField


def periodic_delta(x, a) -> np.ndarray:
    """Signed periodic difference x - a reduced to [-1, 1)."""
    return np.mod(np.asarray(x, dtype=float) - a + 1.0, 2.0) - 1.0


@dataclass(frozen=True)
class JumpSet1D:
    """Sorted jump positions in [-1, 1) and the piecewise values between them.

    values[j] is the field value on [positions[j], positions[j+1]) with the
    last interval wrapping around the period.
    """

    positions: tuple
    values: tuple

    def __post_init__(self):
        pos = tuple(float(p) for p in self.positions)
        if len(pos) < 2:
            raise ConfigError("a 1D jump set needs at least two jumps")
        if any(not (-1.0 <= p < 1.0) for p in pos):
            raise ConfigError("jump positions must lie in [-1, 1)")
        if list(pos) != sorted(pos) or len(set(pos)) != len(pos):
            raise ConfigError("jump positions must be strictly increasing")
        if len(self.values) != len(pos):
            raise ConfigError("need one interval value per jump position")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def symmetric_step(cls, inside=1.0, outside=0.0, half_width=0.5):
        return cls((-half_width, half_width), (inside, outside))

    def jump_sizes(self) -> np.ndarray:
        v = np.asarray(self.values)
        return v - np.roll(v, 1)

    def indicator(self, x) -> np.ndarray:
        x = np.mod(np.asarray(x, dtype=float) + 1.0, 2.0) - 1.0
        idx = np.searchsorted(self.positions, x, side="right") - 1
        idx = np.where(idx < 0, len(self.positions) - 1, idx)
        return np.asarray(self.values)[idx]

    def distance(self, x) -> np.ndarray:
        d = np.min(
            [np.abs(periodic_delta(x, a)) for a in self.positions], axis=0
        )
        return d

    def shifted(self, offset: float) -> "JumpSet1D":
        pos = tuple(np.mod(p + offset + 1.0, 2.0) - 1.0 for p in self.positions)
        order = np.argsort(pos)
        return JumpSet1D(
            tuple(pos[i] for i in order), tuple(self.values[i] for i in order)
        )

    def component_count(self) -> int:
        return len(self.positions)


def ensure_offgrid(geom, grid: PeriodicGrid, tol: float = 1e-12):
    """Shift a geometry off the node/face lattice if it collides.

    Nodes and face midpoints together tile the h/2 lattice, so the default
    symmetric step at +-1/2 collides on every power-of-two grid; a quarter-
    cell translation lands on the h/4 sub-lattice, which can never collide.
    Returns (possibly shifted geometry, shifted: bool) and warns on shift.
    """
    half = grid.h / 2.0
    if isinstance(geom, JumpSet1D):
        res = np.mod(np.asarray(geom.positions) + 1.0, half)
        miss = np.minimum(res, half - res)
        if np.min(miss) < tol:
            shifted = geom.shifted(grid.h / 4.0)
            warnings.warn(
                "jump positions coincide with the node/face lattice; "
                f"translating the jump set by h/4 = {grid.h / 4.0:g}",
                stacklevel=2,
            )
            return shifted, True
        return geom, False
    # 2D curves know their own collision test.
    d_nodes = geom.distance(*grid.nodes())
    faces_x = grid.nodes()[0] + half
    if np.min(d_nodes) < tol or np.min(geom.distance(faces_x, grid.nodes()[1])) < tol:
        shifted = geom.shifted(grid.h / 4.0, grid.h / 4.0)
        warnings.warn(
            "curve touches the node/face lattice; translating by (h/4, h/4)",
            stacklevel=2,
        )
        return shifted, True
    return geom, False


def _hermite_blend_coeffs() -> np.ndarray:
    """Degree-7 two-point Hermite basis on s in [0,1].

    Solves for p with p(0)=p'(0)=..., matching value/slope/2nd/3rd derivative
    at both ends; returned as the coefficient matrix applied to the 8 end
    conditions. Computed once at import via a small linear solve.
    """
    rows = []
    for end in (0.0, 1.0):
        for der in range(4):
            row = np.zeros(8)
            for j in range(der, 8):
                row[j] = np.prod(np.arange(j, j - der, -1)) * end ** (j - der)
            rows.append(row)
    return np.linalg.inv(np.asarray(rows))


_BLEND = _hermite_blend_coeffs()


def weight_profile(d, delta: float) -> np.ndarray:
    """The cutoff weight: d below delta, 1 above 2*delta, C^3 blend between.

    The blend is the degree-7 Hermite interpolant matching value, first,
    second and third derivatives of both branches at d = delta and
    d = 2*delta (a quintic cannot satisfy all eight conditions).
    """
    if delta <= 0:
        raise ConfigError("delta must be positive")
    d = np.asarray(d, dtype=float)
    s = np.clip((d - delta) / delta, 0.0, 1.0)
    # end conditions: value delta, slope delta (d/ds = delta * d/dd), rest 0
    cond = np.array([delta, delta, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
    coeffs = _BLEND @ cond
    blend = np.polynomial.polynomial.polyval(s, coeffs)
    return np.where(d <= delta, d, np.where(d >= 2.0 * delta, 1.0, blend))


@dataclass
class WeightField:
    """weight_profile(distance to the jump set) sampled on a grid."""

    grid: PeriodicGrid
    delta: float
    values: np.ndarray
    distances: np.ndarray

    @classmethod
    def build(cls, grid: PeriodicGrid, geom, delta: float) -> "WeightField":
        if grid.dim == 1:
            d = geom.distance(grid.nodes())
        else:
            d = geom.distance(*grid.nodes())
        return cls(grid, delta, weight_profile(d, delta), d)


def weighted_norm(
    f: ScalarField,
    weight: WeightField,
    order: int = 0,
    p: float = 2.0,
    theta: float = 0.0,
) -> float:
    """|| w^theta D^order f ||_p over the box, trapezoid quadrature.

    D^order collects all spectral partial derivatives of that total order
    (in 2D all mixed partials, combined l2 pointwise). For theta <= -2 the
    integrand is not quadrature-safe next to the jump set, so nodes closer
    than one cell are excluded from the sum.
    """
    from . import spectral

    g = f.grid
    fields = [f]
    for _ in range(order):
        nxt = []
        for fld in fields:
            nxt.extend(spectral.gradient(fld))
        fields = nxt
    mag = np.sqrt(sum(fld.values**2 for fld in fields))
    w = weight.values**theta
    cell = g.h**g.dim
    integrand = (w * mag) ** p
    if theta <= -2.0:
        integrand = np.where(weight.distances >= g.h, integrand, 0.0)
    return float((np.sum(integrand) * cell) ** (1.0 / p))


def probe_distances(d_min: float, d_max: float, count: int) -> np.ndarray:
    if not (0 < d_min < d_max):
        raise ConfigError("need 0 < d_min < d_max")
    return np.geomspace(d_min, d_max, count)


def exponent_fit(d, values, d_min=None, d_max=None):
    """Least-squares slope of log|values| against log d.

    Returns (slope, r_squared, n_used). Requires at least 8 retained samples
    spanning at least two decades; otherwise the fit is meaningless for the
    asymptotics it is used to certify, and ExcludedParameterError is raised.
    """
    d = np.asarray(d, dtype=float)
    y = np.asarray(values, dtype=float)
    keep = np.isfinite(y) & (np.abs(y) > 0) & (d > 0)
    if d_min is not None:
        keep &= d >= d_min * (1.0 - 1e-12)
    if d_max is not None:
        keep &= d <= d_max * (1.0 + 1e-12)
    d, y = d[keep], np.abs(y[keep])
    if d.size < 8:
        raise ExcludedParameterError(
            f"exponent fit needs >= 8 usable samples, got {d.size}"
        )
    span = d.max() / d.min()
    if span < 100.0 * (1.0 - 1e-9):
        raise ExcludedParameterError(
            f"exponent fit window must span >= 2 decades, got {span:.3g}x"
        )
    lx, ly = np.log(d), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - float(np.sum(resid**2) / ss_tot) if ss_tot > 0 else 1.0
    return float(slope), r2, int(d.size)
