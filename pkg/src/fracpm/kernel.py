"""The periodic singular kernel G_eps and slow reference summations.

G_eps(x) = 2 * sum_{k>=1} cos(pi k x) / k^eps  on the period [-1, 1).

Production evaluation uses the exact reflection form

    G_eps(x) = A |x|^(eps-1) + B * sum_{n>=0} c_n x^(2n),

    A  = 2 Gamma(1-eps) sin(pi eps / 2) pi^(eps-1)
    B  = 2^(1+eps) pi^(eps-1) sin(pi eps / 2)
    c_n = zeta(2n+1-eps) * Gamma(2n+1-eps) / (2n)! / 4^n

obtained from the zeta functional equation; every c_n is positive, the
series converges on |x| <= 1 with ratio ~ x^2/4 per term, and the singular
prefactor A is explicit. The n = 0 coefficient needs zeta(1 - eps) with
argument inside (0, 1), which scipy's zeta does not cover; that single
scalar comes from mpmath and is cached per evaluator.

Two independent slow routes exist for cross-checks: a (tapered) direct
partial sum of the defining series, and mpmath's polylogarithm
2 Re Li_eps(e^{i pi x}) evaluated in arbitrary precision.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln, zeta as hurwitz_zeta

from .grid import FracParams

_SERIES_TERMS = 72


def _zeta_below_one(s: float) -> float:
    import mpmath

    return float(mpmath.zeta(s))


class ClausenEvaluator:
    """Evaluates G_eps and its first two derivatives anywhere on the period.

    The evaluator wraps its argument into [-1, 1); the kernel is even, with
    an integrable power singularity at x = 0 (evaluating exactly at a jump
    returns +inf by design, callers keep a positive distance).
    """

    def __init__(self, p: FracParams):
        self.p = p
        eps = p.epsilon
        sin_half = np.sin(np.pi * eps / 2.0)
        self.A = 2.0 * np.exp(gammaln(1.0 - eps)) * sin_half * np.pi ** (eps - 1.0)
        self.B = 2.0 ** (1.0 + eps) * np.pi ** (eps - 1.0) * sin_half
        n = np.arange(_SERIES_TERMS)
        z = np.empty(_SERIES_TERMS)
        z[0] = _zeta_below_one(1.0 - eps)
        z[1:] = hurwitz_zeta(2.0 * n[1:] + 1.0 - eps)
        self.coeffs = z * np.exp(
            gammaln(2.0 * n + 1.0 - eps) - gammaln(2.0 * n + 1.0)
        ) * 0.25**n

    @staticmethod
    def _wrap(x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.mod(x + 1.0, 2.0) - 1.0

    def values(self, x) -> np.ndarray:
        x = self._wrap(x)
        ax = np.abs(x)
        eps = self.p.epsilon
        with np.errstate(divide="ignore"):
            sing = np.where(ax > 0, ax ** (eps - 1.0), np.inf)
        smooth = np.polynomial.polynomial.polyval(x * x, self.coeffs)
        return self.A * sing + self.B * smooth

    def derivative(self, x, order: int = 1) -> np.ndarray:
        """d^order G / dx^order for order in {1, 2}, away from x = 0."""
        x = self._wrap(x)
        ax = np.abs(x)
        s = np.sign(x)
        eps = self.p.epsilon
        c = self.coeffs
        two_n = 2.0 * np.arange(len(c))
        if order == 1:
            sing = self.A * (eps - 1.0) * ax ** (eps - 2.0) * s
            dc = (c * two_n)[1:]
            smooth = x * np.polynomial.polynomial.polyval(x * x, dc)
            return sing + self.B * smooth
        if order == 2:
            sing = self.A * (eps - 1.0) * (eps - 2.0) * ax ** (eps - 3.0)
            dc2 = (c * two_n * (two_n - 1.0))[1:]
            smooth = np.polynomial.polynomial.polyval(x * x, dc2)
            return sing + self.B * smooth
        raise ValueError("order must be 1 or 2")

    def direct_sum(self, x, n_terms: int, taper: bool = True) -> np.ndarray:
        """Brute-force partial sum of 2 sum cos(pi k x)/k^eps.

        With taper=True a Hann window over the second half of the terms
        removes the conditional-convergence ripple of a hard cutoff; the
        plain cutoff (taper=False) is kept as the crudest possible
        comparator.
        """
        x = np.atleast_1d(self._wrap(x))
        eps = self.p.epsilon
        out = np.zeros(x.shape)
        block = 2_000_000
        half = n_terms // 2
        for lo in range(1, n_terms + 1, block):
            hi = min(lo + block, n_terms + 1)
            k = np.arange(lo, hi, dtype=float)
            w = k ** (-eps)
            if taper:
                mask = k > half
                w[mask] *= 0.5 * (1.0 + np.cos(np.pi * (k[mask] - half) / (n_terms - half)))
            out += 2.0 * np.cos(np.pi * np.outer(x, k)) @ w
        return out

    def mp_reference(self, x, dps: int = 40) -> np.ndarray:
        """Arbitrary-precision values via 2 Re Li_eps(e^{i pi x})."""
        import mpmath

        x = np.atleast_1d(self._wrap(x))
        vals = np.empty(x.shape)
        with mpmath.workdps(dps):
            s = mpmath.mpf(self.p.epsilon)
            for i, xi in enumerate(x.ravel()):
                z = mpmath.expjpi(mpmath.mpf(float(xi)))
                li = z * mpmath.lerchphi(z, s, 1)
                vals.ravel()[i] = float(2 * mpmath.re(li))
        return vals


def kernel_at_one(p: FracParams) -> float:
    """Closed form G_eps(1) = -2 * eta(eps) (alternating zeta)."""
    eps = p.epsilon
    return float(-2.0 * (1.0 - 2.0 ** (1.0 - eps)) * _zeta_below_one(eps))


def series_frac_derivative(modes, p: FracParams, x) -> np.ndarray:
    """Mode-by-mode oracle for the 1D fractional derivative.

    Sums c(k) * (i pi k / |k|^eps) * e^{i pi k x} over the resolved modes
    (the Nyquist mode is skipped, matching the real-part convention of the
    grid operator). `modes` is a SpectralCoeffs; x may be any points.
    """
    x = np.asarray(x, dtype=float)
    n = modes.grid.n
    c = modes.values
    ks = np.fft.fftfreq(n, d=1.0 / n)
    total = np.zeros(x.shape, dtype=complex)
    for j, k in enumerate(ks):
        if k == 0 or k == -n // 2:
            continue
        m = 1j * np.pi * k * abs(k) ** (-p.epsilon)
        total += c[j] * m * np.exp(1j * np.pi * k * x)
    return total.real
