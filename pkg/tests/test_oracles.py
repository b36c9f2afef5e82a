import numpy as np
import pytest

from fracpm.geometry import JumpSet1D
from fracpm.grid import FracParams
from fracpm.kernel import ClausenEvaluator
from fracpm.oracles import (
    alpha_H_and_derivatives,
    beta_condition,
    fracH_1d,
    fracH_1d_derivative,
)

STEP = JumpSet1D.symmetric_step()
X = np.array([-0.9, -0.3, 0.05, 0.21, 0.4, 0.77])


def test_step_field_matches_mpmath_route():
    # same jump decomposition, but the kernel evaluated through mpmath
    # polylogs instead of the accelerated series split
    p = FracParams(0.3)
    ev = ClausenEvaluator(p)
    sizes = STEP.jump_sizes()
    ref = sum(
        0.5 * sizes[i] * ev.mp_reference(X - STEP.positions[i]) for i in range(2)
    )
    assert np.max(np.abs(fracH_1d(STEP, p, X) - ref)) < 1e-12


def test_step_field_is_odd():
    p = FracParams(0.45)
    x = np.array([0.05, 0.2, 0.35, 0.9])
    assert np.max(np.abs(fracH_1d(STEP, p, -x) + fracH_1d(STEP, p, x))) < 1e-13


def test_step_field_diverges_at_jump():
    p = FracParams(0.3)
    d = np.array([1e-6, 1e-5, 1e-4])
    vals = np.abs(fracH_1d(STEP, p, 0.5 + d))
    assert np.all(np.diff(vals) < 0)
    slope = np.diff(np.log(vals)) / np.diff(np.log(d))
    assert np.max(np.abs(slope - (p.epsilon - 1.0))) < 5e-3


@pytest.mark.parametrize("order", [1, 2])
def test_step_field_derivatives_match_fd(order):
    p = FracParams(0.7)
    x = np.array([0.1, 0.3, 0.8])
    h = 1e-5
    if order == 1:
        fd = (fracH_1d(STEP, p, x + h) - fracH_1d(STEP, p, x - h)) / (2 * h)
        tol = 1e-6
    else:
        fd = (
            fracH_1d(STEP, p, x + h)
            - 2 * fracH_1d(STEP, p, x)
            + fracH_1d(STEP, p, x - h)
        ) / h**2
        tol = 1e-2
    assert np.max(np.abs(fracH_1d_derivative(STEP, p, x, order) - fd)) < tol


def test_alpha_is_reciprocal_of_one_plus_field_squared():
    p = FracParams(0.3)
    x = 0.5 + np.array([1e-3, 3e-3, 1e-2])
    alpha, _, _ = alpha_H_and_derivatives(STEP, p, x)
    f = fracH_1d(STEP, p, x)
    assert np.max(np.abs(alpha - 1.0 / (1.0 + f * f))) < 1e-14


def test_alpha_first_derivative_against_independent_stencil():
    p = FracParams(0.3)
    x = 0.5 + np.array([2e-3, 5e-3])
    _, d_alpha, _ = alpha_H_and_derivatives(STEP, p, x)
    h = 1e-7  # far below the distance-scaled stencil used internally
    f_p = fracH_1d(STEP, p, x + h)
    f_m = fracH_1d(STEP, p, x - h)
    fd = (1.0 / (1.0 + f_p**2) - 1.0 / (1.0 + f_m**2)) / (2 * h)
    assert np.max(np.abs(d_alpha - fd) / np.abs(fd)) < 1e-4


def test_alpha_rejects_the_excluded_parameter():
    from fracpm.errors import ExcludedParameterError

    with pytest.raises(ExcludedParameterError):
        alpha_H_and_derivatives(STEP, FracParams(0.5), np.array([0.6]))


@pytest.mark.parametrize("eps", [0.1, 0.3, 0.45, 0.55, 0.7, 0.9])
def test_beta_routes_agree(eps):
    p = FracParams(eps)
    gap = abs(beta_condition(p, "beta") - beta_condition(p, "quadrature"))
    assert gap < 1e-10


def test_beta_vanishes_exactly_at_half():
    assert abs(beta_condition(FracParams(0.5))) < 1e-14


@pytest.mark.parametrize("eps,sign", [(0.2, 1.0), (0.4, 1.0), (0.6, -1.0), (0.8, -1.0)])
def test_beta_sign_flips_at_half(eps, sign):
    assert sign * beta_condition(FracParams(eps)) > 0.0
