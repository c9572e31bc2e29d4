import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tumorpen.grid import integrate, laplacian_diagonal, make_grid
from tumorpen.levelset import signed_distance_sphere
from tumorpen.nutrient import (
    check_max_principle,
    diffusivity,
    nutrient_budget_residual,
    step_nutrient,
    substep_count,
)
from tumorpen.penalty import PenaltyParams

FLAT = PenaltyParams(omega=1.0)


def _mode(g):
    return np.prod(np.sin(np.pi * (g.coords + g.half_width) / (2 * g.half_width)), axis=0)


def _all_tumor(g):
    return -np.ones(g.shape)


def test_zero_stays_zero(grid32):
    phi = signed_distance_sphere(grid32, 0.5)
    np.testing.assert_array_equal(step_nutrient(grid32.zeros(), phi, 0.1, PenaltyParams(), 0.3, grid32), 0.0)


def test_pure_decay_halves(grid8, rng):
    C = rng.random(grid8.shape)
    out = step_nutrient(C, _all_tumor(grid8), 0.0, FLAT, math.log(2), grid8)
    np.testing.assert_allclose(out, 0.5 * C, rtol=1e-15)


def test_eigenmode_decay_rate():
    g = make_grid(1.0, 32, 2)
    nu, t = 0.5, 0.02
    L = 2 * g.half_width
    lam = g.dim * (4 / g.h**2) * math.sin(math.pi * g.h / (2 * L)) ** 2
    mode = _mode(g)
    out = step_nutrient(mode, _all_tumor(g), nu, FLAT, t, g)
    ratio = out / np.where(mode > 0, mode, 1.0)
    i = g.n // 2
    observed = -math.log(ratio[i, i]) / t
    assert observed == pytest.approx(nu * lam + 1.0, rel=1e-2)
    # the mode stays a mode
    np.testing.assert_allclose(out, ratio[i, i] * mode, atol=1e-12)


def test_substep_bound(grid32):
    nu = diffusivity(signed_distance_sphere(grid32, 0.5), 1.0, PenaltyParams(), grid32)
    dt = 0.1
    n = substep_count(nu, dt, grid32)
    assert dt / n * laplacian_diagonal(nu, grid32).max() <= 1.0
    assert dt / n <= grid32.h**2 / (2 * grid32.dim * nu.max()) * (1 + 1e-12)
    assert substep_count(grid32.zeros(), dt, grid32) == 1


@given(st.integers(0, 2**31 - 1), st.floats(0.001, 0.5), st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_discrete_max_principle(seed, dt, nu, omega):
    rng = np.random.default_rng(seed)
    g = make_grid(1.0, 8, 2)
    C = rng.random(g.shape) * 0.9
    phi = signed_distance_sphere(g, rng.uniform(0.3, 1.5))
    out = step_nutrient(C, phi, nu, PenaltyParams(omega=omega), dt, g)
    assert out.min() >= 0.0
    assert out.max() <= C.max() * (1 + 1e-12)
    assert check_max_principle(out, C.max(), 1.0)


@given(st.integers(0, 2**31 - 1), st.floats(0.001, 0.5))
def test_comparison_principle(seed, dt):
    rng = np.random.default_rng(seed)
    g = make_grid(1.0, 8, 2)
    lo = rng.random(g.shape)
    hi = lo + rng.random(g.shape)
    phi = signed_distance_sphere(g, 0.8)
    a = step_nutrient(lo, phi, 0.3, PenaltyParams(), dt, g)
    b = step_nutrient(hi, phi, 0.3, PenaltyParams(), dt, g)
    assert np.all(a <= b)


@given(st.integers(0, 2**31 - 1), st.floats(0.001, 0.5))
def test_total_nutrient_nonincreasing(seed, dt):
    rng = np.random.default_rng(seed)
    g = make_grid(1.0, 8, 2)
    C = rng.random(g.shape)
    out = step_nutrient(C, signed_distance_sphere(g, 1.0), 0.5, PenaltyParams(), dt, g)
    assert integrate(out, g) <= integrate(C, g)


def test_budget_residual_zero_state(grid8):
    assert nutrient_budget_residual(grid8.zeros(), grid8.zeros(), _all_tumor(grid8), 0.1, FLAT, 0.1, grid8) == 0.0


@pytest.mark.parametrize("nu", [0.0, 0.1])
def test_budget_residual_first_order(nu):
    g = make_grid(1.0, 64, 2)
    C0 = _mode(g)
    residuals = []
    for dt in (0.02, 0.01, 0.005):
        C1 = step_nutrient(C0, _all_tumor(g), nu, FLAT, dt, g)
        residuals.append(nutrient_budget_residual(C0, C1, _all_tumor(g), nu, FLAT, dt, g))
    for a, b in zip(residuals, residuals[1:]):
        assert 1.7 <= a / b <= 2.3


def test_budget_residual_small_for_eigenmode():
    g = make_grid(1.0, 64, 2)
    C0 = _mode(g)
    energy0 = 0.5 * integrate(C0**2, g)
    dt = 0.002
    C = C0
    for _ in range(10):
        C1 = step_nutrient(C, _all_tumor(g), 0.1, FLAT, dt, g)
        assert nutrient_budget_residual(C, C1, _all_tumor(g), 0.1, FLAT, dt, g) < 1e-2 * energy0
        C = C1


def test_max_principle_check():
    assert check_max_principle(np.zeros(4), 0.0, 1.0)
    C = np.zeros(4)
    C[2] = 1.1
    assert not check_max_principle(C, 1.0, 1.0)
    assert not check_max_principle(-1e-9 * np.ones(2), 1.0, 1.0)
    assert check_max_principle(np.full(2, 1.0 + 1e-13), 1.0, 1.0)
