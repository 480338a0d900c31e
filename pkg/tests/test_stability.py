import numpy as np
import pytest

from vortexsheet import (
    FluidParams,
    Grid,
    GridFunction,
    derive_constants,
    dispersion_rate,
    evaluate_rt,
    frozen_symbols,
    rhs_evolution,
    rhs_no_tension,
    rt_tolerance,
    solve_omega,
    spectral_derivative,
)


@pytest.fixture
def grid():
    return Grid(20.0, 256)


def constants(a_mu, theta):
    return derive_constants(FluidParams.normalized(a_mu, theta))


# ---------------------------------------------------------------------------
# Rayleigh-Taylor functional

@pytest.mark.parametrize("theta,member", [(1.0, True), (-1.0, False), (0.0, False)])
def test_flat_state_membership_follows_sign(grid, theta, member):
    # flat interface: omega0 = 0, so a_RT == c_rho_mu everywhere
    c = constants(0.5, theta)
    report = evaluate_rt(GridFunction.zeros(grid), c)
    assert report.infimum == c.c_rho_mu
    assert report.in_O is member
    assert np.all(report.a_rt.values == c.c_rho_mu)


def test_rt_equals_constant_plus_twice_amu_dfdt(grid):
    # a_RT = c_rho_mu + 2 a_mu * dfdt whenever omega solves the zero-tension
    # sheet equation, so the evolution must be the sigma = 0 one
    c = constants(0.6, 1.0)
    p = FluidParams.normalized(0.6, 1.0, sigma=0.0)
    f = GridFunction(grid, 0.5 * np.exp(-grid.x**2))
    report = evaluate_rt(f, c)
    dfdt, _ = rhs_evolution(f, p)
    expected = c.c_rho_mu + 2.0 * c.a_mu * dfdt.values
    assert np.abs(report.a_rt.values - expected).max() <= 1e-12


def test_rt_infimum_is_min_of_values(grid):
    c = constants(0.7, 1.0)
    report = evaluate_rt(GridFunction(grid, 0.4 * np.exp(-grid.x**2)), c)
    assert report.infimum == report.a_rt.values.min()
    assert report.tolerance == rt_tolerance(c)


def test_rt_tolerance_scales_with_constant():
    assert rt_tolerance(constants(0.0, 1.0)) == 1e-10
    assert rt_tolerance(constants(0.0, 200.0)) == pytest.approx(2e-8)
    # tiny constants keep the absolute floor
    small = constants(0.0, 1e-6)
    assert rt_tolerance(small) == 1e-10


# ---------------------------------------------------------------------------
# frozen-coefficient symbols

def test_frozen_symbols_flat_state(grid):
    c = constants(0.5, 2.0)
    zero = GridFunction.zeros(grid)
    sym = frozen_symbols(zero, zero, c)
    assert np.allclose(sym.alpha.values, np.pi * c.c_rho_mu, rtol=0.0, atol=1e-14)
    assert np.all(sym.beta.values == 0.0)
    assert np.all(sym.gamma3.values == np.pi)


def test_frozen_symbols_consistent_with_rt(grid):
    c = constants(0.5, 1.0)
    f = GridFunction(grid, 0.5 * np.exp(-grid.x**2))
    omega0 = solve_omega(f, rhs_no_tension(f, c), c).omega
    sym = frozen_symbols(f, omega0, c)
    fp = spectral_derivative(f, 1).values
    report = evaluate_rt(f, c)
    expected_alpha = np.pi * report.a_rt.values / (1.0 + fp**2)
    assert np.abs(sym.alpha.values - expected_alpha).max() <= 1e-12
    assert np.all(sym.gamma3.values > 0.0)
    assert np.abs(sym.gamma3.values - np.pi / (1.0 + fp**2) ** 1.5).max() <= 1e-14


def test_frozen_symbols_grid_mismatch(grid):
    c = constants(0.5, 1.0)
    with pytest.raises(ValueError):
        frozen_symbols(GridFunction.zeros(grid), GridFunction.zeros(Grid(20.0, 128)), c)


# ---------------------------------------------------------------------------
# dispersion oracle

def test_dispersion_rate_hand_values():
    p = FluidParams.normalized(0.0, 1.0)
    assert dispersion_rate(1.0, False, p) == pytest.approx(0.5)
    assert dispersion_rate(2.0, False, p) == pytest.approx(1.0)
    assert dispersion_rate(4.0, False, p) == pytest.approx(2.0)
    pt = FluidParams.normalized(0.0, 1.0, sigma=1.0)
    assert dispersion_rate(2.0, True, pt) == pytest.approx(0.5 * (8.0 + 2.0))
    p0 = FluidParams.normalized(0.0, 0.0, sigma=1.0)
    assert dispersion_rate(2.0, True, p0) == pytest.approx(4.0)


def test_dispersion_rate_sign_follows_theta():
    grow = FluidParams.normalized(0.0, -1.0)
    assert dispersion_rate(3.0, False, grow) == pytest.approx(-1.5)


def test_dispersion_rate_monotone_in_k():
    p = FluidParams.normalized(0.3, 1.0, sigma=0.5)
    rates = [dispersion_rate(k, True, p) for k in (1.0, 2.0, 4.0, 8.0)]
    assert all(b > a for a, b in zip(rates, rates[1:]))


@pytest.mark.parametrize("k", [0.0, -1.0])
def test_dispersion_rate_rejects_nonpositive_k(k):
    with pytest.raises(ValueError):
        dispersion_rate(k, False, FluidParams.normalized(0.0, 1.0))
