import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vortexsheet import (
    Grid,
    GridFunction,
    boundary_decay_ratio,
    hilbert_transform,
    integrate,
    l2_norm,
    require_decay,
    sobolev_norm,
    spectral_derivative,
)


def test_grid_geometry():
    g = Grid(10.0, 64)
    assert g.h == pytest.approx(20.0 / 64)
    assert g.x[0] == -10.0
    assert g.x[-1] == pytest.approx(10.0 - g.h)
    assert np.allclose(np.diff(g.x), g.h)
    # rfft wavenumbers are m*pi/L
    assert g.xi[1] == pytest.approx(np.pi / 10.0)
    assert g.xi[-1] == pytest.approx(np.pi / g.h)


@pytest.mark.parametrize("L,n", [(-1.0, 64), (10.0, 8), (10.0, 65)])
def test_grid_invalid(L, n):
    with pytest.raises(ValueError):
        Grid(L, n)


def test_gridfunction_validation():
    g = Grid(10.0, 64)
    with pytest.raises(ValueError):
        GridFunction(g, np.zeros(63))
    with pytest.raises(ValueError):
        GridFunction(g, np.full(64, np.nan))


def test_spectral_derivative_on_modes():
    g = Grid(np.pi, 64)  # period 2*pi, integer wavenumbers on the grid
    u = GridFunction(g, np.sin(3.0 * g.x))
    du = spectral_derivative(u, 1)
    assert np.allclose(du.values, 3.0 * np.cos(3.0 * g.x), atol=1e-12)
    d3u = spectral_derivative(u, 3)
    assert np.allclose(d3u.values, -27.0 * np.cos(3.0 * g.x), atol=1e-10)


def test_spectral_derivative_gaussian():
    g = Grid(15.0, 256)
    u = GridFunction(g, np.exp(-g.x**2))
    exact = -2.0 * g.x * np.exp(-g.x**2)
    assert np.abs(spectral_derivative(u, 1).values - exact).max() < 1e-11
    exact2 = (4.0 * g.x**2 - 2.0) * np.exp(-g.x**2)
    assert np.abs(spectral_derivative(u, 2).values - exact2).max() < 1e-10


def test_spectral_derivative_order_validation():
    g = Grid(10.0, 64)
    with pytest.raises(ValueError):
        spectral_derivative(GridFunction.zeros(g), 4)


def test_hilbert_of_cosine_is_sine():
    g = Grid(np.pi, 128)
    u = GridFunction(g, np.cos(5.0 * g.x))
    assert np.allclose(hilbert_transform(u).values, np.sin(5.0 * g.x), atol=1e-12)
    # H kills the mean
    const = GridFunction(g, np.ones(g.n))
    assert np.abs(hilbert_transform(const).values).max() < 1e-14


def test_hilbert_isometry_on_mean_zero():
    g = Grid(12.0, 256)
    u = GridFunction(g, -2.0 * g.x * np.exp(-g.x**2))  # mean-zero
    hu = hilbert_transform(u)
    assert l2_norm(hu) == pytest.approx(l2_norm(u), rel=1e-12)


def test_integrate_gaussian():
    g = Grid(15.0, 256)
    u = GridFunction(g, np.exp(-g.x**2))
    assert integrate(u) == pytest.approx(np.sqrt(np.pi), rel=1e-12)


def test_sobolev_norm_of_cosine():
    # ||cos(kx)||_{H^s}^2 = L (1 + k^2)^s on [-L, L)
    g = Grid(np.pi, 128)
    k, s = 4.0, 3.0
    u = GridFunction(g, np.cos(k * g.x))
    assert sobolev_norm(u, s) == pytest.approx(
        np.sqrt(np.pi * (1.0 + k**2) ** s), rel=1e-12
    )


def test_sobolev_zero_order_is_l2():
    rng = np.random.default_rng(3)
    g = Grid(8.0, 64)
    u = GridFunction(g, rng.standard_normal(g.n))
    assert sobolev_norm(u, 0.0) == pytest.approx(l2_norm(u), rel=1e-12)


def test_sobolev_rejects_negative_s():
    g = Grid(8.0, 64)
    with pytest.raises(ValueError):
        sobolev_norm(GridFunction.zeros(g), -1.0)


def test_boundary_decay():
    g = Grid(20.0, 256)
    ok = GridFunction(g, np.exp(-g.x**2))
    assert boundary_decay_ratio(ok) < 1e-6
    require_decay(ok)
    bad = GridFunction(g, np.exp(-((g.x - 18.0) ** 2)))
    with pytest.raises(ValueError, match="boundary-decay"):
        require_decay(bad, what="test profile")
    assert boundary_decay_ratio(GridFunction.zeros(g)) == 0.0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_parseval_any_data(seed):
    rng = np.random.default_rng(seed)
    g = Grid(7.0, 64)
    u = GridFunction(g, rng.standard_normal(g.n))
    assert sobolev_norm(u, 0.0) == pytest.approx(l2_norm(u), rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_derivative_is_linear_and_kills_constants(seed):
    rng = np.random.default_rng(seed)
    g = Grid(9.0, 64)
    a = GridFunction(g, rng.standard_normal(g.n))
    b = GridFunction(g, rng.standard_normal(g.n))
    lhs = spectral_derivative(GridFunction(g, a.values + 2.0 * b.values), 1).values
    rhs = spectral_derivative(a, 1).values + 2.0 * spectral_derivative(b, 1).values
    scale = max(1.0, np.abs(rhs).max())
    assert np.abs(lhs - rhs).max() < 1e-12 * scale
    shifted = GridFunction(g, a.values + 5.0)
    assert np.allclose(spectral_derivative(shifted, 1).values,
                       spectral_derivative(a, 1).values, atol=1e-10)
