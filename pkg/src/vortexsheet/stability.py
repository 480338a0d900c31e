"""Rayleigh-Taylor functional, frozen-coefficient symbols, and linear
dispersion oracles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, _same_grid, spectral_derivative
from .kernels import b01, b11, bnm_apply
from .params import DerivedConstants, FluidParams, derive_constants
from .sheet import rhs_no_tension, solve_omega


@dataclass(frozen=True)
class RTReport:
    """Pointwise Rayleigh-Taylor functional and its sign verdict."""

    a_rt: GridFunction
    infimum: float
    in_O: bool
    tolerance: float


@dataclass(frozen=True)
class FrozenSymbols:
    """Frozen-coefficient symbol data of the linearized evolution.

    alpha: first-order dissipation coefficient (sigma = 0 case),
    pi*a_RT/(1+f'^2).  beta: transport coefficient.  gamma3: third-order
    dissipation coefficient pi/(1+f'^2)^(3/2) (sigma > 0 case), positive.
    """

    alpha: GridFunction
    beta: GridFunction
    gamma3: GridFunction


def rt_tolerance(c: DerivedConstants) -> float:
    """Sign-margin for the strict inequality inf a_RT > 0."""
    return max(1e-12, 1e-10 * max(1.0, abs(c.c_rho_mu)))


def _a_rt_values(f: GridFunction, omega0: GridFunction, c: DerivedConstants) -> np.ndarray:
    fp = spectral_derivative(f, 1).values
    term = bnm_apply(b01(f), omega0).values + fp * bnm_apply(b11(f), omega0).values
    return c.c_rho_mu + (c.a_mu / np.pi) * term


def evaluate_rt(f: GridFunction, c: DerivedConstants) -> RTReport:
    """Evaluate a_RT = c_rho_mu + (a_mu/pi)(B01(f) + f' B11(f)[f,.])[omega0]
    with omega0 the zero-tension sheet strength of f.

    in_O is the strict-positivity verdict with margin rt_tolerance(c).
    """
    omega0 = solve_omega(f, rhs_no_tension(f, c), c).omega
    vals = _a_rt_values(f, omega0, c)
    tol = rt_tolerance(c)
    inf = float(vals.min())
    return RTReport(
        a_rt=GridFunction(f.grid, vals), infimum=inf, in_O=bool(inf > tol), tolerance=tol
    )


def frozen_symbols(
    f: GridFunction, omega0: GridFunction, c: DerivedConstants
) -> FrozenSymbols:
    """Symbols frozen at the state (f, omega0); omega0 must be the sheet
    strength consistent with f (not recomputed here)."""
    _same_grid(f, omega0)
    fp = spectral_derivative(f, 1).values
    s = 1.0 + fp**2
    a_rt = _a_rt_values(f, omega0, c)
    alpha = np.pi * a_rt / s
    beta = bnm_apply(b11(f), omega0).values - c.a_mu * np.pi * omega0.values / s
    gamma3 = np.pi / s**1.5
    g = f.grid
    return FrozenSymbols(
        alpha=GridFunction(g, alpha),
        beta=GridFunction(g, beta),
        gamma3=GridFunction(g, gamma3),
    )


def dispersion_rate(k: float, sigma_on: bool, p: FluidParams) -> float:
    """Predicted linear decay rate of the flat-state mode cos(kx), in
    physical time (the evolution keeps its 1/2pi prefactor).

    sigma_on = False: rate = (c_rho_mu / 2) |k| (negative c_rho_mu means
    growth, the ill-posed regime).  sigma_on = True: rate =
    (b_mu / 2)(sigma |k|^3 + theta |k|).
    """
    if k <= 0:
        raise ValueError("wavenumber k must be positive")
    c = derive_constants(p)
    if sigma_on:
        return 0.5 * c.b_mu * (p.sigma * k**3 + c.theta * k)
    return 0.5 * c.c_rho_mu * k
