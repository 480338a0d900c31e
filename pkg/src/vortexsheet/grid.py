"""Uniform periodic grid on a truncated line and spectral primitives.

The continuous problem lives on the whole real line with decaying data; the
discrete surrogate is the interval [-L, L) treated periodically.  Data are
expected to be numerically supported well inside the window; the
boundary-decay diagnostic quantifies that assumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

#: default threshold for the boundary-decay diagnostic: the outermost 5% of
#: nodes must carry at most this fraction of the overall sup norm.
DECAY_TOL = 1e-6


@dataclass(frozen=True)
class Grid:
    """Uniform grid x_j = -L + j*h, j = 0..N-1, h = 2L/N (N even)."""

    half_length: float
    n: int

    def __post_init__(self) -> None:
        if not self.half_length > 0:
            raise ValueError("half_length must be positive")
        if self.n < 16:
            raise ValueError("grid needs at least 16 points")
        if self.n % 2 != 0:
            raise ValueError("N must be even")

    @property
    def h(self) -> float:
        return 2.0 * self.half_length / self.n

    @cached_property
    def x(self) -> np.ndarray:
        return -self.half_length + self.h * np.arange(self.n)

    @cached_property
    def xi(self) -> np.ndarray:
        """Nonnegative wavenumbers xi_m = m*pi/L of the rfft modes."""
        return np.fft.rfftfreq(self.n, d=self.h) * 2.0 * np.pi


@dataclass(frozen=True)
class GridFunction:
    """Real samples of a function on a Grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")

    @staticmethod
    def from_callable(grid: Grid, fn) -> "GridFunction":
        return GridFunction(grid, np.asarray(fn(grid.x), dtype=float))

    @staticmethod
    def zeros(grid: Grid) -> "GridFunction":
        return GridFunction(grid, np.zeros(grid.n))


def _same_grid(*fns: GridFunction) -> Grid:
    g = fns[0].grid
    for f in fns[1:]:
        if f.grid != g:
            raise ValueError("grid mismatch between operands")
    return g


def spectral_derivative(u: GridFunction, order: int = 1) -> GridFunction:
    """DFT-based derivative of the periodic interpolant; exact for resolved modes.

    Odd-order derivatives zero the Nyquist mode (its sine interpolant vanishes
    on the nodes, so the symmetric choice is the only consistent one).
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2, or 3")
    g = u.grid
    uh = np.fft.rfft(u.values)
    uh *= (1j * g.xi) ** order
    if order % 2 == 1:
        uh[-1] = 0.0
    return GridFunction(g, np.fft.irfft(uh, n=g.n))


def hilbert_transform(u: GridFunction) -> GridFunction:
    """Periodic Hilbert transform: Fourier multiplier -i*sgn(xi), sgn(0) = 0."""
    g = u.grid
    uh = np.fft.rfft(u.values)
    mult = np.full(uh.shape, -1j)
    mult[0] = 0.0
    mult[-1] = 0.0  # Nyquist treated as mean-free sine content
    return GridFunction(g, np.fft.irfft(mult * uh, n=g.n))


def integrate(u: GridFunction) -> float:
    """Trapezoid (= rectangle on a periodic uniform grid) quadrature h*sum(u)."""
    return float(u.grid.h * np.sum(u.values))


def sobolev_norm(u: GridFunction, s: float) -> float:
    """Discrete H^s norm: (h/N * sum_m w_m (1+xi_m^2)^s |u_hat_m|^2)^(1/2).

    w_m are the rfft doubling weights (1 for the mean and Nyquist bins, 2
    otherwise), so s = 0 coincides with the discrete L2 norm by Parseval.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    g = u.grid
    uh = np.fft.rfft(u.values)
    w = np.full(uh.shape, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    total = np.sum(w * (1.0 + g.xi**2) ** s * np.abs(uh) ** 2)
    return float(np.sqrt(g.h / g.n * total))


def l2_norm(u: GridFunction) -> float:
    """Quadrature-weighted l2 norm (h*sum u^2)^(1/2)."""
    return float(np.sqrt(u.grid.h * np.sum(u.values**2)))


def boundary_decay_ratio(u: GridFunction) -> float:
    """max |u| over the outermost 5% of nodes, relative to max |u| overall.

    Returns 0 for identically zero data.  Values near 1 mean the data do not
    decay inside the window and periodic spectral treatment is unjustified.
    """
    v = np.abs(u.values)
    peak = float(v.max())
    if peak == 0.0:
        return 0.0
    edge = max(1, round(0.025 * u.grid.n))  # 2.5% of nodes at each end
    return float(max(v[:edge].max(), v[-edge:].max()) / peak)


def require_decay(u: GridFunction, tol: float = DECAY_TOL, what: str = "data") -> None:
    ratio = boundary_decay_ratio(u)
    if ratio > tol:
        raise ValueError(
            f"{what} fails the boundary-decay check: edge/peak ratio {ratio:.3g} > {tol:.3g}; "
            "enlarge the window or raise the decay tolerance"
        )
