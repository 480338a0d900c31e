"""Named initial-condition families shared by tests, the verification
suites, and the CLI config loader.

All families decay at the domain ends (as required by the periodized
quadrature); the "cusp" shapes have three derivatives and a jump in the
fourth at the center, giving algebraic (rather than spectral) convergence
for refinement studies.  The "rough" family has a random-phase Fourier
tail with algebraic decay and limited Sobolev smoothness.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, GridFunction, spectral_derivative


def zero(grid: Grid) -> GridFunction:
    return GridFunction.zeros(grid)


def gaussian(grid: Grid, amp: float = 1.0, width: float = 1.0, center: float = 0.0) -> GridFunction:
    x = grid.x
    return GridFunction(grid, amp * np.exp(-(((x - center) / width) ** 2)))


def gaussian_derivative(grid: Grid, amp: float = 1.0, width: float = 1.0,
                        center: float = 0.0) -> GridFunction:
    """d/dx of a Gaussian: exactly mean-zero on the grid."""
    x = grid.x
    u = (x - center) / width
    return GridFunction(grid, -2.0 * amp / width * u * np.exp(-(u * u)))


def wavepacket(grid: Grid, k: float = 2.0, amp: float = 1e-4, width: float = 6.0,
               center: float = 0.0) -> GridFunction:
    """Gaussian-enveloped cosine, concentrated near wavenumber k."""
    x = grid.x - center
    return GridFunction(grid, amp * np.cos(k * x) * np.exp(-((x / width) ** 2)))


def cusp(grid: Grid, amp: float = 1.0, center: float = 0.0) -> GridFunction:
    """amp * |x - c|^3 * exp(-(x - c)^2): C^2 with a kink in the third
    derivative at the center."""
    x = grid.x - center
    return GridFunction(grid, amp * np.abs(x) ** 3 * np.exp(-(x * x)))


def cusp_derivative(grid: Grid, amp: float = 1.0, center: float = 0.0) -> GridFunction:
    """Spectral x-derivative of `cusp`: mean-zero, finitely smooth."""
    return spectral_derivative(cusp(grid, amp, center), 1)


def rough(grid: Grid, amp: float = 0.01, decay: float = 2.6, seed: int = 0,
          envelope_width: float = 0.0) -> GridFunction:
    """Random-phase Fourier tail |c_m| = (1+m)^-decay under a Gaussian
    envelope, rescaled to sup-norm amp.

    With decay = 2.6 the profile lies in H^s only for s < 2.1 at t = 0, so
    smoothing under evolution is observable in the H^3 norm.
    """
    rng = np.random.default_rng(seed)
    n = grid.n
    spec = np.zeros(n // 2 + 1, dtype=complex)
    m = np.arange(1, n // 2)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=m.size)
    spec[1:-1] = (1.0 + m) ** (-decay) * np.exp(1j * phases)
    vals = np.fft.irfft(spec, n=n) * n
    w = envelope_width if envelope_width > 0 else grid.half_length / 3.0
    vals *= np.exp(-((grid.x / w) ** 2))
    vals *= amp / np.abs(vals).max()
    return GridFunction(grid, vals)


FAMILIES = {
    "zero": zero,
    "gaussian": gaussian,
    "gaussian_derivative": gaussian_derivative,
    "wavepacket": wavepacket,
    "cusp": cusp,
    "cusp_derivative": cusp_derivative,
    "rough": rough,
}


def make_family(name: str, grid: Grid, **params) -> GridFunction:
    """Build a named family on a grid; unknown names raise ValueError."""
    try:
        builder = FAMILIES[name]
    except KeyError:
        raise ValueError(
            f"unknown family '{name}'; available: {', '.join(sorted(FAMILIES))}"
        ) from None
    return builder(grid, **params)
