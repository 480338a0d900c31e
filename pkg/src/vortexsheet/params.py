"""Physical configuration and derived constants.

Units are SI but unchecked: the solver treats all values as dimensionless
reals once the derived constants are formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class FluidParams:
    """Physical constants of the two-phase problem.

    Attributes
    ----------
    mu_minus, mu_plus : float
        Viscosities of the lower (-) and upper (+) fluid, Pa*s, > 0.
    rho_minus, rho_plus : float
        Densities, kg/m^3, >= 0.
    g : float
        Gravitational acceleration, m/s^2, >= 0.
    k : float
        Permeability, m^2, > 0.
    sigma : float
        Surface tension, N/m, >= 0.
    V : float
        Far-field vertical background speed, m/s, any sign.
    """

    mu_minus: float
    mu_plus: float
    rho_minus: float
    rho_plus: float
    g: float = 9.81
    k: float = 1.0
    sigma: float = 0.0
    V: float = 0.0

    def __post_init__(self) -> None:
        if not (self.mu_minus > 0 and self.mu_plus > 0):
            raise ValueError("viscosities must be positive")
        if self.mu_minus + self.mu_plus <= 0:
            raise ValueError("mu_minus + mu_plus must be positive")
        if self.rho_minus < 0 or self.rho_plus < 0:
            raise ValueError("densities must be nonnegative")
        if self.g < 0:
            raise ValueError("g must be nonnegative")
        if self.k <= 0:
            raise ValueError("permeability k must be positive")
        if self.sigma < 0:
            raise ValueError("surface tension sigma must be nonnegative")
        for name in ("mu_minus", "mu_plus", "rho_minus", "rho_plus", "g", "k", "sigma", "V"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @staticmethod
    def normalized(a_mu: float, theta: float, sigma: float = 1.0) -> "FluidParams":
        """Constructor in normalized units: b_mu = 1, prescribed a_mu and theta.

        Sets mu_-/+ = 1 -/+ ... so that the viscosity contrast is exactly
        ``a_mu``, k = 1 and mu_- + mu_+ = 2 (hence b_mu = 1), V = 0, and
        splits the density difference so that theta = g*(rho_- - rho_+)
        equals the requested value with g = |theta| >= 0.  With these choices
        c_rho_mu = theta as well.  Intended for tests and dispersion studies
        that quote rates in normalized units.
        """
        if not -1 < a_mu < 1:
            raise ValueError("a_mu must lie in (-1, 1)")
        s = 0.0 if theta == 0 else math.copysign(1.0, theta)
        return FluidParams(
            mu_minus=1.0 + a_mu,
            mu_plus=1.0 - a_mu,
            rho_minus=1.5 + 0.5 * s,
            rho_plus=1.5 - 0.5 * s,
            g=abs(theta),
            k=1.0,
            sigma=sigma,
            V=0.0,
        )


@dataclass(frozen=True)
class DerivedConstants:
    """Constants derived from FluidParams.

    a_mu : viscosity contrast (Atwood number), in (-1, 1).
    b_mu : mobility scale 2k/(mu_- + mu_+).
    theta : effective buoyancy g*(rho_- - rho_+) + (mu_- - mu_+)*V/k.
    c_rho_mu : b_mu * theta, the flat-interface decay constant.
    """

    a_mu: float
    b_mu: float
    theta: float
    c_rho_mu: float


def derive_constants(p: FluidParams) -> DerivedConstants:
    """Form the derived constants (a_mu, b_mu, theta, c_rho_mu).

    Raises ValueError for configurations violating the FluidParams
    invariants (nonpositive viscosity sum or permeability).
    """
    mu_sum = p.mu_minus + p.mu_plus
    if mu_sum <= 0:
        raise ValueError("mu_minus + mu_plus must be positive")
    if p.k <= 0:
        raise ValueError("permeability k must be positive")
    a_mu = (p.mu_minus - p.mu_plus) / mu_sum
    b_mu = 2.0 * p.k / mu_sum
    theta = p.g * (p.rho_minus - p.rho_plus) + (p.mu_minus - p.mu_plus) * p.V / p.k
    c_rho_mu = 2.0 * p.k * theta / mu_sum
    return DerivedConstants(a_mu=a_mu, b_mu=b_mu, theta=theta, c_rho_mu=c_rho_mu)
