"""Velocity and pressure off the interface, interface traces, and the
Rellich-identity residual.

The velocity field is the line-kernel layer potential

    v(x, y) = (1/2pi) int (-(y - f(s)), x - s) / ((x-s)^2 + (y-f(s))^2) w(s) ds

evaluated by the trapezoid rule on the interface grid.  It is only trusted
outside a guard band of 2h around the graph of f; on the interface the
one-sided traces come from the principal-value quadrature plus the half
jump.  Pressure is recovered by integrating the velocity along an L-shaped
path from the anchor height +/- d, following the Darcy relation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import PathCrossesInterface, PointTooClose
from .grid import GridFunction, integrate, spectral_derivative
from .kernels import apply_A, apply_B, b01, b11, bnm_apply
from .params import FluidParams

GUARD_FACTOR = 2.0  # guard band half-width, in units of h


@dataclass(frozen=True)
class FieldSample:
    """Reconstructed field values at an off-interface point."""

    point: Tuple[float, float]
    velocity: Tuple[float, float]
    pressure_minus_frame: Optional[float] = None
    side: str = "on_interface"


def _graph_height(f: GridFunction, x: np.ndarray) -> np.ndarray:
    return np.interp(x, f.grid.x, f.values)


def _velocity_raw(f: GridFunction, omega: GridFunction, xs: np.ndarray, ys: np.ndarray):
    """Trapezoid layer potential at arbitrary points; also returns the
    vertical distance |y - f(x)| of each point from the graph (the guard
    metric, so that a stated offset above/below the interface is usable
    regardless of slope)."""
    g = f.grid
    dx = xs[:, None] - g.x[None, :]
    dy = ys[:, None] - f.values[None, :]
    r2 = dx * dx + dy * dy
    dist = np.abs(ys - _graph_height(f, xs))
    coef = g.h / (2.0 * np.pi)
    w = omega.values
    v1 = -coef * np.einsum("ps,s->p", dy / r2, w)
    v2 = coef * np.einsum("ps,s->p", dx / r2, w)
    return v1, v2, dist


def _velocity_guarded(f: GridFunction, omega: GridFunction, xs, ys):
    v1, v2, dist = _velocity_raw(f, omega, np.asarray(xs, float), np.asarray(ys, float))
    # relative slack so points at exactly the guard distance are in bounds
    guard = GUARD_FACTOR * f.grid.h * (1.0 - 1e-12)
    bad = np.nonzero(dist < guard)[0]
    if bad.size:
        i = int(bad[0])
        raise PointTooClose((float(np.asarray(xs)[i]), float(np.asarray(ys)[i])),
                            float(dist[i]), guard)
    return v1, v2


def _side_of(f: GridFunction, x: float, y: float) -> str:
    return "above" if y > float(_graph_height(f, np.asarray([x]))[0]) else "below"


def biot_savart(f: GridFunction, omega: GridFunction, points: Sequence) -> list:
    """Velocity at off-interface points by the line-kernel layer potential.

    Parameters
    ----------
    f, omega : GridFunction
        Interface and sheet strength on a common grid.
    points : sequence of (x, y)
        Evaluation points, each at distance >= 2h from the sampled graph.

    Returns
    -------
    list of FieldSample
        Velocities in input order; pressure is not filled in.

    Raises
    ------
    PointTooClose
        If a point lies inside the guard band (use trace_velocity there).
    """
    pts = [(float(px), float(py)) for px, py in points]
    if not pts:
        return []
    xs = np.array([q[0] for q in pts])
    ys = np.array([q[1] for q in pts])
    v1, v2, dist = _velocity_raw(f, omega, xs, ys)
    guard = GUARD_FACTOR * f.grid.h * (1.0 - 1e-12)
    out = []
    for i, q in enumerate(pts):
        if dist[i] < guard:
            raise PointTooClose(q, float(dist[i]), guard)
        out.append(FieldSample(point=q, velocity=(float(v1[i]), float(v2[i])),
                               side=_side_of(f, *q)))
    return out


def far_field_decay(f: GridFunction, omega: GridFunction,
                    radii: Sequence[float] = (20.0, 40.0, 80.0)) -> list:
    """|v(0, R)| * R for each R: bounded (roughly constant) for decaying data."""
    xs = np.zeros(len(radii))
    ys = np.asarray(radii, float)
    v1, v2, _ = _velocity_raw(f, omega, xs, ys)
    return [float(r * math.hypot(a, b)) for r, a, b in zip(radii, v1, v2)]


def trace_velocity(f: GridFunction, omega: GridFunction, side: str):
    """One-sided interface velocity traces by the Plemelj formula.

    The principal-value part is shared between the sides; the jump
    -/+ (1/2)(1, f') omega / (1 + f'^2) is added with the sign of the
    requested side ("above" subtracts, "below" adds).

    Returns
    -------
    (v1, v2) : pair of GridFunction
    """
    if side not in ("above", "below"):
        raise ValueError("side must be 'above' or 'below'")
    g = f.grid
    fp = spectral_derivative(f, 1).values
    v1_pv = -bnm_apply(b11(f), omega).values / (2.0 * np.pi)
    v2_pv = bnm_apply(b01(f), omega).values / (2.0 * np.pi)
    j1 = omega.values / (2.0 * (1.0 + fp * fp))
    j2 = fp * j1
    s = -1.0 if side == "above" else 1.0
    return (GridFunction(g, v1_pv + s * j1), GridFunction(g, v2_pv + s * j2))


def normal_trace(f: GridFunction, omega: GridFunction) -> GridFunction:
    """Normal velocity <v, (-f', 1)> on the interface: (1/2pi) B(f)[omega].

    The same value must come out of either one-sided trace since the
    tangential jump is annihilated by the normal projection; this is
    asserted against the 'above' trace.
    """
    g = f.grid
    fp = spectral_derivative(f, 1).values
    fn = apply_B(f, omega).values / (2.0 * np.pi)
    v1, v2 = trace_velocity(f, omega, "above")
    proj = -fp * v1.values + v2.values
    scale = max(1.0, float(np.abs(fn).max()))
    if float(np.abs(proj - fn).max()) > 1e-9 * scale:
        raise AssertionError("normal trace disagrees with projected one-sided trace")
    return GridFunction(g, fn)


# ---------------------------------------------------------------------------
# pressure reconstruction

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def _gl_line(a: float, b: float, max_width: float):
    """Composite 12-point Gauss-Legendre nodes/weights on the signed
    interval from a to b."""
    if a == b:
        return np.empty(0), np.empty(0)
    n_pan = max(1, int(math.ceil(abs(b - a) / max_width)))
    edges = np.linspace(a, b, n_pan + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_X).ravel()
    wts = (half[:, None] * _GL_W).ravel()
    return nodes, wts


def _curvature_values(f: GridFunction) -> np.ndarray:
    fp = spectral_derivative(f, 1).values
    fpp = spectral_derivative(f, 2).values
    return fpp / (1.0 + fp * fp) ** 1.5


def _side_constants(p: FluidParams, side: str):
    if side == "above":
        return p.mu_plus, p.rho_plus, 1.0
    return p.mu_minus, p.rho_minus, -1.0


def _pressure_q(f: GridFunction, omega: GridFunction, p: FluidParams,
                x: float, y: float, side: str, d: float):
    """Moving-frame pressure at (x, y) with the side's constant set to 0.

    Integrates -(mu/k) v along the horizontal leg at the anchor height and
    the vertical leg down/up to y, then adds the hydrostatic part.
    """
    g = f.grid
    mu, rho, sgn = _side_constants(p, side)
    anchor = sgn * d
    fx = float(_graph_height(f, np.asarray([x]))[0])
    if (y - fx) * (anchor - fx) <= 0:
        raise PathCrossesInterface(
            f"vertical path at x={x:g} from y={anchor:g} to y={y:g} crosses the interface"
        )
    sx, wx = _gl_line(0.0, x, 4.0 * g.h)
    i1 = 0.0
    if sx.size:
        v1h, _ = _velocity_guarded(f, omega, sx, np.full(sx.size, anchor))
        i1 = float(np.dot(wx, v1h))
    sy, wy = _gl_line(anchor, y, 2.0 * g.h)
    i2 = 0.0
    if sy.size:
        _, v2v = _velocity_guarded(f, omega, np.full(sy.size, x), sy)
        i2 = float(np.dot(wy, v2v))
    return -(mu / p.k) * (i1 + i2) - (rho * p.g + mu * p.V / p.k) * y


_FIT_OFFSETS = np.linspace(2.0, 8.0, 8)  # extrapolation sample heights, in units of h
_FIT_DEGREE = 4


def _graph_pressure(f: GridFunction, omega: GridFunction, p: FluidParams,
                    j: int, side: str, d: float) -> float:
    """One-sided pressure extrapolated to the interface at grid node j.

    The vertical pressure profile has derivatives that grow like inverse
    powers of omega's analytic-continuation scale near the sheet, so a short
    Taylor step stalls; instead sample the path-integral pressure at heights
    2h..8h off the graph and extrapolate with a least-squares quartic in the
    offset.
    """
    g = f.grid
    _, _, sgn = _side_constants(p, side)
    x = float(g.x[j])
    yf = float(f.values[j])
    deltas = _FIT_OFFSETS * g.h
    qs = [_pressure_q(f, omega, p, x, yf + sgn * dd, side, d) for dd in deltas]
    coef = np.polynomial.polynomial.polyfit(deltas, qs, _FIT_DEGREE)
    return float(coef[0])


def _calibrate_constant(f: GridFunction, omega: GridFunction, p: FluidParams,
                        d: float) -> float:
    """c_plus so that the dynamic condition p_plus - p_minus = sigma*kappa
    holds in least squares over probes straddling the interface near x = 0
    (c_minus is fixed at 0)."""
    g = f.grid
    kappa = _curvature_values(f)
    j0 = g.n // 2  # grid node at x = 0
    targets = []
    for j in (j0 - 1, j0, j0 + 1):
        p_above = _graph_pressure(f, omega, p, j, "above", d)
        p_below = _graph_pressure(f, omega, p, j, "below", d)
        targets.append(p.sigma * float(kappa[j]) + p_below - p_above)
    return float(np.mean(targets))


def reconstruct_pressure(f: GridFunction, omega: GridFunction, p: FluidParams,
                         points: Sequence, d: Optional[float] = None) -> list:
    """Moving-frame pressure (and velocity) at off-interface points.

    Parameters
    ----------
    d : float, optional
        Anchor height for the integration paths; must exceed
        max|f| + 4h.  Default max|f| + 10h.

    Returns
    -------
    list of FieldSample
        In input order, with both velocity and pressure_minus_frame set.

    Raises
    ------
    PointTooClose
        For points (or path quadrature nodes) inside the 2h guard band.
    PathCrossesInterface
        If a vertical leg would cross the graph of f.
    """
    g = f.grid
    sup_f = float(np.abs(f.values).max())
    if d is None:
        d = sup_f + 10.0 * g.h
    elif d <= sup_f + 4.0 * g.h:
        raise ValueError("anchor height d must exceed max|f| + 4h")
    c_plus = _calibrate_constant(f, omega, p, d)
    out = []
    for px, py in points:
        px, py = float(px), float(py)
        side = _side_of(f, px, py)
        v1, v2 = _velocity_guarded(f, omega, [px], [py])
        q = _pressure_q(f, omega, p, px, py, side, d)
        if side == "above":
            q += c_plus
        out.append(FieldSample(point=(px, py), velocity=(float(v1[0]), float(v2[0])),
                               pressure_minus_frame=q, side=side))
    return out


def rellich_residual(f: GridFunction, omega: GridFunction) -> Tuple[float, float]:
    """Both sign choices of the Rellich identity, as quadrature residuals.

    r_plus uses (A(f) - 1)[omega], r_minus uses (A(f) + 1)[omega]; each
    integral vanishes identically for true one-sided boundary data, so the
    returned values measure discretization error.  Meaningful for mean-zero
    omega (otherwise the truncated far field dominates).
    """
    fp = spectral_derivative(f, 1).values
    s = 1.0 + fp * fp
    fn = apply_B(f, omega).values / (2.0 * np.pi)
    aw = apply_A(f, omega).values
    g = f.grid

    def branch(gw: np.ndarray) -> float:
        dens = (fn * fn + fp * fn * gw - 0.25 * gw * gw) / s
        return float(integrate(GridFunction(g, dens)))

    return branch(aw - omega.values), branch(aw + omega.values)
