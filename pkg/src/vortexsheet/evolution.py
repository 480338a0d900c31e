"""Time integration of the interface evolution df/dt = (1/2pi) B(f)[omega].

Two steppers: an embedded Dormand-Prince 5(4) explicit pair with
error-per-step control plus frozen-coefficient stability caps, and (for
sigma > 0) a first-order IMEX splitting whose implicit part is the
Fourier-diagonal flat-state symbol -(b_mu sigma / 2)|xi|^3, with step-doubling
error control.  Everything is deterministic: identical inputs produce
bit-identical trajectories on a fixed platform.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DtUnderflow, NonFinite, RTBreakdown
from .grid import (
    DECAY_TOL,
    GridFunction,
    integrate,
    require_decay,
    sobolev_norm,
    spectral_derivative,
)
from .kernels import apply_B
from .params import DerivedConstants, FluidParams, derive_constants
from .sheet import VortexSheet, rhs_no_tension, rhs_tension, solve_omega
from .stability import rt_tolerance


@dataclass(frozen=True)
class Snapshot:
    """State record: time, interface, sheet strength, and diagnostics.

    diagnostics keys: mass, sup_norm, sobolev_s (H^3), max_rhs, and
    rt_infimum for sigma = 0 runs only.
    """

    t: float
    f: GridFunction
    omega: VortexSheet
    diagnostics: dict


@dataclass(frozen=True)
class StepControls:
    """Adaptive stepping knobs.

    The accepted local error satisfies ||e|| <= abs_tol + rel_tol*||f||
    (discrete L2) for the RK pair, and ||e|| <= (abs_tol + rel_tol*||f||)*dt
    (error per unit time) for the IMEX splitting.  cfl_c1/cfl_c3 scale the
    frozen-coefficient stability caps dt <= c1*h/max|alpha| (sigma = 0) and
    dt <= c3*h^3/max(gamma3*b_mu*sigma/2) (sigma > 0).  enforce_rt gates
    sigma = 0 runs on positivity of the Rayleigh-Taylor functional; switching
    it off is only meant for controlled ill-posedness demonstrations.
    """

    dt_init: float = 1e-3
    dt_min: float = 1e-12
    dt_max: float = math.inf
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    stepper: str = "rk_adaptive"
    cfl_c1: float = 1.0
    cfl_c3: float = 0.2
    enforce_rt: bool = True
    decay_tol: float = DECAY_TOL

    def __post_init__(self) -> None:
        if not (0 < self.dt_min <= self.dt_init <= self.dt_max):
            raise ValueError("need 0 < dt_min <= dt_init <= dt_max")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.stepper not in ("rk_adaptive", "imex"):
            raise ValueError("stepper must be 'rk_adaptive' or 'imex'")
        if self.cfl_c1 <= 0 or self.cfl_c3 <= 0:
            raise ValueError("CFL factors must be positive")


@dataclass(frozen=True)
class Trajectory:
    snapshots: tuple
    termination: str  # completed | rt_breakdown | dt_underflow | non_finite
    steps: int
    wall_time: float

    @property
    def final(self) -> Snapshot:
        return self.snapshots[-1]


def rhs_evolution(f: GridFunction, p: FluidParams) -> tuple[GridFunction, VortexSheet]:
    """Full nonlinear right-hand side: solve for omega, then (1/2pi) B(f)[omega].

    sigma = 0 uses the buoyancy right-hand side -c_rho_mu f'; sigma > 0 the
    quasilinear surface-tension form with h = f (fully coupled).
    """
    c = derive_constants(p)
    rhs = rhs_tension(f, f, p) if p.sigma > 0 else rhs_no_tension(f, c)
    sheet = solve_omega(f, rhs, c)
    vals = apply_B(f, sheet.omega).values / (2.0 * np.pi)
    if not np.all(np.isfinite(vals)):
        raise NonFinite("rhs_evolution produced non-finite values")
    return GridFunction(f.grid, vals), sheet


# ---------------------------------------------------------------------------
# internal state and diagnostics

@dataclass(frozen=True)
class _State:
    t: float
    f: GridFunction
    dfdt: GridFunction
    sheet: VortexSheet


def _rt_infimum(dfdt: GridFunction, c: DerivedConstants) -> float:
    # a_RT = c_rho_mu + (a_mu/pi) B(f)[omega] = c_rho_mu + 2 a_mu * (df/dt)
    return float((c.c_rho_mu + 2.0 * c.a_mu * dfdt.values).min())


def _make_snapshot(state: _State, p: FluidParams, c: DerivedConstants) -> Snapshot:
    f = state.f
    diags = {
        "mass": integrate(f),
        "sup_norm": float(np.abs(f.values).max()),
        "sobolev_s": sobolev_norm(f, 3.0),
        "max_rhs": float(np.abs(state.dfdt.values).max()),
    }
    if p.sigma == 0:
        diags["rt_infimum"] = _rt_infimum(state.dfdt, c)
    return Snapshot(t=state.t, f=f, omega=state.sheet, diagnostics=diags)


def initial_snapshot(f0: GridFunction, p: FluidParams) -> Snapshot:
    """Snapshot of an initial condition, with its sheet strength solved."""
    dfdt, sheet = rhs_evolution(f0, p)
    c = derive_constants(p)
    return _make_snapshot(_State(0.0, f0, dfdt, sheet), p, c)


def _eval_rhs(grid, values: np.ndarray, p: FluidParams) -> tuple[GridFunction, VortexSheet]:
    """rhs_evolution on raw values; raises NonFinite for any non-finite data."""
    if not np.all(np.isfinite(values)):
        raise NonFinite("stage values non-finite")
    try:
        return rhs_evolution(GridFunction(grid, values), p)
    except ValueError as exc:  # overflow inside the operator chain
        raise NonFinite(str(exc)) from exc


def _stability_cap(state: _State, p: FluidParams, c: DerivedConstants, ctl: StepControls) -> float:
    g = state.f.grid
    fp = spectral_derivative(state.f, 1).values
    s = 1.0 + fp**2
    if p.sigma == 0:
        alpha = np.pi * (c.c_rho_mu + 2.0 * c.a_mu * state.dfdt.values) / s
        peak = float(np.abs(alpha).max())
        return ctl.cfl_c1 * g.h / peak if peak > 0 else math.inf
    gamma3 = np.pi / s**1.5
    half_bs = 0.5 * c.b_mu * p.sigma
    if ctl.stepper == "imex":
        # only the spatially varying remainder of the third-order term is
        # explicit; at a flat interface it vanishes and the cap is inactive
        coef = float((half_bs * np.abs(np.pi - gamma3)).max())
    else:
        coef = float((half_bs * gamma3).max())
    return ctl.cfl_c3 * g.h**3 / coef if coef > 0 else math.inf


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) embedded pair (FSAL)

_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_DP_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def _rk_attempt(state: _State, p: FluidParams, ctl: StepControls, dt: float):
    """One Dormand-Prince trial step.  Returns
    (f_new values, err_norm, new dfdt, new sheet); raises NonFinite if a
    stage blows up."""
    g = state.f.grid
    f0 = state.f.values
    ks = [state.dfdt.values]
    for row in _DP_A[1:]:
        stage = f0 + dt * sum(a * k for a, k in zip(row, ks))
        dfdt_s, _ = _eval_rhs(g, stage, p)
        ks.append(dfdt_s.values)
    f5 = f0 + dt * sum(b * k for b, k in zip(_DP_B5, ks))
    dfdt_new, sheet_new = _eval_rhs(g, f5, p)  # FSAL stage k7 = rhs at the solution
    ks.append(dfdt_new.values)
    err = dt * sum(e * k for e, k in zip(_DP_E, ks))
    scale = ctl.abs_tol + ctl.rel_tol * math.sqrt(g.h * float(np.sum(f5**2)))
    err_norm = math.sqrt(g.h * float(np.sum(err**2))) / scale
    return f5, err_norm, dfdt_new, sheet_new


def _rk_factor(err_norm: float) -> float:
    if err_norm == 0.0:
        return 5.0
    return min(5.0, max(0.2, 0.9 * err_norm ** (-0.2)))


# ---------------------------------------------------------------------------
# first-order IMEX splitting with step doubling (sigma > 0)

def _imex_substep(grid, f: np.ndarray, dfdt: np.ndarray, ell: np.ndarray, dt: float) -> np.ndarray:
    fh = np.fft.rfft(f)
    nh = np.fft.rfft(dfdt) - ell * fh
    return np.fft.irfft((fh + dt * nh) / (1.0 - dt * ell), n=grid.n)


def _imex_attempt(state: _State, p: FluidParams, c: DerivedConstants, ctl: StepControls, dt: float):
    g = state.f.grid
    ell = -0.5 * c.b_mu * p.sigma * g.xi**3
    f0, k0 = state.f.values, state.dfdt.values
    full = _imex_substep(g, f0, k0, ell, dt)
    half1 = _imex_substep(g, f0, k0, ell, 0.5 * dt)
    dfdt_h, _ = _eval_rhs(g, half1, p)
    half2 = _imex_substep(g, half1, dfdt_h.values, ell, 0.5 * dt)
    if not np.all(np.isfinite(half2)):
        raise NonFinite("imex substep non-finite")
    err = half2 - full
    scale = (ctl.abs_tol + ctl.rel_tol * math.sqrt(g.h * float(np.sum(half2**2)))) * dt
    err_norm = math.sqrt(g.h * float(np.sum(err**2))) / scale
    dfdt_new, sheet_new = _eval_rhs(g, half2, p)
    return half2, err_norm, dfdt_new, sheet_new


def _imex_factor(err_norm: float) -> float:
    if err_norm == 0.0:
        return 5.0
    return min(5.0, max(0.2, 0.9 / err_norm))


# ---------------------------------------------------------------------------
# advance / step / simulate

_MAX_ATTEMPTS = 60


def _advance(
    state: _State,
    p: FluidParams,
    c: DerivedConstants,
    ctl: StepControls,
    dt_want: float,
) -> tuple[_State, float, float]:
    """One accepted step of size <= dt_want.  Returns (new state, dt used,
    suggested next dt)."""
    cap = min(_stability_cap(state, p, c, ctl), ctl.dt_max)
    dt = min(dt_want, cap)
    # a final step shorter than dt_min is allowed to land exactly on t_end
    if dt < ctl.dt_min and dt < dt_want:
        raise DtUnderflow(state.t, dt, ctl.dt_min)
    for _ in range(_MAX_ATTEMPTS):
        try:
            if ctl.stepper == "rk_adaptive":
                f_new, err_norm, dfdt_new, sheet_new = _rk_attempt(state, p, ctl, dt)
            else:
                f_new, err_norm, dfdt_new, sheet_new = _imex_attempt(state, p, c, ctl, dt)
        except NonFinite:
            dt *= 0.25
            if dt < ctl.dt_min:
                raise
            continue
        factor = _rk_factor(err_norm) if ctl.stepper == "rk_adaptive" else _imex_factor(err_norm)
        if err_norm <= 1.0:
            new = _State(state.t + dt, GridFunction(state.f.grid, f_new), dfdt_new, sheet_new)
            if p.sigma == 0 and ctl.enforce_rt:
                inf = _rt_infimum(dfdt_new, c)
                if inf <= rt_tolerance(c):
                    raise RTBreakdown(new.t, inf)
            dt_next = min(max(dt * factor, ctl.dt_min), ctl.dt_max)
            return new, dt, dt_next
        dt *= factor
        if dt < ctl.dt_min:
            raise DtUnderflow(state.t, dt, ctl.dt_min)
    raise DtUnderflow(state.t, dt, ctl.dt_min)


def step(snap: Snapshot, p: FluidParams, ctl: StepControls) -> Snapshot:
    """One accepted adaptive step from a snapshot (trial size ctl.dt_init)."""
    _check_stepper(p, ctl)
    c = derive_constants(p)
    state = _State(snap.t, snap.f, *_state_rhs(snap, p))
    new, _, _ = _advance(state, p, c, ctl, ctl.dt_init)
    return _make_snapshot(new, p, c)


def _state_rhs(snap: Snapshot, p: FluidParams) -> tuple[GridFunction, VortexSheet]:
    # recompute instead of trusting the stored omega: the snapshot may come
    # from a file and the rhs must be consistent with f bit-for-bit
    return rhs_evolution(snap.f, p)


def _check_stepper(p: FluidParams, ctl: StepControls) -> None:
    if ctl.stepper == "imex" and p.sigma == 0:
        raise ValueError("imex stepper requires sigma > 0")


def simulate(
    f0: GridFunction,
    p: FluidParams,
    t_end: float,
    ctl: Optional[StepControls] = None,
    snapshot_every: int = 10,
) -> Trajectory:
    """Advance f0 to t_end, emitting a snapshot every `snapshot_every`
    accepted steps (plus the initial and final states).

    Termination causes: "completed", "rt_breakdown" (sigma = 0 gate:
    initial refusal or mid-run sign loss), "dt_underflow", "non_finite".
    Aborted runs end at the last accepted state.
    """
    ctl = ctl or StepControls()
    _check_stepper(p, ctl)
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    if snapshot_every < 1:
        raise ValueError("snapshot_every must be >= 1")
    require_decay(f0, ctl.decay_tol, "initial condition")
    c = derive_constants(p)
    t_start = time.perf_counter()

    dfdt, sheet = rhs_evolution(f0, p)
    state = _State(0.0, f0, dfdt, sheet)
    snaps = [_make_snapshot(state, p, c)]
    if p.sigma == 0 and ctl.enforce_rt and snaps[0].diagnostics["rt_infimum"] <= rt_tolerance(c):
        return Trajectory(tuple(snaps), "rt_breakdown", 0, time.perf_counter() - t_start)

    termination = "completed"
    steps = 0
    emitted_t = 0.0
    dt = ctl.dt_init
    while state.t < t_end * (1.0 - 1e-14):
        try:
            state, _, dt = _advance(state, p, c, ctl, min(dt, t_end - state.t))
        except RTBreakdown:
            termination = "rt_breakdown"
            break
        except DtUnderflow:
            termination = "dt_underflow"
            break
        except NonFinite:
            termination = "non_finite"
            break
        steps += 1
        if steps % snapshot_every == 0 or state.t >= t_end * (1.0 - 1e-14):
            snaps.append(_make_snapshot(state, p, c))
            emitted_t = state.t
    if emitted_t != state.t and snaps[-1].t != state.t:
        snaps.append(_make_snapshot(state, p, c))
    return Trajectory(tuple(snaps), termination, steps, time.perf_counter() - t_start)
