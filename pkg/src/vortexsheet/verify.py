"""Self-contained verification suites: operator identities, the Rellich
residual, Plemelj traces, and measured linear decay rates.

Each suite returns a list of CheckResult records so the CLI can print one
line per property and the test suite can assert on the same code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evolution import StepControls, simulate
from .families import cusp, cusp_derivative, gaussian, gaussian_derivative, wavepacket
from .fields import biot_savart, normal_trace, rellich_residual, trace_velocity
from .grid import Grid, GridFunction, hilbert_transform, l2_norm, spectral_derivative
from .kernels import apply_A, apply_A_star, apply_B, b01, b11, bnm_apply
from .params import FluidParams, derive_constants
from .sheet import lower_order_terms, rhs_no_tension, solve_omega
from .stability import dispersion_rate


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


def _check(name: str, value: float, tol: float, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(value <= tol), float(value), float(tol), detail)


def _rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    denom = math.sqrt(float(np.sum(b * b)))
    return math.sqrt(float(np.sum((a - b) ** 2))) / denom if denom else float(
        np.abs(a).max()
    )


# ---------------------------------------------------------------------------
# operator identities

def _hilbert_test_functions(grid: Grid):
    return [
        gaussian(grid, 1.0, 1.0),
        gaussian(grid, 0.8, 0.7, center=2.0),
        gaussian_derivative(grid, 1.0, 1.3),
        wavepacket(grid, k=3.0, amp=1.0, width=3.0),
        wavepacket(grid, k=5.0, amp=0.5, width=1.5, center=-1.0),
    ]


def suite_operators(n: int = 1024, half_length: float = 20.0) -> list:
    grid = Grid(half_length, n)
    out = []

    flat = GridFunction.zeros(grid)
    worst = 0.0
    for u in _hilbert_test_functions(grid):
        lhs = bnm_apply(b01(flat), u).values
        rhs = np.pi * hilbert_transform(u).values
        worst = max(worst, _rel_l2(lhs, rhs))
    out.append(_check("flat_kernel_matches_hilbert", worst, 1e-6,
                      "B01(0) vs pi*H on 5 smooth profiles"))

    f = gaussian(grid, 0.7, 1.0)
    w = gaussian(grid, 1.0, 1.1, center=0.5)
    fp = spectral_derivative(f, 1).values
    lhs = np.pi * apply_A(f, w).values
    rhs = fp * bnm_apply(b01(f), w).values - bnm_apply(b11(f), w).values
    out.append(_check("a_from_building_blocks", _rel_l2(lhs, rhs), 1e-6,
                      "pi*A = f'*B01 - B11"))

    lhs = apply_B(f, w).values
    rhs = bnm_apply(b01(f), w).values + fp * bnm_apply(b11(f), w).values
    out.append(_check("b_from_building_blocks", _rel_l2(lhs, rhs), 1e-6,
                      "B = B01 + f'*B11"))

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(5):
        wf = _random_smooth(grid, rng)
        phi = _random_smooth(grid, rng)
        lhs_ip = grid.h * float(np.dot(apply_A(f, wf).values, phi.values))
        rhs_ip = grid.h * float(np.dot(wf.values, apply_A_star(f, phi).values))
        scale = l2_norm(wf) * l2_norm(phi)
        worst = max(worst, abs(lhs_ip - rhs_ip) / scale)
    out.append(_check("adjoint_pairing", worst, 1e-8,
                      "<A w, phi> = <w, A* phi> on random smooth pairs"))

    c = derive_constants(FluidParams.normalized(a_mu=0.5, theta=1.0, sigma=0.0))
    rhs_gf = rhs_no_tension(f, c)
    direct = solve_omega(f, rhs_gf, c, method="direct")
    neumann = solve_omega(f, rhs_gf, c, method="neumann")
    out.append(_check("solver_cross_agreement",
                      _rel_l2(neumann.omega.values, direct.omega.values), 1e-8,
                      "Neumann vs direct, a_mu=0.5"))
    out.append(_check("solver_residuals",
                      max(direct.residual_norm, neumann.residual_norm), 1e-10))

    out.extend(derivative_commutator_checks(n_coarse=512))
    return out


def _random_smooth(grid: Grid, rng) -> GridFunction:
    vals = np.zeros(grid.n)
    for _ in range(6):
        amp = rng.uniform(-1.0, 1.0)
        width = rng.uniform(0.6, 2.0)
        center = rng.uniform(-0.3 * grid.half_length, 0.3 * grid.half_length)
        vals += amp * np.exp(-(((grid.x - center) / width) ** 2))
    return GridFunction(grid, vals)


def _commutator_residuals(n: int, half_length: float = 20.0):
    """Sup-norm residuals of the derivative identities for A and B on the
    finite-smoothness family (analytic data is exact to rounding)."""
    grid = Grid(half_length, n)
    # d/dx A identity on smooth f, kinked omega
    f = gaussian(grid, 0.7, 1.0)
    w = cusp(grid, 1.0, center=0.5)
    lhs = spectral_derivative(GridFunction(grid, apply_A(f, w).values), 1).values
    wp = spectral_derivative(w, 1)
    rhs = apply_A(f, wp).values + lower_order_terms(f, w).values
    res_a = float(np.abs(lhs - rhs).max())

    # d/dx B identity needs a kinked f: with analytic f it cancels to rounding
    fk = cusp(grid, 0.7)
    wg = gaussian(grid, 1.0, 1.0, center=0.5)
    res_b = _derB_residual(fk, wg)
    return res_a, res_b


def _derB_residual(f: GridFunction, w: GridFunction) -> float:
    grid = f.grid
    fp = spectral_derivative(f, 1).values
    fpp = spectral_derivative(f, 2).values
    lhs = spectral_derivative(GridFunction(grid, apply_B(f, w).values), 1).values
    wp = spectral_derivative(w, 1)
    from .kernels import KernelSpec

    fp_gf = spectral_derivative(f, 1)
    b22 = KernelSpec("generic_bnm", a_list=(f, f), b_list=(fp_gf, f))
    b32 = KernelSpec("generic_bnm", a_list=(f, f), b_list=(fp_gf, f, f))
    b11_fp = KernelSpec("generic_bnm", a_list=(f,), b_list=(fp_gf,))
    rhs = (
        apply_B(f, wp).values
        - 2.0 * bnm_apply(b22, w).values
        + fpp * bnm_apply(b11(f), w).values
        + fp * bnm_apply(b11_fp, w).values
        - 2.0 * fp * bnm_apply(b32, w).values
    )
    return float(np.abs(lhs - rhs).max())


def derivative_commutator_checks(n_coarse: int = 512) -> list:
    ra_c, rb_c = _commutator_residuals(n_coarse)
    ra_f, rb_f = _commutator_residuals(2 * n_coarse)
    return [
        _check("derivative_of_A_refines", ra_f / ra_c, 1.0 / 3.0,
               f"residual {ra_c:.2e} -> {ra_f:.2e}"),
        _check("derivative_of_B_refines", rb_f / rb_c, 1.0 / 3.0,
               f"residual {rb_c:.2e} -> {rb_f:.2e}"),
    ]


# ---------------------------------------------------------------------------
# Rellich identity

def rellich_family(n: int, half_length: float = 90.0):
    grid = Grid(half_length, n)
    f = gaussian(grid, 0.45, 1.5)
    w = cusp_derivative(grid, 1.0, center=0.5)
    return f, w


def suite_rellich(n: int = 512) -> list:
    out = []
    f, w = rellich_family(n)
    rp, rm = rellich_residual(f, w)
    scale = l2_norm(w) ** 2
    out.append(_check("rellich_plus", abs(rp) / scale, 1e-4))
    out.append(_check("rellich_minus", abs(rm) / scale, 1e-4))
    f2, w2 = rellich_family(2 * n)
    rp2, rm2 = rellich_residual(f2, w2)
    worst_ratio = max(abs(rp2) / abs(rp), abs(rm2) / abs(rm))
    out.append(_check("rellich_refines", worst_ratio, 1.0 / 3.0,
                      f"({rp:.2e},{rm:.2e}) -> ({rp2:.2e},{rm2:.2e})"))
    return out


# ---------------------------------------------------------------------------
# Plemelj traces vs off-interface field

def plemelj_family(n: int = 256, half_length: float = 15.0):
    grid = Grid(half_length, n)
    f = gaussian(grid, 0.5, 1.2)
    w = gaussian_derivative(grid, 1.0, 1.0, center=0.3)
    return f, w


def suite_plemelj(n: int = 256) -> list:
    out = []
    f, w = plemelj_family(n)
    grid = f.grid
    fp = spectral_derivative(f, 1).values
    above = trace_velocity(f, w, "above")
    below = trace_velocity(f, w, "below")
    tang = (below[0].values - above[0].values) + fp * (below[1].values - above[1].values)
    out.append(_check("tangential_jump_is_omega",
                      float(np.abs(tang - w.values).max()) / max(1.0, float(np.abs(w.values).max())),
                      1e-13, "<[v], (1, f')> = omega"))

    norm_above = -fp * above[0].values + above[1].values
    norm_below = -fp * below[0].values + below[1].values
    out.append(_check("no_normal_jump", float(np.abs(norm_above - norm_below).max()), 1e-10))

    fn = normal_trace(f, w)  # also asserts trace consistency internally
    out.append(_check("normal_trace_is_B",
                      _rel_l2(fn.values, apply_B(f, w).values / (2 * np.pi)), 1e-14))

    errs = _offset_errors(f, w, (8.0, 4.0, 2.0))
    mono = all(errs[i + 1] < errs[i] for i in range(len(errs) - 1))
    out.append(CheckResult("offset_convergence_monotone", mono, errs[-1], errs[0],
                           "max|v(x, f+d) - trace| for d = 8h, 4h, 2h: "
                           + ", ".join(f"{e:.2e}" for e in errs)))
    return out


def _offset_errors(f: GridFunction, w: GridFunction, offsets_h) -> list:
    grid = f.grid
    keep = np.abs(grid.x) <= 0.5 * grid.half_length  # stay clear of the ends
    xs = grid.x[keep]
    errs = []
    for mult in offsets_h:
        delta = mult * grid.h
        err = 0.0
        for side, sgn in (("above", 1.0), ("below", -1.0)):
            v1t, v2t = trace_velocity(f, w, side)
            samples = biot_savart(f, w, list(zip(xs, f.values[keep] + sgn * delta)))
            v1 = np.array([s.velocity[0] for s in samples])
            v2 = np.array([s.velocity[1] for s in samples])
            err = max(err,
                      float(np.abs(v1 - v1t.values[keep]).max()),
                      float(np.abs(v2 - v2t.values[keep]).max()))
        errs.append(err)
    return errs


# ---------------------------------------------------------------------------
# dispersion measurement

def measured_dispersion_rate(
    k: float,
    p: FluidParams,
    n: int = 256,
    half_length: float = 8 * math.pi,
    amp: float = 1e-4,
    width: float = 6.0,
    e_foldings: float = 1.0,
    rel_tol: float = 1e-6,
    stepper: str = "rk_adaptive",
) -> tuple[float, float]:
    """(measured, predicted) decay rate of the Fourier mode at wavenumber k.

    Runs the full nonlinear evolution on a small-amplitude wavepacket and
    fits the log amplitude of the mode xi = k over about one e-folding.
    k must sit on the grid (k*L/pi integer).
    """
    m = k * half_length / math.pi
    if abs(m - round(m)) > 1e-9:
        raise ValueError("k must be a grid wavenumber: k*L/pi integer")
    m = int(round(m))
    grid = Grid(half_length, n)
    f0 = wavepacket(grid, k=k, amp=amp, width=width)
    pred = dispersion_rate(k, p.sigma > 0, p)
    t_end = e_foldings / pred
    ctl = StepControls(rel_tol=rel_tol, abs_tol=1e-14, stepper=stepper)
    traj = simulate(f0, p, t_end, ctl, snapshot_every=2)
    ts = np.array([s.t for s in traj.snapshots])
    amps = np.array([abs(np.fft.rfft(s.f.values)[m]) for s in traj.snapshots])
    slope = np.polyfit(ts, np.log(amps), 1)[0]
    return float(-slope), float(pred)


def suite_dispersion(tol: float = 0.03) -> list:
    out = []
    p0 = FluidParams.normalized(a_mu=0.0, theta=1.0, sigma=0.0)
    for k in (2.0, 4.0):
        got, want = measured_dispersion_rate(k, p0)
        out.append(_check(f"flat_rate_sigma0_k{int(k)}", abs(got - want) / want, tol,
                          f"measured {got:.4f} vs {want:.4f}"))
    p1 = FluidParams.normalized(a_mu=0.0, theta=1.0, sigma=1.0)
    got, want = measured_dispersion_rate(2.0, p1, half_length=4 * math.pi, width=3.0)
    out.append(_check("flat_rate_sigma1_k2", abs(got - want) / want, tol,
                      f"measured {got:.4f} vs {want:.4f}"))
    return out


SUITES = {
    "operators": suite_operators,
    "rellich": suite_rellich,
    "plemelj": suite_plemelj,
    "dispersion": suite_dispersion,
}


def run_suite(name: str) -> list:
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(
            f"unknown suite '{name}'; available: {', '.join(sorted(SUITES))}"
        ) from None
    return suite()
