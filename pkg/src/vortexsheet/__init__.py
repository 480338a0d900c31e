"""Boundary-integral simulation and verification toolkit for a two-phase
interface between fluids of different density and viscosity in a porous
medium (vortex-sheet formulation).

The interface y = f(x, t) evolves by a normal velocity obtained from a
sheet strength omega, which solves the implicit equation
(1 + a_mu * A(f))[omega] = rhs on the interface.  The package provides the
periodized singular quadrature behind the A/B operator family, the sheet
solver, linear stability tools, adaptive time stepping, off-interface
field reconstruction, and a verification surface (identity checks,
Rellich residuals, measured dispersion rates) with a CLI.
"""

from .version import __version__
from .errors import (
    DegenerateOperator,
    DtUnderflow,
    NonFinite,
    PathCrossesInterface,
    PointTooClose,
    RTBreakdown,
    VortexSheetError,
)
from .params import DerivedConstants, FluidParams, derive_constants
from .grid import (
    DECAY_TOL,
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
from .kernels import (
    KERNEL_KINDS,
    KernelSpec,
    OperatorMatrix,
    apply_A,
    apply_A_star,
    apply_B,
    assemble_matrix,
    b01,
    b11,
    bnm_apply,
    operator_apply,
)
from .sheet import (
    VortexSheet,
    lower_order_terms,
    omega_decomposition,
    resolvent_diagnostic,
    rhs_no_tension,
    rhs_tension,
    solve_omega,
)
from .stability import (
    FrozenSymbols,
    RTReport,
    dispersion_rate,
    evaluate_rt,
    frozen_symbols,
    rt_tolerance,
)
from .evolution import (
    Snapshot,
    StepControls,
    Trajectory,
    initial_snapshot,
    rhs_evolution,
    simulate,
    step,
)
from .fields import (
    FieldSample,
    biot_savart,
    far_field_decay,
    normal_trace,
    reconstruct_pressure,
    rellich_residual,
    trace_velocity,
)
from .families import FAMILIES, make_family
from .verify import CheckResult, SUITES, measured_dispersion_rate, run_suite
from .config import (
    RunConfig,
    RunManifest,
    build_initial,
    config_echo,
    parse_config,
    read_manifest,
    read_snapshot,
    run_simulation,
    write_manifest,
    write_snapshot,
)

__all__ = [
    "__version__",
    # errors
    "VortexSheetError", "DegenerateOperator", "RTBreakdown", "DtUnderflow",
    "NonFinite", "PointTooClose", "PathCrossesInterface",
    # parameters
    "FluidParams", "DerivedConstants", "derive_constants",
    # grid layer
    "Grid", "GridFunction", "spectral_derivative", "hilbert_transform",
    "integrate", "sobolev_norm", "l2_norm", "boundary_decay_ratio",
    "require_decay", "DECAY_TOL",
    # singular kernels
    "KernelSpec", "OperatorMatrix", "KERNEL_KINDS", "bnm_apply", "apply_A",
    "apply_A_star", "apply_B", "operator_apply", "assemble_matrix", "b01", "b11",
    # sheet strength
    "VortexSheet", "solve_omega", "rhs_no_tension", "rhs_tension",
    "lower_order_terms", "omega_decomposition", "resolvent_diagnostic",
    # stability
    "RTReport", "FrozenSymbols", "evaluate_rt", "frozen_symbols",
    "dispersion_rate", "rt_tolerance",
    # evolution
    "Snapshot", "StepControls", "Trajectory", "rhs_evolution", "step",
    "simulate", "initial_snapshot",
    # field reconstruction
    "FieldSample", "biot_savart", "trace_velocity", "normal_trace",
    "reconstruct_pressure", "rellich_residual", "far_field_decay",
    # families and verification
    "FAMILIES", "make_family", "CheckResult", "SUITES", "run_suite",
    "measured_dispersion_rate",
    # configuration and IO
    "RunConfig", "RunManifest", "parse_config", "build_initial", "config_echo",
    "write_snapshot", "read_snapshot", "write_manifest", "read_manifest",
    "run_simulation",
]
