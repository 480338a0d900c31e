"""Command-line interface.

Subcommands: simulate, check-rt, dispersion, verify, reconstruct.
Exit codes: 0 success, 1 property failure / aborted run / runtime error,
2 usage error (argparse).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import build_initial, parse_config, read_snapshot, run_simulation
from .errors import VortexSheetError
from .fields import biot_savart, reconstruct_pressure
from .params import FluidParams, derive_constants
from .stability import dispersion_rate, evaluate_rt
from .verify import SUITES, run_suite
from .version import __version__


def _k_list(text: str):
    try:
        ks = [float(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid wavenumber list: {text!r}")
    if not ks:
        raise argparse.ArgumentTypeError("empty wavenumber list")
    return ks


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortexsheet",
        description="Boundary-integral simulation and verification for a "
                    "two-phase interface in a porous medium.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a configured simulation")
    p_sim.add_argument("--config", required=True, help="JSON config file")
    p_sim.add_argument("--out", help="output directory (overrides config)")

    p_rt = sub.add_parser("check-rt", help="Rayleigh-Taylor condition of the "
                                           "configured initial state")
    p_rt.add_argument("--config", required=True, help="JSON config file")

    p_disp = sub.add_parser("dispersion", help="print linear decay rates")
    p_disp.add_argument("--k", required=True, type=_k_list,
                        help="comma-separated wavenumbers, e.g. 1,2,4")
    p_disp.add_argument("--sigma", type=float, default=0.0,
                        help="surface tension (default 0)")
    p_disp.add_argument("--config", help="take fluid parameters from a config file")

    p_ver = sub.add_parser("verify", help="run a property suite")
    p_ver.add_argument("--suite", required=True, choices=sorted(SUITES))

    p_rec = sub.add_parser("reconstruct", help="velocity/pressure at sample points")
    p_rec.add_argument("--snapshot", required=True, help="snapshot CSV file")
    p_rec.add_argument("--points", required=True,
                       help="CSV of x,y sample points (header optional)")
    p_rec.add_argument("--config", help="config file (enables pressure reconstruction)")
    p_rec.add_argument("--out", help="output CSV path (default: stdout)")
    return parser


def _cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    traj, manifest, mpath = run_simulation(cfg, args.out)
    print(f"termination: {traj.termination}  steps: {traj.steps}  "
          f"t_final: {traj.final.t:.6g}  snapshots: {len(traj.snapshots)}")
    print(f"manifest: {mpath}")
    return 0 if traj.termination == "completed" else 1


def _cmd_check_rt(args) -> int:
    cfg = parse_config(args.config)
    f0 = build_initial(cfg)
    report = evaluate_rt(f0, derive_constants(cfg.params))
    print(json.dumps({
        "in_O": report.in_O,
        "infimum": report.infimum,
        "tolerance": report.tolerance,
    }))
    return 0 if report.in_O else 1


def _cmd_dispersion(args) -> int:
    if args.config:
        p = parse_config(args.config).params
        if args.sigma:
            p = FluidParams(p.mu_minus, p.mu_plus, p.rho_minus, p.rho_plus,
                            p.g, p.k, args.sigma, p.V)
    else:
        p = FluidParams.normalized(a_mu=0.0, theta=1.0, sigma=args.sigma)
    sigma_on = p.sigma > 0
    print("k,rate")
    for k in args.k:
        print(f"{k:g},{dispersion_rate(k, sigma_on, p):.12g}")
    return 0


def _cmd_verify(args) -> int:
    results = run_suite(args.suite)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        detail = f"  ({r.detail})" if r.detail else ""
        print(f"{status} {r.name}: {r.value:.3e} vs {r.tolerance:.3e}{detail}")
        failed += 0 if r.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def _read_points(path):
    pts = []
    for i, line in enumerate(Path(path).read_text().splitlines()):
        line = line.strip()
        if not line or line.lower().replace(" ", "") in ("x,y",):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}: line {i + 1}: expected 'x,y'")
        pts.append((float(parts[0]), float(parts[1])))
    if not pts:
        raise ValueError(f"{path}: no sample points found")
    return pts


def _cmd_reconstruct(args) -> int:
    snap = read_snapshot(args.snapshot)
    points = _read_points(args.points)
    if args.config:
        cfg = parse_config(args.config)
        samples = reconstruct_pressure(snap.f, snap.omega.omega, cfg.params, points)
    else:
        samples = biot_savart(snap.f, snap.omega.omega, points)
    lines = ["x,y,v1,v2,pressure,side"]
    for s in samples:
        pressure = "" if s.pressure_minus_frame is None else f"{s.pressure_minus_frame:.17g}"
        lines.append(f"{s.point[0]:.17g},{s.point[1]:.17g},"
                     f"{s.velocity[0]:.17g},{s.velocity[1]:.17g},{pressure},{s.side}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "check-rt": _cmd_check_rt,
    "dispersion": _cmd_dispersion,
    "verify": _cmd_verify,
    "reconstruct": _cmd_reconstruct,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (VortexSheetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
