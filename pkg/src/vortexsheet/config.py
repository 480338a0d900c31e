"""Run configuration (JSON), snapshot files, and run manifests.

Config schema (JSON object; see README for a complete example)::

    {
      "params":  {"mu_minus": .., "mu_plus": .., "rho_minus": .., "rho_plus": ..,
                  "g": 9.81, "k": 1.0, "sigma": 0.0, "V": 0.0},
      "grid":    {"L": 20.0, "N": 512},
      "initial_condition": {"family": "gaussian", "params": {"amp": 0.1}}
                           -- or -- {"path": "some_snapshot.csv"},
      "t_end": 0.5,
      "controls": { .. StepControls fields .. },        # optional
      "snapshot_every": 10,                             # optional
      "output_dir": "out"                               # optional
    }

Snapshot files are a single JSON header line (time, grid, sheet-solve
metadata, diagnostics) followed by CSV `x,f,omega` with 17-significant-digit
decimals, which round-trip float64 exactly.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .evolution import Snapshot, StepControls, Trajectory, simulate
from .families import make_family
from .grid import Grid, GridFunction, require_decay
from .params import FluidParams
from .sheet import VortexSheet
from .version import __version__

_COLUMNS = "x,f,omega"


@dataclass(frozen=True)
class RunConfig:
    params: FluidParams
    grid: Grid
    initial_condition: dict
    t_end: float
    controls: StepControls
    snapshot_every: int = 10
    output_dir: str = "."


@dataclass(frozen=True)
class RunManifest:
    config: dict
    termination: str
    wall_time: float
    snapshots: tuple  # of {"file": name, "t": time}
    version: str
    diagnostics: dict


def _expect_mapping(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ValueError(f"'{where}' must be an object")
    return obj


def _build_section(cls, data: dict, where: str, required=()):
    names = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            raise ValueError(f"unknown field '{where}.{key}'")
    for key in required:
        if key not in data:
            raise ValueError(f"missing field '{where}.{key}'")
    try:
        return cls(**data)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"{where}: {exc}") from exc


def parse_config(path) -> RunConfig:
    """Load and validate a JSON run configuration.

    Defaults: controls = StepControls() (rk_adaptive stepper, rel_tol 1e-8),
    snapshot_every = 10, output_dir = ".".  The initial condition is built
    once here so schema and boundary-decay problems surface at parse time
    with the offending field named.
    """
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config is not valid JSON: {exc}") from exc
    raw = _expect_mapping(raw, "config")
    known = {"params", "grid", "initial_condition", "t_end", "controls",
             "snapshot_every", "output_dir"}
    for key in raw:
        if key not in known:
            raise ValueError(f"unknown field '{key}'")
    for key in ("params", "grid", "initial_condition", "t_end"):
        if key not in raw:
            raise ValueError(f"missing field '{key}'")

    params = _build_section(FluidParams, _expect_mapping(raw["params"], "params"),
                            "params", required=("mu_minus", "mu_plus", "rho_minus", "rho_plus"))

    gsec = _expect_mapping(raw["grid"], "grid")
    for key in gsec:
        if key not in ("L", "N"):
            raise ValueError(f"unknown field 'grid.{key}'")
    for key in ("L", "N"):
        if key not in gsec:
            raise ValueError(f"missing field 'grid.{key}'")
    n = gsec["N"]
    if not isinstance(n, int):
        raise ValueError("grid.N must be an integer")
    try:
        grid = Grid(float(gsec["L"]), n)
    except ValueError as exc:
        raise ValueError(str(exc)) from exc  # e.g. "N must be even"

    t_end = raw["t_end"]
    if not isinstance(t_end, (int, float)) or not t_end > 0:
        raise ValueError("'t_end' must be a positive number")

    controls = _build_section(StepControls,
                              _expect_mapping(raw.get("controls", {}), "controls"),
                              "controls")

    snapshot_every = raw.get("snapshot_every", 10)
    if not isinstance(snapshot_every, int) or snapshot_every < 1:
        raise ValueError("'snapshot_every' must be a positive integer")

    output_dir = raw.get("output_dir", ".")
    if not isinstance(output_dir, str):
        raise ValueError("'output_dir' must be a string")

    ic = _expect_mapping(raw["initial_condition"], "initial_condition")
    cfg = RunConfig(params=params, grid=grid, initial_condition=ic, t_end=float(t_end),
                    controls=controls, snapshot_every=snapshot_every, output_dir=output_dir)
    build_initial(cfg)  # validates the family spec and boundary decay
    return cfg


def build_initial(cfg: RunConfig) -> GridFunction:
    """Construct the initial condition described by the config."""
    ic = cfg.initial_condition
    if "path" in ic:
        snap = read_snapshot(ic["path"])
        if snap.f.grid != cfg.grid:
            raise ValueError("initial_condition.path: snapshot grid does not match config grid")
        return snap.f
    if "family" not in ic:
        raise ValueError("initial_condition needs either 'family' or 'path'")
    fam = ic["family"]
    fparams = _expect_mapping(ic.get("params", {}), "initial_condition.params")
    try:
        f0 = make_family(fam, cfg.grid, **fparams)
    except TypeError as exc:
        raise ValueError(f"initial_condition.params: {exc}") from exc
    require_decay(f0, cfg.controls.decay_tol, f"initial condition '{fam}'")
    return f0


def config_echo(cfg: RunConfig) -> dict:
    """Round-trippable dict representation (the manifest's config echo)."""
    return {
        "params": dataclasses.asdict(cfg.params),
        "grid": {"L": cfg.grid.half_length, "N": cfg.grid.n},
        "initial_condition": cfg.initial_condition,
        "t_end": cfg.t_end,
        "controls": dataclasses.asdict(cfg.controls),
        "snapshot_every": cfg.snapshot_every,
        "output_dir": cfg.output_dir,
    }


# ---------------------------------------------------------------------------
# snapshot files

def _snapshot_name(t: float) -> str:
    return f"snapshot_t{t:.9e}.csv"


def write_snapshot(snap: Snapshot, directory) -> str:
    """Write one snapshot; returns the file path.

    Format: JSON header line, then `x,f,omega` CSV with %.17g decimals
    (bit-exact float64 round trip).
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / _snapshot_name(snap.t)
    g = snap.f.grid
    header = {
        "time": snap.t,
        "grid": {"L": g.half_length, "N": g.n},
        "sheet": {
            "residual_norm": snap.omega.residual_norm,
            "method": snap.omega.method,
            "iterations": snap.omega.iterations,
        },
        "diagnostics": snap.diagnostics,
    }
    lines = [json.dumps(header), _COLUMNS]
    for x, fv, wv in zip(g.x, snap.f.values, snap.omega.omega.values):
        lines.append(f"{x:.17g},{fv:.17g},{wv:.17g}")
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def read_snapshot(path) -> Snapshot:
    """Inverse of write_snapshot; value arrays round-trip bit-exactly."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty snapshot file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed JSON header (line 1): {exc}") from exc
    for key in ("time", "grid", "sheet", "diagnostics"):
        if key not in header:
            raise ValueError(f"{path}: header missing '{key}' (line 1)")
    if len(lines) < 2 or lines[1] != _COLUMNS:
        raise ValueError(f"{path}: expected column header '{_COLUMNS}' on line 2")
    grid = Grid(float(header["grid"]["L"]), int(header["grid"]["N"]))
    rows = lines[2:]
    if len(rows) != grid.n:
        raise ValueError(f"{path}: expected {grid.n} data rows, found {len(rows)}")
    data = np.empty((grid.n, 3))
    for i, row in enumerate(rows):
        parts = row.split(",")
        if len(parts) != 3:
            raise ValueError(f"{path}: line {i + 3}: expected 3 comma-separated values")
        try:
            data[i] = [float(p) for p in parts]
        except ValueError as exc:
            raise ValueError(f"{path}: line {i + 3}: {exc}") from exc
    if float(np.abs(data[:, 0] - grid.x).max()) > 1e-12 * max(1.0, grid.half_length):
        raise ValueError(f"{path}: x column does not match the header grid")
    f = GridFunction(grid, data[:, 1].copy())
    sheet = VortexSheet(
        omega=GridFunction(grid, data[:, 2].copy()),
        residual_norm=float(header["sheet"]["residual_norm"]),
        method=str(header["sheet"]["method"]),
        iterations=int(header["sheet"]["iterations"]),
    )
    return Snapshot(t=float(header["time"]), f=f, omega=sheet,
                    diagnostics=dict(header["diagnostics"]))


# ---------------------------------------------------------------------------
# manifests and orchestration

def write_manifest(manifest: RunManifest, directory) -> str:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "manifest.json"
    path.write_text(json.dumps(dataclasses.asdict(manifest), indent=2) + "\n")
    return str(path)


def read_manifest(path) -> RunManifest:
    raw = json.loads(Path(path).read_text())
    return RunManifest(
        config=raw["config"],
        termination=raw["termination"],
        wall_time=raw["wall_time"],
        snapshots=tuple(raw["snapshots"]),
        version=raw["version"],
        diagnostics=raw["diagnostics"],
    )


def _diagnostics_summary(traj: Trajectory) -> dict:
    final = traj.final.diagnostics
    summary = {f"final_{k}": v for k, v in final.items()}
    rts = [s.diagnostics["rt_infimum"] for s in traj.snapshots
           if "rt_infimum" in s.diagnostics]
    if rts:
        summary["min_rt_infimum"] = min(rts)
    return summary


def run_simulation(cfg: RunConfig, output_dir: Optional[str] = None):
    """Run the configured simulation; write snapshots and manifest.json.

    Returns (trajectory, manifest, manifest_path).  Re-running the same
    config reproduces the snapshot files byte-for-byte (the manifest's wall
    time differs).
    """
    out = Path(output_dir if output_dir is not None else cfg.output_dir)
    f0 = build_initial(cfg)
    traj = simulate(f0, cfg.params, cfg.t_end, cfg.controls, cfg.snapshot_every)
    entries = []
    for snap in traj.snapshots:
        fpath = write_snapshot(snap, out)
        entries.append({"file": os.path.basename(fpath), "t": snap.t})
    manifest = RunManifest(
        config=config_echo(cfg),
        termination=traj.termination,
        wall_time=traj.wall_time,
        snapshots=tuple(entries),
        version=__version__,
        diagnostics=_diagnostics_summary(traj),
    )
    return traj, manifest, write_manifest(manifest, out)
