"""Config parsing, snapshot/manifest round trips, and the CLI surface."""

import json

import numpy as np
import pytest

from vortexsheet import FluidParams, Grid, initial_snapshot
from vortexsheet.cli import main
from vortexsheet.config import (
    build_initial,
    config_echo,
    parse_config,
    read_manifest,
    read_snapshot,
    run_simulation,
    write_snapshot,
)
from vortexsheet.families import gaussian


def base_config(**overrides):
    cfg = {
        "params": {"mu_minus": 1.5, "mu_plus": 0.5, "rho_minus": 2.0,
                   "rho_plus": 1.0, "g": 1.0, "sigma": 0.0},
        "grid": {"L": 10.0, "N": 64},
        "initial_condition": {"family": "gaussian",
                              "params": {"amp": 0.1, "width": 1.0}},
        "t_end": 0.05,
        "controls": {"rel_tol": 1e-6},
        "snapshot_every": 5,
    }
    cfg.update(overrides)
    return cfg


def write_config(tmp_path, name="config.json", **overrides):
    path = tmp_path / name
    path.write_text(json.dumps(base_config(**overrides)))
    return str(path)


# ---------------------------------------------------------------------------
# config parsing


def test_parse_minimal_config_defaults(tmp_path):
    raw = base_config()
    del raw["controls"], raw["snapshot_every"]
    path = tmp_path / "min.json"
    path.write_text(json.dumps(raw))
    cfg = parse_config(path)
    assert cfg.controls.stepper == "rk_adaptive"
    assert cfg.controls.rel_tol == 1e-8
    assert cfg.snapshot_every == 10
    assert cfg.output_dir == "."
    assert cfg.grid.n == 64 and cfg.grid.half_length == 10.0
    assert cfg.params.mu_minus == 1.5 and cfg.params.sigma == 0.0
    f0 = build_initial(cfg)
    assert np.abs(f0.values).max() == pytest.approx(0.1, rel=1e-12)


def test_parse_echo_round_trips(tmp_path):
    path = write_config(tmp_path)
    cfg = parse_config(path)
    echo = config_echo(cfg)
    path2 = tmp_path / "echo.json"
    path2.write_text(json.dumps(echo))
    cfg2 = parse_config(path2)
    assert cfg2 == cfg


@pytest.mark.parametrize("mutate,fragment", [
    (lambda c: c.update(colour="red"), "unknown field 'colour'"),
    (lambda c: c["grid"].update(spacing=0.1), "unknown field 'grid.spacing'"),
    (lambda c: c["params"].update(zeta=1.0), "unknown field 'params.zeta'"),
    (lambda c: c["controls"].update(fast=True), "unknown field 'controls.fast'"),
    (lambda c: c.pop("params"), "missing field 'params'"),
    (lambda c: c["grid"].pop("N"), "missing field 'grid.N'"),
    (lambda c: c["params"].pop("rho_plus"), "missing field 'params.rho_plus'"),
    (lambda c: c["grid"].update(N=65), "N must be even"),
    (lambda c: c["grid"].update(N=64.0), "grid.N must be an integer"),
    (lambda c: c.update(t_end=0), "'t_end' must be a positive number"),
    (lambda c: c.update(snapshot_every=0), "'snapshot_every' must be a positive integer"),
    (lambda c: c["params"].update(sigma=-1.0), "params:"),
    (lambda c: c["params"].update(mu_minus=-2.0), "params:"),
    (lambda c: c.update(initial_condition={"family": "sawtooth"}), "sawtooth"),
    (lambda c: c.update(initial_condition={"params": {"amp": 0.1}}),
     "either 'family' or 'path'"),
    (lambda c: c.update(initial_condition={"family": "gaussian",
                                           "params": {"amplitude": 0.1}}),
     "initial_condition.params:"),
])
def test_parse_rejects_bad_configs(tmp_path, mutate, fragment):
    raw = base_config()
    mutate(raw)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(raw))
    with pytest.raises(ValueError) as err:
        parse_config(path)
    assert fragment in str(err.value)


def test_parse_rejects_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ValueError, match="not valid JSON"):
        parse_config(path)


def test_parse_rejects_non_decaying_initial_condition(tmp_path):
    # wavepacket of width 6 on L = 10 leaves visible mass at the window edge
    path = write_config(tmp_path, initial_condition={
        "family": "wavepacket", "params": {"k": 2.0, "amp": 0.01, "width": 6.0}})
    with pytest.raises(ValueError, match="boundary-decay"):
        parse_config(path)


# ---------------------------------------------------------------------------
# snapshot files


def test_snapshot_round_trip_bit_exact(tmp_path):
    g = Grid(12.0, 96)
    p = FluidParams.normalized(0.4, 1.0, sigma=0.0)
    snap = initial_snapshot(gaussian(g, 0.7, 1.3), p)
    path = write_snapshot(snap, tmp_path)
    back = read_snapshot(path)
    assert back.t == snap.t
    assert back.f.grid == g
    assert np.array_equal(back.f.values, snap.f.values)
    assert np.array_equal(back.omega.omega.values, snap.omega.omega.values)
    assert back.omega.residual_norm == snap.omega.residual_norm
    assert back.omega.method == snap.omega.method
    assert back.omega.iterations == snap.omega.iterations
    assert back.diagnostics == snap.diagnostics


def test_snapshot_round_trip_zero_state(tmp_path):
    from vortexsheet.families import zero

    g = Grid(8.0, 32)
    snap = initial_snapshot(zero(g), FluidParams.normalized(0.0, 1.0, sigma=1.0))
    back = read_snapshot(write_snapshot(snap, tmp_path))
    assert np.array_equal(back.f.values, np.zeros(32))
    assert np.array_equal(back.omega.omega.values, snap.omega.omega.values)


def snapshot_lines(tmp_path):
    g = Grid(8.0, 32)
    snap = initial_snapshot(gaussian(g, 0.2, 1.0),
                            FluidParams.normalized(0.0, 1.0, sigma=0.0))
    path = write_snapshot(snap, tmp_path)
    return path, open(path).read().splitlines()


@pytest.mark.parametrize("mangle,fragment", [
    (lambda ls: ["{oops"] + ls[1:], "malformed JSON header (line 1)"),
    (lambda ls: [ls[0], "x;f;omega"] + ls[2:], "column header 'x,f,omega' on line 2"),
    (lambda ls: ls[:4] + ["1.0,2.0"] + ls[5:], "line 5: expected 3 comma-separated values"),
    (lambda ls: ls[:4] + ["1.0,nope,3.0"] + ls[5:], "line 5"),
    (lambda ls: ls[:-1], "expected 32 data rows"),
])
def test_read_snapshot_names_bad_line(tmp_path, mangle, fragment):
    path, lines = snapshot_lines(tmp_path)
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(mangle(lines)) + "\n")
    with pytest.raises(ValueError) as err:
        read_snapshot(bad)
    assert fragment in str(err.value)


def test_read_snapshot_rejects_empty_file(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ValueError, match="empty snapshot file"):
        read_snapshot(empty)


def test_read_snapshot_checks_x_column(tmp_path):
    path, lines = snapshot_lines(tmp_path)
    parts = lines[4].split(",")
    parts[0] = str(float(parts[0]) + 0.5)
    lines[4] = ",".join(parts)
    bad = tmp_path / "shifted.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError, match="x column does not match"):
        read_snapshot(bad)


def test_initial_condition_from_snapshot_path(tmp_path):
    g = Grid(10.0, 64)
    p = FluidParams.normalized(0.4, 1.0, sigma=0.0)
    snap = initial_snapshot(gaussian(g, 0.1, 1.0), p)
    spath = write_snapshot(snap, tmp_path)
    cfg = parse_config(write_config(tmp_path, initial_condition={"path": spath}))
    f0 = build_initial(cfg)
    assert np.array_equal(f0.values, snap.f.values)
    # mismatched grid is rejected
    cfg_bad = write_config(tmp_path, name="bad_grid.json",
                           initial_condition={"path": spath},
                           grid={"L": 10.0, "N": 128})
    with pytest.raises(ValueError, match="does not match config grid"):
        parse_config(cfg_bad)


# ---------------------------------------------------------------------------
# manifests and reproducibility


def test_run_simulation_outputs_match_manifest(tmp_path):
    cfg = parse_config(write_config(tmp_path))
    out = tmp_path / "out"
    traj, manifest, mpath = run_simulation(cfg, str(out))
    assert traj.termination == "completed"
    assert manifest.termination == "completed"
    assert manifest.snapshots[0]["t"] == 0.0
    assert manifest.snapshots[-1]["t"] == pytest.approx(0.05, rel=1e-12)
    for entry in manifest.snapshots:
        back = read_snapshot(out / entry["file"])
        assert back.t == entry["t"]
    assert "final_sup_norm" in manifest.diagnostics
    assert "min_rt_infimum" in manifest.diagnostics  # sigma = 0 run
    back = read_manifest(mpath)
    assert back.config == manifest.config
    assert back.snapshots == manifest.snapshots


def test_rerun_reproduces_snapshots_byte_identical(tmp_path):
    cfg = parse_config(write_config(tmp_path))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    _, man_a, _ = run_simulation(cfg, str(out_a))
    _, man_b, _ = run_simulation(cfg, str(out_b))
    assert man_a.config == man_b.config
    assert [e["file"] for e in man_a.snapshots] == [e["file"] for e in man_b.snapshots]
    for entry in man_a.snapshots:
        assert (out_a / entry["file"]).read_bytes() == (out_b / entry["file"]).read_bytes()


# ---------------------------------------------------------------------------
# CLI


def test_cli_simulate_completed_exit_zero(tmp_path, capsys):
    cpath = write_config(tmp_path)
    out = tmp_path / "run"
    assert main(["simulate", "--config", cpath, "--out", str(out)]) == 0
    captured = capsys.readouterr().out
    assert "termination: completed" in captured
    assert (out / "manifest.json").exists()


def test_cli_simulate_aborted_exit_one(tmp_path, capsys):
    # rho_minus < rho_plus puts the flat state outside O: refused at t = 0
    cpath = write_config(tmp_path, params={
        "mu_minus": 1.0, "mu_plus": 1.0, "rho_minus": 1.0,
        "rho_plus": 2.0, "g": 1.0})
    out = tmp_path / "run"
    assert main(["simulate", "--config", cpath, "--out", str(out)]) == 1
    assert "termination: rt_breakdown" in capsys.readouterr().out


def test_cli_check_rt_json_verdicts(tmp_path, capsys):
    assert main(["check-rt", "--config", write_config(tmp_path)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["in_O"] is True
    assert report["infimum"] > 0
    assert 0 < report["tolerance"] < 1e-8

    unstable = write_config(tmp_path, name="unstable.json", params={
        "mu_minus": 1.0, "mu_plus": 1.0, "rho_minus": 1.0,
        "rho_plus": 2.0, "g": 1.0})
    assert main(["check-rt", "--config", unstable]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["in_O"] is False
    assert report["infimum"] < 0


def test_cli_dispersion_csv(capsys):
    assert main(["dispersion", "--k", "1,2,4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "k,rate"
    ks = [float(line.split(",")[0]) for line in lines[1:]]
    rates = [float(line.split(",")[1]) for line in lines[1:]]
    assert ks == [1.0, 2.0, 4.0]
    assert rates == pytest.approx([0.5, 1.0, 2.0], rel=1e-12)

    assert main(["dispersion", "--k", "2", "--sigma", "1.0"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert float(lines[1].split(",")[1]) == pytest.approx(5.0, rel=1e-12)


def test_cli_dispersion_reads_params_from_config(tmp_path, capsys):
    # theta = g (rho_- - rho_+) = 1 and b_mu = 2k/(mu_- + mu_+) = 1 here,
    # so sigma = 0 rates coincide with the normalized default
    assert main(["dispersion", "--k", "2", "--config", write_config(tmp_path)]) == 0
    assert float(capsys.readouterr().out.splitlines()[1].split(",")[1]) == pytest.approx(1.0)


def test_cli_verify_suite_passes(capsys):
    assert main(["verify", "--suite", "plemelj"]) == 0
    out = capsys.readouterr().out
    assert "checks passed" in out
    assert "FAIL" not in out


def test_cli_reconstruct_velocity_and_pressure(tmp_path, capsys):
    g = Grid(10.0, 64)
    p = FluidParams.normalized(0.4, 1.0, sigma=0.0)
    snap = initial_snapshot(gaussian(g, 0.1, 1.0), p)
    spath = write_snapshot(snap, tmp_path)
    pts = tmp_path / "points.csv"
    pts.write_text("x,y\n0.0,3.0\n1.0,-4.0\n")

    assert main(["reconstruct", "--snapshot", spath, "--points", str(pts)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x,y,v1,v2,pressure,side"
    rows = [line.split(",") for line in lines[1:]]
    assert [r[5] for r in rows] == ["above", "below"]
    assert all(r[4] == "" for r in rows)  # no config = no pressure
    assert all(np.isfinite(float(v)) for r in rows for v in r[2:4])

    out_csv = tmp_path / "rec.csv"
    assert main(["reconstruct", "--snapshot", spath, "--points", str(pts),
                 "--config", write_config(tmp_path), "--out", str(out_csv)]) == 0
    rows = [line.split(",") for line in out_csv.read_text().splitlines()[1:]]
    assert all(np.isfinite(float(r[4])) for r in rows)


def test_cli_runtime_error_exit_one(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 1
    assert "error:" in capsys.readouterr().err


def test_cli_usage_errors_exit_two():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["simulate"])  # missing required --config
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["verify", "--suite", "nonsense"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["dispersion", "--k", "a,b"])
    assert err.value.code == 2
