import json
import subprocess
import sys

import pytest

from shemass.cli import main
from shemass.experiments import SCHEMA


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_kernel_peak(capsys):
    code, out, _ = run(capsys, "kernel", "--beta", "1", "--x", "0")
    assert code == 0 and out.strip() == "0.5"


def test_kernel_laplace_matches_closed_form(capsys):
    _, closed, _ = run(capsys, "kernel", "--beta", "1", "--x", "1")
    _, laplace, _ = run(capsys, "kernel", "--beta", "1", "--x", "1", "--laplace")
    assert abs(float(closed) - float(laplace)) < 1e-8


def test_energy_zero_profile_both_routes(capsys):
    code, out, _ = run(capsys, "energy", "--u0", "indicator:a=-1,b=1", "--v0", "zero", "--beta", "1")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert all(float(line.split()[1]) == 0.0 for line in lines)


def test_energy_from_csv(tmp_path, capsys):
    path = tmp_path / "f.csv"
    path.write_text("x,value\n" + "\n".join(f"{x / 4},{1.0 if abs(x) <= 4 else 0.0}"
                                              for x in range(-64, 65)))
    code, out, _ = run(capsys, "energy", "--u0", f"csv:{path}", "--v0", f"csv:{path}",
                       "--beta", "1", "--dx", "0.25", "--half-length", "16", "--route", "fourier")
    assert code == 0 and float(out.split()[1]) > 0


def test_bound_theorem_json(capsys):
    code, out, _ = run(capsys, "bound", "theorem", "--beta", "1", "--t", "0", "--lip1", "1",
                       "--lip2", "1", "--energy", "0.1")
    assert code == 0
    assert json.loads(out)["bound_value"] == pytest.approx(0.2, rel=1e-15)


def test_inadmissible_beta_exits_one(capsys):
    code, _, err = run(capsys, "bound", "theorem", "--beta", "0.2", "--t", "0.1", "--lip1", "1",
                       "--lip2", "1", "--energy", "0.1")
    assert code == 1 and "0.25" in err


def test_usage_errors_exit_one(capsys):
    for argv in (["frobnicate"], ["kernel", "--beta"], ["bound"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 1
    capsys.readouterr()


def test_unknown_config_key_exits_one(capsys, tmp_path):
    code, _, err = run(capsys, "experiment", "--name", "corollary2", "--set", "grid.nope=1",
                       "--out", str(tmp_path))
    assert code == 1 and "nope" in err


def test_print_config_round_trips(capsys, tmp_path):
    code, out, _ = run(capsys, "experiment", "--name", "theorem_sweep", "--print-config",
                       "--set", "experiment.n_paths=7")
    assert code == 0 and "n_paths = 7" in out
    path = tmp_path / "c.cfg"
    path.write_text(out)
    _, again, _ = run(capsys, "experiment", "--config", str(path), "--print-config")
    assert again == out


def test_help_lists_every_key(capsys):
    with pytest.raises(SystemExit):
        main(["experiment", "--help"])
    out = capsys.readouterr().out
    for key in SCHEMA:
        assert key.name in out


def test_experiment_rerun_writes_identical_files(capsys, tmp_path):
    argv = ["experiment", "--name", "martingale", "--set", "experiment.n_paths=32",
            "--set", "grid.half_length=6", "--set", "grid.t_end=0.1", "--set", "bounds.times=0.05, 0.1"]
    run(capsys, *argv, "--out", str(tmp_path / "a"))
    code, out, _ = run(capsys, *argv, "--out", str(tmp_path / "b"), "--workers", "2")
    assert code == 0 and out.startswith("martingale ")
    for ext in ("csv", "json"):
        a = (tmp_path / "a" / f"martingale.{ext}").read_bytes()
        b = (tmp_path / "b" / f"martingale.{ext}").read_bytes()
        assert a == b


def test_simulate_writes_manifest(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", "--set", "experiment.n_paths=8", "--set", "grid.half_length=4",
                       "--set", "grid.t_end=0.05", "--set", "bounds.times=0.05", "--out", str(tmp_path))
    assert code == 0
    manifest = json.loads((tmp_path / "ensemble.json").read_text())
    assert manifest["seed"] == 20241015 and "total_wall_time_s" in manifest
    header = (tmp_path / "ensemble.csv").read_text().splitlines()[0]
    assert header.startswith("t,")


def test_blowup_exits_two(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--set", "experiment.n_paths=2", "--set", "grid.half_length=2",
                       "--set", "grid.t_end=0.05", "--set", "bounds.times=0.05",
                       "--set", "profile.u0.value=1e300", "--set", "sigma.1.lam=1e12",
                       "--set", "sigma.2.lam=1e12", "--out", str(tmp_path))
    assert code == 2 and "blowup" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "shemass", "kernel", "--beta", "4"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip() == "0.25"
