import json

import numpy as np
import pytest

from shemass.errors import ConfigError, DomainError
from shemass.experiments import (
    CAMPAIGNS,
    SCHEMA,
    default_config_text,
    ensemble_for,
    load_config,
    report_csv_text,
    report_json_text,
    run_campaign,
    run_corollary1,
    run_cov_identity,
    run_martingale,
    run_pam_truncation,
    run_theorem_sweep,
    schema_help,
    write_report,
)

SMALL = ["experiment.n_paths=64", "grid.half_length=6"]


def test_every_campaign_has_a_packaged_config():
    for name in CAMPAIGNS:
        cfg = load_config(name=name)
        assert cfg.name == name
        assert "[experiment]" in default_config_text(name)


def test_help_lists_every_key():
    text = schema_help()
    for key in SCHEMA:
        assert f"  {key.name}:" in text
        assert f"[{key.section}]" in text


def test_unknown_keys_and_sections_are_errors(tmp_path):
    with pytest.raises(ConfigError, match="bogus"):
        load_config(name="martingale", overrides=["grid.bogus=1"])
    with pytest.raises(ConfigError):
        load_config(name="martingale", overrides=["nosuch.key=1"])
    with pytest.raises(ConfigError):
        load_config(name="martingale", overrides=["grid.dx"])
    path = tmp_path / "c.cfg"
    path.write_text("[experiment]\nname = martingale\n[extra]\nx = 1\n")
    with pytest.raises(ConfigError, match="extra"):
        load_config(path)
    path.write_text("[experiment]\nname = martingale\n[grid]\nmesh = 1\n")
    with pytest.raises(ConfigError, match="mesh"):
        load_config(path)


def test_bad_values_are_errors():
    with pytest.raises(ConfigError):
        load_config(name="martingale", overrides=["grid.dx=abc"])
    with pytest.raises(ConfigError):
        load_config(name="martingale", overrides=["grid.boundary=periodic"])
    with pytest.raises(ConfigError):
        load_config(name="nonexistent")


def test_file_overrides_default_and_flags_override_file(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("[experiment]\nname = martingale\nseed = 5\n[grid]\nt_end = 0.25\n")
    cfg = load_config(path, overrides=["grid.dx=0.0625"], seed=11)
    assert cfg.seed == 11
    assert cfg.get("grid", "t_end") == 0.25
    assert cfg.get("grid", "dx") == 0.0625
    assert cfg.get("profile.u0", "kind") == "indicator"


def test_ini_round_trip(tmp_path):
    cfg = load_config(name="theorem_sweep")
    path = tmp_path / "dump.cfg"
    path.write_text(cfg.to_ini())
    again = load_config(path)
    assert again.to_dict() == cfg.to_dict()


def test_provenance_excludes_execution_keys():
    d = load_config(name="martingale", overrides=["experiment.workers=4"]).to_dict()
    assert "workers" not in d["experiment"] and "block_size" not in d["experiment"]


def test_zero_sigma_martingale_has_no_leakage():
    cfg = load_config(name="martingale", overrides=SMALL + ["sigma.1.kind=zero"])
    report = run_martingale(cfg)
    assert report.passed
    assert report.summary["max_abs_deviation"] < 1e-8


def test_dirichlet_and_neumann_verdicts_agree():
    verdicts = []
    for boundary in ("dirichlet_zero", "neumann_zero"):
        cfg = load_config(name="martingale", overrides=[
            "experiment.n_paths=256", f"grid.boundary={boundary}"])
        verdicts.append(run_martingale(cfg).verdict)
    assert verdicts == ["PASS", "PASS"]


def test_cov_identity_with_zero_sigma_is_trivially_zero():
    cfg = load_config(name="cov_identity", overrides=SMALL + ["sigma.1.kind=zero"])
    report = run_cov_identity(cfg)
    assert np.all(report.column("cov_uv") == 0) and np.all(report.column("cov_rhs") == 0)
    assert report.passed


def test_cov_identity_identical_inputs_is_a_variance():
    cfg = load_config(name="cov_identity", overrides=SMALL + [
        "profile.v0.a=-1", "profile.v0.b=1"])
    ens = ensemble_for(cfg)
    assert np.array_equal(ens.mass_u, ens.mass_v)
    report = run_cov_identity(cfg, ensemble=ens)
    assert np.allclose(report.column("cov_uv"), ens.var_mass_u)
    assert np.all(report.column("cov_rhs")[1:] > 0)


def test_far_separated_profiles_have_zero_covariance():
    cfg = load_config(name="cov_identity", overrides=[
        "experiment.n_paths=128", "grid.half_length=10", "grid.t_end=0.1",
        "profile.u0.a=-6", "profile.u0.b=-5", "profile.v0.a=5", "profile.v0.b=6",
        "bounds.times=0.05, 0.1"])
    report = run_cov_identity(cfg)
    for r in report.table:
        assert abs(r["cov_uv"]) <= 4 * r["se_cov"] or r["cov_uv"] == 0
        # heat tails still touch, so the right side is tiny but not noise
        assert abs(r["cov_rhs"]) < 1e-12


def test_theorem_sweep_t0_row_and_route_independence():
    cfg = load_config(name="theorem_sweep", overrides=SMALL)
    report = run_theorem_sweep(cfg)
    zero_rows = [r for r in report.table if r["t"] == 0]
    assert len(zero_rows) == 3
    assert all(r["cov_uv"] == 0 and r["bound"] >= 0 for r in zero_rows)
    assert report.checks["routes_agree"]
    fourier = run_theorem_sweep(load_config(name="theorem_sweep", overrides=SMALL + [
        "bounds.route=fourier"]))
    assert [r["dominated"] for r in fourier.table] == [r["dominated"] for r in report.table]


def test_theorem_sweep_rejects_inadmissible_grid():
    cfg = load_config(name="theorem_sweep", overrides=SMALL + ["bounds.beta_grid=0.1, 1"])
    with pytest.raises(DomainError):
        run_theorem_sweep(cfg)


def test_ensemble_reuse_checks_compatibility():
    cfg = load_config(name="cov_identity", overrides=SMALL)
    ens = ensemble_for(cfg)
    other = load_config(name="theorem_sweep", overrides=SMALL + ["experiment.seed=1"])
    with pytest.raises(ConfigError):
        run_theorem_sweep(other, ensemble=ens)


def test_corollary1_overlapping_supports_is_vacuous():
    cfg = load_config(name="corollary1", overrides=[
        "experiment.n_paths=0", "profile.v0.a=-3.5", "profile.v0.b=0"])
    report = run_corollary1(cfg)
    assert report.summary["separation"] == 0
    assert not report.checks["window_nonempty"]
    assert any("empty" in n for n in report.notes)


def test_corollary1_zero_mass_profile_is_an_error():
    cfg = load_config(name="corollary1", overrides=["experiment.n_paths=0", "profile.v0.value=0"])
    with pytest.raises(DomainError):
        run_corollary1(cfg)


def test_corollary2_analytic_report():
    report = run_campaign(load_config(name="corollary2"))
    assert report.passed
    assert report.notes  # indicator spectra: vacuous horizon note


def test_pam_grid_too_small():
    cfg = load_config(name="pam_truncation", overrides=["grid.half_length=9"])
    with pytest.raises(ConfigError):
        run_pam_truncation(cfg)


def test_pam_t0_is_exact():
    cfg = load_config(name="pam_truncation", overrides=[
        "experiment.n_paths=16", "pam.truncations=1, 2"])
    report = run_pam_truncation(cfg)
    for r in report.table:
        assert r["mean_mass_t0"] == 2 * r["N"] and r["var_mass_t0"] == 0
    assert "almost sure" in report.summary["interpretation"]


def test_reports_are_written_atomically_and_reproducibly(tmp_path):
    cfg = load_config(name="martingale", overrides=SMALL)
    a = run_martingale(cfg)
    paths = write_report(a, tmp_path, stem="m")
    b = run_martingale(cfg)
    paths2 = write_report(b, tmp_path, stem="m2")
    assert open(paths[0]).read() == open(paths2[0]).read()
    assert open(paths[1]).read() == open(paths2[1]).read()
    doc = json.loads(open(paths[1]).read())
    assert doc["config"]["experiment"]["name"] == "martingale"
    assert "version" in doc and doc["verdict"] in ("PASS", "FAIL")
    assert "wall" not in open(paths[1]).read()
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".tmp-")]
    assert report_csv_text(a).splitlines()[0].startswith("t,mean_mass")
    assert report_json_text(a) == report_json_text(b)
