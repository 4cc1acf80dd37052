"""End-to-end CLI runs in temp directories: files, determinism, exit codes."""

import filecmp
import json
import os

import numpy as np
import pytest

from chirpsqueeze.cli import main

LIN_CFG = {
    "profile": {"kind": "linear", "K0": 894.0, "zeta": 38.5, "length_mm": 4.5},
    "pump": {"nu": 0.1},
    "grid": {"n": 128},
}


def write_cfg(tmp_path, cfg, name="run.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def read_report(out, stem):
    with open(os.path.join(out, f"{stem}_report.json")) as fh:
        return json.load(fh)


def test_spectrum_files_and_rows(tmp_path):
    cfg = write_cfg(tmp_path, LIN_CFG)
    out = str(tmp_path / "out")
    assert main(["spectrum", "--config", cfg, "--out", out]) == 0
    names = sorted(os.listdir(out))
    assert names == ["spectrum.png", "spectrum_exact.csv",
                     "spectrum_first_order.csv", "spectrum_ode.csv",
                     "spectrum_report.json"]
    rep = read_report(out, "spectrum")
    assert rep["solvers"] == ["exact", "first_order", "ode"]
    with open(os.path.join(out, "spectrum_exact.csv")) as fh:
        lines = fh.read().splitlines()
    assert lines[0] == f"# config_hash={rep['config_hash']} solver=exact"
    assert lines[1].split(",") == ["omega_norm", "S", "S1", "S2_db", "r",
                                   "psi_L", "psi_0", "kappa", "tau_fs"]
    assert len(lines) == 2 + 128
    assert all(len(l.split(",")) == 9 for l in lines[2:])
    assert os.path.getsize(os.path.join(out, "spectrum.png")) > 1000
    # dual-route agreement surfaced in the report
    pw = rep["pairwise"]["ode_vs_exact"]
    assert pw["max_rel_V2_diff"] < 1e-5
    assert pw["max_U_phase_diff_rad"] < 1e-6


def test_spectrum_byte_deterministic(tmp_path):
    cfg = write_cfg(tmp_path, LIN_CFG)
    out1, out2 = str(tmp_path / "o1"), str(tmp_path / "o2")
    assert main(["spectrum", "--config", cfg, "--out", out1]) == 0
    assert main(["spectrum", "--config", cfg, "--out", out2]) == 0
    for name in ("spectrum_exact.csv", "spectrum_first_order.csv",
                 "spectrum_ode.csv", "spectrum_report.json"):
        assert filecmp.cmp(os.path.join(out1, name),
                           os.path.join(out2, name), shallow=False), name


def test_spectrum_solver_subset_and_pump_flag(tmp_path):
    cfg = dict(LIN_CFG)
    cfg.pop("pump")
    path = write_cfg(tmp_path, cfg)
    out = str(tmp_path / "out")
    assert main(["spectrum", "--config", path, "--nu", "0.3",
                 "--solvers", "exact", "--out", out]) == 0
    names = sorted(os.listdir(out))
    assert names == ["spectrum.png", "spectrum_exact.csv", "spectrum_report.json"]
    rep = read_report(out, "spectrum")
    assert rep["config"]["pump"]["nu"] == 0.3


def test_angles_strict_needs_fine_grid(tmp_path):
    cfg = write_cfg(tmp_path, LIN_CFG)
    # the output angle slope is hundreds of radians per unit detuning, so a
    # coarse grid cannot track the branch and strict mode must refuse
    assert main(["angles", "--config", cfg, "--grid", "128",
                 "--solvers", "exact", "--out", str(tmp_path / "bad")]) == 3
    assert main(["angles", "--config", cfg, "--grid", "128", "--best-effort",
                 "--solvers", "exact", "--out", str(tmp_path / "be")]) == 0
    # a config that pins grid.n counts as explicit, so drop it here
    nogrid = {k: v for k, v in LIN_CFG.items() if k != "grid"}
    cfg2 = write_cfg(tmp_path, nogrid, "nogrid.json")
    out = str(tmp_path / "ok")
    assert main(["angles", "--config", cfg2, "--solvers", "exact",
                 "--out", out]) == 0
    rep = read_report(out, "angles")
    # no --grid and no config n=...: the fine angles default applies
    assert rep["config"]["grid"]["n"] == 4096
    assert rep["per_solver"]["exact"]["max_half_step_rad"] < np.pi / 4


def test_mu_study_outputs(tmp_path):
    cfg = write_cfg(tmp_path, {"mu_study": {"nu_values": [0.5, 1.0, 2.0],
                                            "mu_values": [0.0, 1.0]}})
    out = str(tmp_path / "out")
    assert main(["mu-study", "--config", cfg, "--out", out]) == 0
    with open(os.path.join(out, "mu_study.csv")) as fh:
        lines = fh.read().splitlines()
    assert lines[1].split(",") == ["nu", "gain_reference",
                                   "gain_mu0", "abs_dist_mu0", "log_dist_mu0",
                                   "gain_mu1", "abs_dist_mu1", "log_dist_mu1"]
    assert len(lines) == 2 + 3
    rep = json.load(open(os.path.join(out, "mu_study_report.json")))
    # cosh wins on absolute distance at nu = 0.5, the asymptotic form beyond
    assert rep["nearest_by_abs_distance"] == ["mu0", "mu1", "mu1"]
    assert rep["nearest_by_log_distance"] == ["mu1", "mu1", "mu1"]
    assert os.path.exists(os.path.join(out, "mu_study.png"))


def test_design_band_mode(tmp_path):
    cfg = write_cfg(tmp_path, {"design": {"length_mm": 4.5,
                                          "band": [0.25, 0.5]}})
    out = str(tmp_path / "out")
    assert main(["design", "--config", cfg, "--out", out]) == 0
    with open(os.path.join(out, "profile.csv")) as fh:
        lines = fh.read().splitlines()
    assert lines[1].split(",") == ["z_mm", "K_rad_per_mm", "period_um"]
    assert len(lines) == 2 + 1025
    rep = json.load(open(os.path.join(out, "design_report.json")))
    assert rep["max_relative_delay_deviation"] < 0.05
    assert rep["design"]["decreasing"] is True
    assert rep["design"]["K_start_rad_per_mm"] > rep["design"]["K_end_rad_per_mm"]
    assert os.path.exists(os.path.join(out, "design.png"))


def test_design_law_mode_roundtrip(tmp_path):
    # the slope/offset pair below encodes the [0.25, 0.5] band at L = 4.5
    cfg = write_cfg(tmp_path, {"design": {"length_mm": 4.5,
                                          "delay_slope_fs": 3736.5509217055505,
                                          "delay_offset_fs": -1868.2754608527753}})
    out = str(tmp_path / "out")
    assert main(["design", "--config", cfg, "--out", out]) == 0
    rep = json.load(open(os.path.join(out, "design_report.json")))
    assert rep["design"]["x_start"] == pytest.approx(0.25, rel=1e-9)
    assert rep["design"]["x_end"] == pytest.approx(0.5, rel=1e-9)


def test_validate_report(tmp_path):
    cfg = write_cfg(tmp_path, LIN_CFG)
    out = str(tmp_path / "out")
    assert main(["validate", "--config", cfg, "--out", out]) == 0
    rep = json.load(open(os.path.join(out, "validate_report.json")))
    assert rep["ok"] is True
    assert rep["band"][0] == pytest.approx(0.09759, abs=1e-4)
    assert rep["band"][1] == pytest.approx(0.49522, abs=1e-4)
    assert rep["unitarity_probe"]["n"] == 129
    assert rep["unitarity_probe"]["max_residual"] < 1e-7
    assert np.isfinite(rep["phi0_resolved"])


def test_config_errors_exit_2(tmp_path):
    out = str(tmp_path / "out")
    bad = write_cfg(tmp_path, {"profil": {}}, "bad.json")
    assert main(["spectrum", "--config", bad, "--out", out]) == 2
    nopump = write_cfg(tmp_path, {"profile": LIN_CFG["profile"]}, "np.json")
    assert main(["spectrum", "--config", nopump, "--out", out]) == 2
    assert main(["spectrum", "--config", str(tmp_path / "missing.json"),
                 "--out", out]) == 2
    good = write_cfg(tmp_path, LIN_CFG)
    assert main(["spectrum", "--config", good, "--solvers", "exact,magic",
                 "--out", out]) == 2
    # argparse rejects the contradictory pump flags itself
    assert main(["spectrum", "--config", good, "--nu", "0.1", "--nu0", "0.2",
                 "--out", out]) == 2
    assert main([]) == 2


def test_infeasible_design_exit_4(tmp_path):
    cfg = write_cfg(tmp_path, {"design": {"length_mm": 4.5,
                                          "band": [0.3, 0.3]}})
    assert main(["design", "--config", cfg, "--out", str(tmp_path / "o")]) == 4


def test_compare_same_and_different_hash(tmp_path, capsys):
    cfg = write_cfg(tmp_path, LIN_CFG)
    out = str(tmp_path / "run")
    assert main(["spectrum", "--config", cfg, "--out", out,
                 "--solvers", "exact,ode"]) == 0
    a = os.path.join(out, "spectrum_exact.csv")
    b = os.path.join(out, "spectrum_ode.csv")
    rout = str(tmp_path / "cmp")
    assert main(["compare", a, b, "--out", rout]) == 0
    rep = json.load(open(os.path.join(rout, "compare_report.json")))
    assert rep["solver_a"] == "exact" and rep["solver_b"] == "ode"
    assert rep["per_column"]["S"]["max_abs_diff"] < 1e-6
    assert rep["per_column"]["kappa"]["max_mod_pi_gap"] < 1e-6

    other = dict(LIN_CFG)
    other["pump"] = {"nu": 0.2}
    cfg2 = write_cfg(tmp_path, other, "run2.json")
    out2 = str(tmp_path / "run2")
    assert main(["spectrum", "--config", cfg2, "--out", out2,
                 "--solvers", "exact"]) == 0
    c = os.path.join(out2, "spectrum_exact.csv")
    capsys.readouterr()
    assert main(["compare", a, c]) == 2
    assert main(["compare", a, c, "--best-effort"]) == 0
    err = capsys.readouterr().err
    assert "config hashes differ" in err
