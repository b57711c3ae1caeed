import json
import math
import os
import subprocess

import mpmath
import pytest

import blowup_lab as lab


def test_rgamma_matches_mpmath():
    for z in (0.5, 3.25, complex(1.5, 2.0), complex(-2.5, 0.75)):
        expected = complex(mpmath.rgamma(z))
        assert abs(lab.rgamma(z) - expected) <= 1e-13 * max(1.0, abs(expected))


def test_rgamma_vanishes_at_poles():
    for n in range(0, 6):
        assert lab.rgamma(-n) == 0


def test_hyp2f1_matches_mpmath():
    for a, b, c, z in ((1.25, 1.75, 2.5, 0.3), (0.5, 2.0, 3.5, 0.85), (0.3, 1.1, 2.2, -0.8)):
        expected = complex(mpmath.hyp2f1(a, b, c, z))
        assert abs(lab.hyp2f1(a, b, c, z) - expected) <= 1e-12 * abs(expected)


def test_indicator_vanishes_only_at_symmetry_modes():
    assert abs(lab.mode_indicator(1.0, 0)) < 1e-14
    assert abs(lab.mode_indicator(0.0, 1)) < 1e-14
    assert abs(lab.mode_indicator(0.5, 0)) > 1e-3
    assert abs(lab.mode_indicator(1.0, 1)) > 1e-3


def test_multiplicity_solution_solves_ode():
    h = 1e-4
    for rho in (0.2, 0.5, 0.8):
        u = lab.multiplicity_solution(rho, 0.0, 0)
        du = lab.multiplicity_solution(rho, 0.0, 1)
        d2u = lab.multiplicity_solution(rho, 0.0, 2)
        assert d2u + 4 * du / rho - 4 * u / rho**2 + rho / (1 - rho**2) == pytest.approx(0.0, abs=1e-10)
        fd = (lab.multiplicity_solution(rho + h, 0.0, 0) - lab.multiplicity_solution(rho - h, 0.0, 0)) / (2 * h)
        assert fd == pytest.approx(du, rel=1e-6)


def test_run_rejects_unknown_key(tmp_path):
    with pytest.raises(lab.ConfigError):
        lab.run("wronskian", {"no_such_key": "1"}, str(tmp_path))


def test_run_wronskian(tmp_path):
    m = lab.run("wronskian", {"lmax": "3"}, str(tmp_path))
    assert m["passed"]
    assert "wronskian.csv" in m["artifacts"]
    with open(tmp_path / "wronskian.csv") as f:
        assert f.readline().strip() == "# blowup-lab wronskian v1"


def test_cli_exit_codes(tmp_path):
    cli = os.environ.get("BLOWUP_LAB_CLI")
    if not cli:
        pytest.skip("BLOWUP_LAB_CLI not set")
    ok = subprocess.run([cli, "ode-check", "--out", str(tmp_path / "ok")], capture_output=True, text=True)
    assert ok.returncode == 0, ok.stdout + ok.stderr
    manifest = json.loads((tmp_path / "ok" / "manifest.json").read_text())
    assert manifest["passed"] and manifest["subcommand"] == "ode-check"
    bad_cfg = tmp_path / "bad.cfg"
    bad_cfg.write_text("samples = many\n")
    bad = subprocess.run([cli, "ode-check", "--config", str(bad_cfg), "--out", str(tmp_path / "bad")],
                         capture_output=True, text=True)
    assert bad.returncode == 2
    assert "samples" in bad.stderr
    assert not math.isnan(manifest["wall_time_s"])
