"""Command line front end: config parsing, builders, output files, manifest
round trips, determinism, and exit codes."""

import math
import os

import numpy as np
import pytest

from anisoflow.cli import (
    _build_domain,
    _build_energy,
    _build_mobility,
    _build_theta,
    build_initial,
    build_problem,
    build_solver_config,
    load_config,
    main,
    parse_config_text,
    read_manifest_config,
)
from anisoflow.errors import AssumptionError, ConfigError
from anisoflow.solver import ContactProblem, IntervalProblem
from anisoflow.verify import Certificate

FAST_CONTACT = """\
problem.kind = contact          # flat keys, # starts a comment
problem.domain = disk:1.0
problem.u0 = random:0.2
solver.nr = 10
solver.nphi = 20
solver.seed = 7
solver.t_final = 0.05
output.snapshot_times = 0.0,0.025,0.05
"""


def _write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------------------
# parsing

def test_parse_config_comments_and_whitespace():
    cfg = parse_config_text(
        "# header\n\n  problem.kind = contact  # inline\nsolver.nr=12\n")
    assert cfg == {"problem.kind": "contact", "solver.nr": "12"}


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ConfigError, match=r"run\.cfg:3: unknown key"):
        parse_config_text("problem.kind = contact\n\nbogus.key = 1\n",
                          source="run.cfg")


def test_parse_config_rejects_empty_value_and_bad_line():
    with pytest.raises(ConfigError, match="empty value"):
        parse_config_text("solver.nr =\n")
    with pytest.raises(ConfigError, match="expected key = value"):
        parse_config_text("just words\n")


def test_load_config_merges_files_then_overrides(tmp_path):
    path = _write_cfg(tmp_path, FAST_CONTACT)
    cfg = load_config([path], ["solver.nr=14", "solver.seed=9"])
    assert cfg["solver.nr"] == "14"
    assert cfg["solver.seed"] == "9"
    assert cfg["problem.domain"] == "disk:1.0"
    with pytest.raises(ConfigError, match="cannot read config file"):
        load_config([str(tmp_path / "missing.cfg")])


# ---------------------------------------------------------------------------
# builders

def test_build_domain_and_theta_specs():
    assert _build_domain("ellipse:1.3,0.9").k0 > 0
    theta = _build_theta("sinusoid:1.5:0.2:2", 6.0)
    assert float(theta.theta(0.0)) == pytest.approx(1.5)
    assert float(theta.theta(6.0)) == pytest.approx(1.5)  # periodic over length
    for bad in ("square:1", "disk", "ellipse:1.0"):
        with pytest.raises(ConfigError):
            _build_domain(bad)
    with pytest.raises(ConfigError):
        _build_theta("linear:1.0", 6.0)


def test_build_energy_and_mobility_specs():
    F = _build_energy("interpolated:0.1:1.0,1.0,4.0", dim=2)
    assert F.dim == 2
    assert _build_energy("isotropic:2.0", dim=1).dim == 1
    for bad in ("ellipsoidal:1.0,4.0", "isotropic:1:2", "weird:1"):
        with pytest.raises(ConfigError):
            _build_energy(bad, dim=2)
    with pytest.raises(ConfigError):
        _build_mobility("constant", dim=2)


def test_build_problem_defaults_to_unit_disk_contact():
    problem = build_problem({})
    assert isinstance(problem, ContactProblem)
    assert problem.grid.n_r == 16 and problem.grid.n_phi == 32
    with pytest.raises(ConfigError, match="problem.kind"):
        build_problem({"problem.kind": "banana"})


def test_build_solver_config_coerces_strings():
    scfg = build_solver_config({"solver.sigma": "0.3", "solver.max_steps": "50",
                                "solver.eps_schedule": "0.1,0.01"})
    assert scfg.sigma == 0.3
    assert scfg.max_steps == 50
    assert scfg.eps_schedule == (0.1, 0.01)
    with pytest.raises(ConfigError, match="expected a number"):
        build_solver_config({"solver.sigma": "fast"})
    with pytest.raises(AssumptionError):
        build_solver_config({"solver.sigma": "1.5"})


def test_build_initial_shapes_and_seeding():
    problem = build_problem({"solver.nr": "10", "solver.nphi": "20"})
    u_a, uc_a = build_initial({"problem.u0": "random:0.2", "solver.seed": "3"},
                              problem)
    u_b, _ = build_initial({"problem.u0": "random:0.2", "solver.seed": "3"},
                           problem)
    assert u_a.shape == (10, 20)
    assert np.array_equal(u_a, u_b)       # same seed, same field
    u0, uc0 = build_initial({}, problem)
    assert not u0.any() and uc0 == 0.0
    interval = build_problem({"problem.kind": "interval", "problem.n": "16"})
    assert isinstance(interval, IntervalProblem)
    u1, uc1 = build_initial({}, interval)
    assert u1.shape == (17,) and uc1 is None
    with pytest.raises(ConfigError):
        build_initial({"problem.u0": "spiky"}, problem)


# ---------------------------------------------------------------------------
# simulate: files, determinism, manifest round trip

def test_simulate_outputs_and_determinism(tmp_path):
    path = _write_cfg(tmp_path, FAST_CONTACT)
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["simulate", path, "--out", out1]) == 0
    assert main(["simulate", path, "--out", out2]) == 0

    traj = open(os.path.join(out1, "trajectory.csv"), "rb").read()
    assert traj.splitlines()[0] == b"t,sup_du,sup_ut,osc,mean_ut"
    assert traj == open(os.path.join(out2, "trajectory.csv"), "rb").read()

    snaps = sorted(f for f in os.listdir(out1) if f.startswith("snapshot_"))
    assert snaps == ["snapshot_000.csv", "snapshot_001.csv", "snapshot_002.csv"]
    first = open(os.path.join(out1, snaps[0]), "r", encoding="utf-8").read()
    assert first.splitlines()[0] == "r,phi,x,y,u"
    assert first == open(os.path.join(out2, snaps[0]), encoding="utf-8").read()

    round_trip = read_manifest_config(os.path.join(out1, "manifest.txt"))
    expected = load_config([path])
    expected["output.dir"] = out1
    assert round_trip == expected


def test_simulate_resolution_flag_overrides_grid(tmp_path):
    path = _write_cfg(tmp_path, FAST_CONTACT)
    out = str(tmp_path / "res")
    assert main(["simulate", path, "--resolution", "12,24", "--out", out]) == 0
    cfg = read_manifest_config(os.path.join(out, "manifest.txt"))
    assert cfg["solver.nr"] == "12" and cfg["solver.nphi"] == "24"


def test_manifest_reruns_identically(tmp_path):
    path = _write_cfg(tmp_path, FAST_CONTACT)
    out1 = str(tmp_path / "orig")
    assert main(["simulate", path, "--out", out1]) == 0
    cfg = read_manifest_config(os.path.join(out1, "manifest.txt"))
    out2 = str(tmp_path / "rerun")
    args = ["simulate"] + [f"{k}={v}" for k, v in cfg.items()
                           if k != "output.dir"] + ["--out", out2]
    assert main(args) == 0
    assert open(os.path.join(out1, "trajectory.csv"), "rb").read() == \
        open(os.path.join(out2, "trajectory.csv"), "rb").read()


# ---------------------------------------------------------------------------
# translator and verify subcommands

def test_translator_interval_reports_speed(tmp_path):
    out = str(tmp_path / "tr")
    args = ["translator", "problem.kind=interval", "problem.half_length=1.0",
            "problem.n=100", "problem.theta_left=1.0471975511965976",
            "problem.theta_right=1.0471975511965976",
            "solver.eps_schedule=0.1,0.03,0.01", "--out", out]
    assert main(args) == 0
    manifest = open(os.path.join(out, "manifest.txt"), encoding="utf-8").read()
    lam = next(float(line.split("=")[1]) for line in manifest.splitlines()
               if line.startswith("lam = "))
    assert lam == pytest.approx(math.pi / 6, abs=1e-3)
    profile = open(os.path.join(out, "profile.csv"), encoding="utf-8").read()
    assert profile.splitlines()[0] == "x,u"
    assert len(profile.splitlines()) == 102   # header + 101 nodes


def test_translator_rejects_pinned_boundary(tmp_path, capsys):
    rc = main(["translator", "problem.kind=dirichlet",
               "--out", str(tmp_path / "x")])
    assert rc == 2
    assert "contact or interval" in capsys.readouterr().err


def test_verify_oracle_suite_passes(tmp_path, capsys):
    out = str(tmp_path / "ver")
    assert main(["verify", "--suite", "oracle", "--out", out]) == 0
    stdout = capsys.readouterr().out
    assert "[PASS]" in stdout and "[FAIL]" not in stdout
    certs = open(os.path.join(out, "certificates.csv"), encoding="utf-8").read()
    lines = certs.splitlines()
    assert lines[0] == "name,applicable,passed,bound,measured,margin,note"
    assert len(lines) > 1 and all(",true," in ln for ln in lines[1:])


def test_verify_reports_failures_with_exit_one(tmp_path, capsys, monkeypatch):
    import anisoflow.suites as suites

    def fake(_suite):
        return [Certificate(name="synthetic", bound=1.0, measured=2.0,
                            margin=-1.0, passed=False)]

    monkeypatch.setattr(suites, "run_suite", fake)
    rc = main(["verify", "--suite", "oracle", "--out", str(tmp_path / "v")])
    assert rc == 1
    assert "[FAIL] synthetic" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# exit codes

def test_exit_code_two_on_config_errors(tmp_path, capsys):
    assert main(["simulate", "bogus.key=1"]) == 2
    assert "unknown key" in capsys.readouterr().err
    assert main(["simulate", str(tmp_path / "no_such.cfg")]) == 2


def test_exit_code_three_on_assumption_violation(capsys):
    rc = main(["info", "problem.theta=sinusoid:1.5707963267948966:1.8:1"])
    assert rc == 3
    assert capsys.readouterr().err != ""


def test_info_prints_constant_report(capsys):
    assert main(["info", "problem.domain=ellipse:1.3,0.9",
                 "problem.anisotropy=interpolated:0.1:1.0,1.0,4.0"]) == 0
    out = capsys.readouterr().out
    for key in ("m0 =", "M0 =", "m1 =", "m2 =", "a3_margin =", "delta0 ="):
        assert key in out
