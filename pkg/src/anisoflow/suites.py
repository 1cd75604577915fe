"""Bundled verification suites over the shipped example configurations.

Each suite builds its problems from the packaged ``configs/*.cfg`` files,
runs the relevant solver paths, and returns certificates.  Negative-control
certificates pass exactly when a deliberately corrupted run *fails* the
corresponding check, guarding the checks themselves against vacuity.
"""

from __future__ import annotations

import math
from dataclasses import replace
from importlib import resources
from typing import List

import numpy as np

from . import cli
from .errors import ConfigError
from .solver import compatibilize, random_smooth_field, run_flow, \
    solve_dirichlet_profile, solve_translator
from .verify import (Certificate, check_gradient_boundary_principle,
                     check_lambda_uniqueness, check_translator_convergence,
                     check_ut_principle, dirichlet_normal_boundary_sup,
                     dirichlet_normal_certificate, gradient_certificate_contact,
                     grim_reaper_oracle, inject_interior_bump, inject_ut_spike)

SUITE_NAMES = ("oracle", "principles", "translator", "dirichlet")


def _shipped(name: str) -> dict:
    text = resources.files("anisoflow").joinpath("configs", name).read_text()
    return cli.parse_config_text(text, source=name)


def _cert(name: str, bound: float, measured: float, constants=None,
          note: str = "") -> Certificate:
    bound = float(bound)
    measured = float(measured)
    return Certificate(name=name, bound=bound, measured=measured,
                       margin=bound - measured, passed=measured <= bound,
                       constants=dict(constants or {}), note=note)


def _control(name: str, check: Certificate, note: str) -> Certificate:
    """A control passes iff the check failed on the corrupted input."""
    return Certificate(name=name, bound=check.bound, measured=check.measured,
                       margin=check.margin, passed=not check.passed,
                       constants=dict(check.constants), note=note)


def _suite_oracle() -> List[Certificate]:
    certs = []
    for tag, theta in (("pi3", math.pi / 3), ("2pi3", 2 * math.pi / 3)):
        orc = grim_reaper_oracle(theta, 1.0)
        certs.append(_cert(f"oracle_shooting_{tag}", 1e-8, orc.abs_err,
                           {"analytic": orc.analytic, "computed": orc.computed},
                           "closed-form speed matches shooting integration"))
    cfg = _shipped("interval_grim.cfg")
    problem = cli.build_problem(cfg)
    scfg = cli.build_solver_config(cfg)
    res = solve_translator(problem, scfg)
    lam_star = (math.pi / 2 - problem.theta_left) / problem.grid.half_length
    certs.append(_cert("interval_speed_error", 0.01 * abs(lam_star),
                       abs(res.lam - lam_star),
                       {"lam": res.lam, "analytic": lam_star},
                       "interval speed within 1% of the analytic value"))
    h = problem.grid.h
    certs.append(_cert("interval_profile_residual",
                       10.0 * (h * h + min(res.eps_schedule)), res.residual,
                       {"h": h}, "profile solves its equation to tolerance"))
    certs.append(_cert("interval_consistency", scfg.lambda_consistency_tol,
                       abs(res.lam - res.lam_direct),
                       {"lam": res.lam, "lam_direct": res.lam_direct},
                       "extrapolated and direct speeds agree"))
    return certs


def _suite_principles() -> List[Certificate]:
    certs = []
    for fname, tag in (("contact_disk.cfg", "disk"), ("contact_ellipse.cfg", "ellipse")):
        cfg = _shipped(fname)
        cfg["solver.t_final"] = "0.3"
        problem = cli.build_problem(cfg)
        scfg = cli.build_solver_config(cfg)
        u0, uc0 = cli.build_initial(cfg, problem)
        u0, uc0, _ = compatibilize(problem, u0, uc0)
        _, traj = run_flow(problem, u0, uc0, scfg)
        certs.append(replace(check_ut_principle(traj),
                             name=f"{tag}_ut_principle"))
        certs.append(replace(check_gradient_boundary_principle(problem, traj),
                             name=f"{tag}_gradient_principle"))
        certs.append(replace(gradient_certificate_contact(problem, traj),
                             name=f"{tag}_gradient_certificate"))
        if tag == "disk":
            bad = check_ut_principle(inject_ut_spike(traj))
            certs.append(_control("control_ut_spike", bad,
                                  "corrupted u_t history must violate the principle"))
            bad = check_gradient_boundary_principle(
                problem, inject_interior_bump(traj, problem))
            certs.append(_control("control_interior_bump", bad,
                                  "interior spike must violate the boundary principle"))
    return certs


def _suite_translator() -> List[Certificate]:
    cfg = _shipped("translator_ellipse.cfg")
    problem = cli.build_problem(cfg)
    scfg = cli.build_solver_config(cfg)
    res = solve_translator(problem, scfg)
    h = problem.grid.h_max
    certs = [
        _cert("translator_residual", 10.0 * (h * h + min(res.eps_schedule)),
              res.residual, {"h_max": h},
              "profile solves its equation to tolerance"),
        _cert("translator_consistency", scfg.lambda_consistency_tol,
              abs(res.lam - res.lam_direct),
              {"lam": res.lam, "lam_direct": res.lam_direct},
              "extrapolated and direct speeds agree"),
    ]
    rng = np.random.default_rng(11)
    u0, uc0 = random_smooth_field(problem.grid, rng, amplitude=0.2)
    u0, uc0, _ = compatibilize(problem, u0, uc0)
    _, traj = run_flow(problem, u0, uc0, replace(scfg, t_final=None))
    lam_extra = float(traj.mean_ut[-1])
    certs.append(replace(
        check_lambda_uniqueness(
            [res.lam, res.lam_direct, lam_extra],
            tol=scfg.lambda_consistency_tol,
            statuses=[res.meta["direct_status"], traj.status]),
        name="translator_uniqueness"))
    return certs


def _suite_dirichlet() -> List[Certificate]:
    cfg = _shipped("dirichlet_ellipse.cfg")
    problem = cli.build_problem(cfg)
    scfg = cli.build_solver_config(cfg)
    check = problem.curvature_check
    certs = [Certificate(
        name="dirichlet_curvature_condition", bound=check.margin, measured=0.0,
        margin=check.margin, passed=check.passed,
        constants={"gamma1": problem.gamma.gamma1, "gamma2": problem.gamma.gamma2,
                   "M": problem.data_bound, "alpha": check.alpha},
        note="weighted boundary curvature margin must be positive")]
    prof = solve_dirichlet_profile(problem, scfg)
    h = problem.grid.h_max
    certs.append(_cert("dirichlet_profile_residual", 10.0 * h * h,
                       prof.residual, {"lam": prof.lam},
                       "pinned profile solves its equation to tolerance"))
    u0, uc0 = cli.build_initial(cfg, problem)
    u0[-1] = problem.f0
    _, traj = run_flow(problem, u0, uc0, scfg)
    certs.append(replace(check_ut_principle(traj), name="dirichlet_ut_principle"))
    certs.append(replace(check_translator_convergence(problem, traj, prof,
                                                      mode="dirichlet"),
                         name="dirichlet_convergence"))
    # post-transient window: certify sup|D_N u| against sup|u_t| on [T/2, T]
    t_half = traj.t[-1] / 2.0
    c3 = float(np.max(traj.sup_ut[traj.t >= t_half]))
    late = [snap for snap in traj.snapshots if snap.t >= t_half]
    dn = dirichlet_normal_boundary_sup(problem, late)
    certs.append(replace(dirichlet_normal_certificate(problem, c3, dn),
                         name="dirichlet_normal_certificate"))
    quarter = max(2, traj.t.size // 4)
    tail = traj.sup_du[-quarter:]
    certs.append(_cert("dirichlet_supdu_plateau", 1e-3,
                       float(np.max(tail) - np.min(tail)),
                       note="sup|Du| settles over the final quarter of the run"))
    return certs


_SUITES = {
    "oracle": _suite_oracle,
    "principles": _suite_principles,
    "translator": _suite_translator,
    "dirichlet": _suite_dirichlet,
}


def run_suite(name: str) -> List[Certificate]:
    if name == "all":
        certs: List[Certificate] = []
        for key in SUITE_NAMES:
            certs.extend(_SUITES[key]())
        return certs
    if name not in _SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from "
                          f"{', '.join(SUITE_NAMES)} or all")
    return _SUITES[name]()
