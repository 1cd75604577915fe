"""Command-line front end.

Subcommands
-----------
``info``
    Print the assumption report and derived constants for a configuration.
``simulate``
    Run a contact-angle (2-D or interval) or prescribed-boundary flow and
    write trajectory/snapshot CSVs plus a run manifest.
``translator``
    Compute the translating-profile speed λ and the profile itself.
``dirichlet``
    Solve the pinned stationary profile, then run the time-dependent flow
    from the configured initial data; the speed is λ = f_rate.
``verify``
    Run the bundled verification suites against the shipped configurations
    and write a certificate table; exits 0 iff every applicable check holds.

Configuration is flat ``key = value`` text.  Any number of config files may
be given; later files and trailing ``key=value`` arguments override earlier
settings.  Unknown keys are rejected.  Exit codes: 0 success, 1 failed
verification, 2 configuration error, 3 assumption violation, 4 blow-up.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from typing import Optional, Sequence

import numpy as np

from ._render import render_snapshot_svg
from .anisotropy import AnisotropySpec, MobilitySpec
from .errors import AssumptionError, BlowUpError, ConfigError, InvalidAnisotropyError
from .geometry import (ContactAngleField, ConvexDomain2D, build_grid,
                       build_interval_grid, grid_rows)
from .solver import (ContactProblem, DirichletProblem, IntervalProblem,
                     SolverConfig, compatibilize, random_smooth_field, run_flow,
                     solve_dirichlet_profile, solve_translator)
from .verify import Certificate

# ---------------------------------------------------------------------------
# configuration parsing

KNOWN_KEYS = {
    "problem.kind": "contact | interval | dirichlet",
    "problem.domain": "disk:R | ellipse:A,B",
    "problem.half_length": "interval half-length",
    "problem.n": "interval cell count",
    "problem.theta": "const:V | sinusoid:MEAN:AMP:FREQ",
    "problem.theta_left": "left endpoint angle (interval)",
    "problem.theta_right": "right endpoint angle (interval)",
    "problem.anisotropy": "isotropic[:SCALE] | ellipsoidal:D,... | interpolated:TAU:D,...",
    "problem.mobility": "constant:C | ellipsoidal:D,... | interpolated:TAU:D,...",
    "problem.f0": "const:V | sinusoid:AMP:FREQ (boundary data)",
    "problem.f_rate": "boundary data drift rate",
    "problem.u0": "zero | random:AMP",
    "solver.nr": "radial rings",
    "solver.nphi": "angular columns",
    "solver.sigma": "CFL safety factor in (0, 1)",
    "solver.t_final": "time horizon (omit to run until steady)",
    "solver.steady_tol": "steady-state tolerance on std u_t",
    "solver.steady_window": "consecutive quiet samples required",
    "solver.sample_every": "steps between trajectory samples",
    "solver.max_steps": "hard step budget",
    "solver.compat_tol": "initial-data compatibility tolerance",
    "solver.eps_schedule": "regularization sequence, comma separated",
    "solver.relax_tol": "relaxation stopping tolerance",
    "solver.lambda_tol": "speed consistency tolerance",
    "solver.seed": "random seed for generated initial data",
    "output.dir": "output directory",
    "output.snapshot_times": "comma-separated snapshot times",
    "output.render": "1 to write SVG renders of snapshots",
}


def parse_config_text(text: str, source: str = "<args>") -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(
                f"{source}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        out[key] = value
    return out


def load_config(paths: Sequence[str], overrides: Sequence[str] = ()) -> dict:
    cfg: dict = {}
    for path in paths:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
        cfg.update(parse_config_text(text, source=path))
    for item in overrides:
        cfg.update(parse_config_text(item, source="<args>"))
    return cfg


def _float(cfg: dict, key: str, default: Optional[float] = None) -> Optional[float]:
    if key not in cfg:
        return default
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {cfg[key]!r}") from exc


def _int(cfg: dict, key: str, default: Optional[int] = None) -> Optional[int]:
    if key not in cfg:
        return default
    try:
        return int(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {cfg[key]!r}") from exc


def _float_list(text: str, key: str) -> tuple:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {text!r}") from exc


# ---------------------------------------------------------------------------
# object builders

def _build_domain(spec: str) -> ConvexDomain2D:
    parts = spec.split(":")
    if parts[0] == "disk" and len(parts) == 2:
        return ConvexDomain2D.disk(float(parts[1]))
    if parts[0] == "ellipse" and len(parts) == 2:
        ab = _float_list(parts[1], "problem.domain")
        if len(ab) == 2:
            return ConvexDomain2D.ellipse(ab[0], ab[1])
    raise ConfigError(f"problem.domain: expected disk:R or ellipse:A,B, got {spec!r}")


def _build_theta(spec: str, length: float) -> ContactAngleField:
    parts = spec.split(":")
    if parts[0] == "const" and len(parts) == 2:
        return ContactAngleField.constant(float(parts[1]))
    if parts[0] == "sinusoid" and len(parts) == 4:
        return ContactAngleField.sinusoid(float(parts[1]), float(parts[2]),
                                          int(parts[3]), length)
    raise ConfigError(
        f"problem.theta: expected const:V or sinusoid:MEAN:AMP:FREQ, got {spec!r}")


def _build_energy(spec: str, dim: int) -> AnisotropySpec:
    parts = spec.split(":")
    if parts[0] == "isotropic" and len(parts) <= 2:
        scale = float(parts[1]) if len(parts) == 2 else 1.0
        return AnisotropySpec.isotropic(dim, scale=scale)
    if parts[0] == "ellipsoidal" and len(parts) == 2:
        diag = _float_list(parts[1], "problem.anisotropy")
        if len(diag) == dim + 1:
            return AnisotropySpec.ellipsoidal(np.diag(diag), dim=dim)
    if parts[0] == "interpolated" and len(parts) == 3:
        diag = _float_list(parts[2], "problem.anisotropy")
        if len(diag) == dim + 1:
            return AnisotropySpec.interpolated(float(parts[1]), np.diag(diag), dim=dim)
    raise ConfigError(
        f"problem.anisotropy: expected isotropic[:SCALE], ellipsoidal:D0,..,D{dim} "
        f"or interpolated:TAU:D0,..,D{dim}, got {spec!r}")


def _build_mobility(spec: str, dim: int) -> MobilitySpec:
    parts = spec.split(":")
    if parts[0] == "constant" and len(parts) == 2:
        return MobilitySpec.constant(dim, float(parts[1]))
    if parts[0] == "ellipsoidal" and len(parts) == 2:
        diag = _float_list(parts[1], "problem.mobility")
        if len(diag) == dim + 1:
            return MobilitySpec.ellipsoidal(np.diag(diag), dim=dim)
    if parts[0] == "interpolated" and len(parts) == 3:
        diag = _float_list(parts[2], "problem.mobility")
        if len(diag) == dim + 1:
            return MobilitySpec.interpolated(float(parts[1]), np.diag(diag), dim=dim)
    raise ConfigError(
        f"problem.mobility: expected constant:C, ellipsoidal:D0,..,D{dim} "
        f"or interpolated:TAU:D0,..,D{dim}, got {spec!r}")


def _build_f0(spec: str, grid) -> np.ndarray:
    parts = spec.split(":")
    if parts[0] == "const" and len(parts) == 2:
        return np.full(grid.n_phi, float(parts[1]))
    if parts[0] == "sinusoid" and len(parts) == 3:
        amp, freq = float(parts[1]), int(parts[2])
        return amp * np.sin(freq * 2.0 * math.pi * grid.s_boundary
                            / grid.domain.length)
    raise ConfigError(f"problem.f0: expected const:V or sinusoid:AMP:FREQ, got {spec!r}")


def build_problem(cfg: dict):
    """Assemble the problem bundle named by the ``problem.*`` keys."""
    kind = cfg.get("problem.kind", "contact")
    if kind == "interval":
        grid = build_interval_grid(_float(cfg, "problem.half_length", 1.0),
                                   _int(cfg, "problem.n", 200))
        F = _build_energy(cfg.get("problem.anisotropy", "isotropic"), dim=1)
        G = _build_mobility(cfg.get("problem.mobility", "constant:1.0"), dim=1)
        return IntervalProblem(grid, F, G,
                               _float(cfg, "problem.theta_left", math.pi / 2),
                               _float(cfg, "problem.theta_right", math.pi / 2))
    if kind in ("contact", "dirichlet"):
        domain = _build_domain(cfg.get("problem.domain", "disk:1.0"))
        grid = build_grid(domain, _int(cfg, "solver.nr", 16),
                          _int(cfg, "solver.nphi", 32))
        F = _build_energy(cfg.get("problem.anisotropy", "isotropic"), dim=2)
        G = _build_mobility(cfg.get("problem.mobility", "constant:1.0"), dim=2)
        if kind == "contact":
            angles = _build_theta(cfg.get("problem.theta", "const:1.5707963267948966"),
                                  domain.length)
            return ContactProblem(grid, F, G, angles)
        f0 = _build_f0(cfg.get("problem.f0", "const:0.0"), grid)
        return DirichletProblem(grid, F, G, f0, _float(cfg, "problem.f_rate", 0.0))
    raise ConfigError(
        f"problem.kind: expected contact, interval or dirichlet, got {kind!r}")


_SOLVER_KEYS = (
    ("solver.sigma", "sigma", _float),
    ("solver.t_final", "t_final", _float),
    ("solver.steady_tol", "steady_tol", _float),
    ("solver.steady_window", "steady_window", _int),
    ("solver.sample_every", "sample_every", _int),
    ("solver.max_steps", "max_steps", _int),
    ("solver.compat_tol", "compat_tol", _float),
    ("solver.relax_tol", "relax_tol", _float),
    ("solver.lambda_tol", "lambda_consistency_tol", _float),
)


def build_solver_config(cfg: dict) -> SolverConfig:
    kw = {}
    for key, field_name, coerce in _SOLVER_KEYS:
        if key in cfg:
            kw[field_name] = coerce(cfg, key)
    if "solver.eps_schedule" in cfg:
        kw["eps_schedule"] = _float_list(cfg["solver.eps_schedule"],
                                         "solver.eps_schedule")
    if "output.snapshot_times" in cfg:
        kw["snapshot_times"] = _float_list(cfg["output.snapshot_times"],
                                           "output.snapshot_times")
    return SolverConfig(**kw).validated()


def build_initial(cfg: dict, problem) -> tuple:
    """Initial data from ``problem.u0``: (u0, uc0), uc0 = None in 1-D."""
    spec = cfg.get("problem.u0", "zero")
    one_d = isinstance(problem, IntervalProblem)
    if spec == "zero":
        if one_d:
            return np.zeros(problem.grid.n_nodes), None
        return np.zeros((problem.grid.n_r, problem.grid.n_phi)), 0.0
    parts = spec.split(":")
    if parts[0] == "random" and len(parts) <= 2:
        amp = float(parts[1]) if len(parts) == 2 else 0.2
        rng = np.random.default_rng(_int(cfg, "solver.seed", 0))
        if one_d:
            return random_smooth_field(problem.grid, rng, amplitude=amp), None
        return random_smooth_field(problem.grid, rng, amplitude=amp)
    raise ConfigError(f"problem.u0: expected zero or random:AMP, got {spec!r}")


# ---------------------------------------------------------------------------
# output writers

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_manifest(path: str, cfg: dict, results: Sequence[tuple]) -> None:
    """Atomically write the manifest: the configuration echoed verbatim
    (sufficient to re-run), then result scalars."""
    lines = ["# run manifest", "# section: config"]
    lines += [f"{key} = {cfg[key]}" for key in sorted(cfg)]
    lines.append("# section: results")
    lines += [f"{key} = {_fmt(value)}" for key, value in results]
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_manifest_config(path: str) -> dict:
    """Recover the echoed configuration block from a manifest."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    block, active = [], False
    for line in lines:
        if line.strip() == "# section: config":
            active = True
        elif line.startswith("# section:"):
            active = False
        elif active:
            block.append(line)
    return parse_config_text("\n".join(block), source=path)


def write_snapshot_csv(path: str, grid, u: np.ndarray, u_center: float) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("r,phi,x,y,u\n")
        for row in grid_rows(grid, u, u_center):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_interval_csv(path: str, grid, u: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,u\n")
        for x, v in zip(grid.x, u):
            fh.write(f"{float(x)!r},{float(v)!r}\n")


def write_certificates_csv(path: str, certs: Sequence[Certificate]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("name,applicable,passed,bound,measured,margin,note\n")
        for c in certs:
            fh.write(f"{c.name},{_fmt(c.applicable)},{_fmt(c.passed)},"
                     f"{c.bound!r},{c.measured!r},{c.margin!r},"
                     f"{c.note.replace(',', ';')}\n")


def _prepare_outdir(cfg: dict, default: str) -> str:
    outdir = cfg.get("output.dir", default)
    os.makedirs(outdir, exist_ok=True)
    return outdir


def _emit_flow_outputs(outdir: str, problem, traj) -> list:
    """Write trajectory/snapshot files; returns manifest result items."""
    results = []
    traj.write_csv(os.path.join(outdir, "trajectory.csv"))
    results.append(("trajectory_file", "trajectory.csv"))
    one_d = isinstance(problem, IntervalProblem)
    render = not one_d and traj.meta.get("render", False)
    for k, snap in enumerate(traj.snapshots):
        name = f"snapshot_{k:03d}.csv"
        path = os.path.join(outdir, name)
        if one_d:
            write_interval_csv(path, problem.grid, snap.u)
        else:
            write_snapshot_csv(path, problem.grid, snap.u, snap.u_center)
        results.append((f"snapshot_{k:03d}_t", snap.t))
        if render:
            render_snapshot_svg(os.path.join(outdir, f"snapshot_{k:03d}.svg"),
                                problem.grid, snap.u, snap.u_center,
                                title=f"t = {snap.t:.6g}")
    results.append(("n_snapshots", len(traj.snapshots)))
    return results


# ---------------------------------------------------------------------------
# subcommands

def _problem_report(problem) -> list:
    items = [("kind", {ContactProblem: "contact", IntervalProblem: "interval",
                       DirichletProblem: "dirichlet"}[type(problem)])]
    if isinstance(problem, IntervalProblem):
        g = problem.grid
        items += [("n_nodes", g.n_nodes), ("h", g.h),
                  ("theta_left", problem.theta_left),
                  ("theta_right", problem.theta_right)]
    else:
        g = problem.grid
        items += [("n_nodes", g.n_nodes), ("h_min", g.h_min), ("h_max", g.h_max),
                  ("boundary_length", g.domain.length)]
    items += list(problem.bounds.manifest_items())
    items.append(("a3_margin", problem.bounds.a3_margin))
    if isinstance(problem, ContactProblem):
        rep = problem.angle_report
        items += [("delta0", rep.delta0), ("theta0", rep.theta0),
                  ("theta_min", rep.theta_min), ("theta_max", rep.theta_max),
                  ("a2_ok", rep.passed)]
    if isinstance(problem, DirichletProblem):
        check = problem.curvature_check
        items += [("data_bound", problem.data_bound),
                  ("gamma1", problem.gamma.gamma1),
                  ("gamma2", problem.gamma.gamma2),
                  ("curvature_margin", check.margin),
                  ("curvature_ok", check.passed)]
    return items


def cmd_info(cfg: dict) -> int:
    problem = build_problem(cfg)
    items = _problem_report(problem)
    for key, value in items:
        print(f"{key} = {_fmt(value)}")
    if "output.dir" in cfg:
        outdir = _prepare_outdir(cfg, ".")
        write_manifest(os.path.join(outdir, "manifest.txt"), cfg, items)
    problem.validate()
    return 0


def cmd_simulate(cfg: dict) -> int:
    problem = build_problem(cfg)
    scfg = build_solver_config(cfg)
    u0, uc0 = build_initial(cfg, problem)
    if isinstance(problem, DirichletProblem):
        u0[-1] = problem.f0
    else:
        u0, uc0, _ = compatibilize(problem, u0, uc0)
    start = time.perf_counter()
    _, traj = run_flow(problem, u0, uc0, scfg)
    wall = time.perf_counter() - start
    if cfg.get("output.render") == "1":
        traj.meta["render"] = True
    outdir = _prepare_outdir(cfg, "out_simulate")
    results = _emit_flow_outputs(outdir, problem, traj)
    results += [("status", traj.status), ("t_end", traj.t[-1]),
                ("steps", traj.steps), ("sup_du_end", traj.sup_du[-1]),
                ("sup_ut_end", traj.sup_ut[-1]), ("osc_end", traj.osc[-1]),
                ("mean_ut_end", traj.mean_ut[-1]), ("wall_s", wall)]
    write_manifest(os.path.join(outdir, "manifest.txt"), cfg, results)
    print(f"status = {traj.status}")
    print(f"t_end = {float(traj.t[-1])!r}")
    print(f"steps = {traj.steps}")
    print(f"mean_ut_end = {float(traj.mean_ut[-1])!r}")
    print(f"outputs in {outdir}")
    return 0


def cmd_translator(cfg: dict) -> int:
    problem = build_problem(cfg)
    if isinstance(problem, DirichletProblem):
        raise ConfigError("translator needs problem.kind = contact or interval")
    scfg = build_solver_config(cfg)
    start = time.perf_counter()
    res = solve_translator(problem, scfg)
    wall = time.perf_counter() - start
    outdir = _prepare_outdir(cfg, "out_translator")
    if isinstance(problem, IntervalProblem):
        write_interval_csv(os.path.join(outdir, "profile.csv"), problem.grid, res.w)
    else:
        write_snapshot_csv(os.path.join(outdir, "profile.csv"), problem.grid,
                           res.w, res.w_center)
    results = [("profile_file", "profile.csv"), ("lam", res.lam),
               ("lam_richardson", res.lam_richardson),
               ("lam_direct", res.lam_direct), ("residual", res.residual),
               ("flagged", res.flagged)]
    for k, (eps, q) in enumerate(zip(res.eps_schedule, res.eps_center_estimates)):
        results.append((f"eps_{k}", eps))
        results.append((f"eps_{k}_estimate", q))
    results.append(("wall_s", wall))
    write_manifest(os.path.join(outdir, "manifest.txt"), cfg, results)
    print(f"lam = {float(res.lam)!r}")
    print(f"lam_direct = {float(res.lam_direct)!r}")
    print(f"residual = {float(res.residual)!r}")
    print(f"flagged = {_fmt(res.flagged)}")
    print(f"outputs in {outdir}")
    return 0


def cmd_dirichlet(cfg: dict) -> int:
    problem = build_problem(cfg)
    if not isinstance(problem, DirichletProblem):
        raise ConfigError("dirichlet needs problem.kind = dirichlet")
    scfg = build_solver_config(cfg)
    start = time.perf_counter()
    prof = solve_dirichlet_profile(problem, scfg)
    u0, uc0 = build_initial(cfg, problem)
    u0[-1] = problem.f0
    _, traj = run_flow(problem, u0, uc0, scfg)
    wall = time.perf_counter() - start
    if cfg.get("output.render") == "1":
        traj.meta["render"] = True
    outdir = _prepare_outdir(cfg, "out_dirichlet")
    write_snapshot_csv(os.path.join(outdir, "profile.csv"), problem.grid,
                       prof.w, prof.w_center)
    results = [("profile_file", "profile.csv"), ("lam", prof.lam),
               ("profile_residual", prof.residual)]
    results += _emit_flow_outputs(outdir, problem, traj)
    results += [("status", traj.status), ("t_end", traj.t[-1]),
                ("steps", traj.steps), ("sup_du_end", traj.sup_du[-1]),
                ("osc_end", traj.osc[-1]), ("wall_s", wall)]
    write_manifest(os.path.join(outdir, "manifest.txt"), cfg, results)
    print(f"lam = {float(prof.lam)!r}")
    print(f"profile_residual = {float(prof.residual)!r}")
    print(f"status = {traj.status}")
    print(f"outputs in {outdir}")
    return 0


def cmd_verify(cfg: dict, suite: str) -> int:
    from . import suites

    start = time.perf_counter()
    certs = suites.run_suite(suite)
    wall = time.perf_counter() - start
    outdir = _prepare_outdir(cfg, f"out_verify_{suite}")
    write_certificates_csv(os.path.join(outdir, "certificates.csv"), certs)
    results = [(c.name, "pass" if c.passed else
                ("skip" if not c.applicable else "FAIL")) for c in certs]
    n_fail = sum(1 for c in certs if c.applicable and not c.passed)
    results += [("n_certificates", len(certs)), ("n_failed", n_fail),
                ("wall_s", wall)]
    write_manifest(os.path.join(outdir, "manifest.txt"), cfg, results)
    for c in certs:
        tag = "PASS" if c.passed else ("SKIP" if not c.applicable else "FAIL")
        print(f"[{tag}] {c.name}: measured {c.measured:.6g} vs bound {c.bound:.6g}"
              + (f"  ({c.note})" if c.note else ""))
    print(f"{len(certs) - n_fail}/{len(certs)} certificates passed; "
          f"outputs in {outdir}")
    return 0 if n_fail == 0 else 1


# ---------------------------------------------------------------------------
# argument handling

def _split_sources(args: Sequence[str]) -> tuple:
    paths = [a for a in args if "=" not in a]
    overrides = [a for a in args if "=" in a]
    return paths, overrides


def _apply_flags(cfg: dict, ns: argparse.Namespace) -> None:
    if getattr(ns, "out", None):
        cfg["output.dir"] = ns.out
    if getattr(ns, "resolution", None):
        toks = ns.resolution.split(",")
        if len(toks) == 2:
            cfg["solver.nr"], cfg["solver.nphi"] = toks[0], toks[1]
        elif len(toks) == 1:
            cfg["problem.n"] = toks[0]
        else:
            raise ConfigError(f"--resolution: expected NR,NPHI or N, got {ns.resolution!r}")
    if getattr(ns, "eps_schedule", None):
        cfg["solver.eps_schedule"] = ns.eps_schedule
    if getattr(ns, "seed", None) is not None:
        cfg["solver.seed"] = str(ns.seed)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anisoflow",
        description="Anisotropic graph flows with contact-angle or prescribed "
                    "boundary conditions: simulation, translating-profile "
                    "speeds, and a-priori-estimate certificates.")
    sub = parser.add_subparsers(dest="command", required=True)
    keys_help = "config sources: files and/or key=value overrides"
    for name, doc in (("info", "print assumption checks and derived constants"),
                      ("simulate", "run a flow and write CSV outputs"),
                      ("translator", "compute the translating-profile speed"),
                      ("dirichlet", "solve profile + flow for pinned data"),
                      ("verify", "run bundled verification suites")):
        p = sub.add_parser(name, help=doc)
        p.add_argument("config", nargs="*", help=keys_help)
        p.add_argument("--out", help="output directory")
        p.add_argument("--resolution", help="NR,NPHI (2-D) or N (interval)")
        p.add_argument("--eps-schedule", dest="eps_schedule",
                       help="comma-separated regularization sequence")
        p.add_argument("--seed", type=int, help="random seed for initial data")
        if name == "verify":
            p.add_argument("--suite", default="all",
                           choices=("oracle", "principles", "translator",
                                    "dirichlet", "all"))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        paths, overrides = _split_sources(ns.config)
        cfg = load_config(paths, overrides)
        _apply_flags(cfg, ns)
        if ns.command == "info":
            return cmd_info(cfg)
        if ns.command == "simulate":
            return cmd_simulate(cfg)
        if ns.command == "translator":
            return cmd_translator(cfg)
        if ns.command == "dirichlet":
            return cmd_dirichlet(cfg)
        return cmd_verify(cfg, ns.suite)
    except (ConfigError, InvalidAnisotropyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AssumptionError as exc:
        print(f"assumption violated: {exc}", file=sys.stderr)
        return 3
    except BlowUpError as exc:
        print(f"blow-up detected: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
