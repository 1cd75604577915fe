"""Time-stepping drivers around the jitted kernels.

`run_flow` advances a contact-angle, interval, or pinned-boundary problem to a
fixed horizon or until steady translation; `advance` performs a single explicit
step through the vectorized reference operator; `compatibilize` adjusts initial
data in a boundary collar so the one-sided normal slope matches the
contact-angle condition.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np

from ..errors import AssumptionError, BlowUpError, ConfigError
from . import kernels
from .config import (
    ContactProblem,
    DirichletProblem,
    FlowState,
    IntervalProblem,
    Snapshot,
    SolverConfig,
    Trajectory,
)
from .operator import contact_residual, operator_fields, operator_fields_1d

_SAMPLE_BUFFER = 250_000
_NEVER = 2 ** 62

STATUS_NAMES = {
    kernels.STATUS_TIME: "time",
    kernels.STATUS_STEADY: "steady",
    kernels.STATUS_MAXSTEPS: "max_steps",
    kernels.STATUS_BLOWUP: "blow_up",
    kernels.STATUS_BUFFER_FULL: "buffer_full",
}


def _lam_floor(problem) -> float:
    b = problem.bounds
    return 0.5 * b.m0 * b.g0


def _smoothstep(x: np.ndarray) -> np.ndarray:
    """C² quintic ramp: 0 for x ≤ 0, 1 for x ≥ 1."""
    x = np.clip(x, 0.0, 1.0)
    return x ** 3 * (10.0 - 15.0 * x + 6.0 * x * x)


class _SampleLog:
    def __init__(self):
        self.chunks = []
        self.buf = tuple(np.empty(_SAMPLE_BUFFER) for _ in range(6))

    def absorb(self, n: int) -> None:
        if n > 0:
            self.chunks.append(tuple(b[:n].copy() for b in self.buf))

    def arrays(self):
        if not self.chunks:
            return tuple(np.empty(0) for _ in range(6))
        return tuple(np.concatenate([c[k] for c in self.chunks])
                     for k in range(6))


def _drive_2d(grid, F, G, *, mode: int, cfg: SolverConfig, u0, uc0: float,
              cot_b=None, f0=None, f_rate: float = 0.0, lam_pre: float = 0.0,
              eps: float = 0.0, lam_floor: float, t0: float = 0.0,
              t_final: Optional[float] = None, snapshot_times=(),
              relax_stop: float = 0.0,
              steady_when_flat: bool = False) -> Tuple[FlowState, Trajectory]:
    n_r, n_phi = grid.n_r, grid.n_phi
    famf, qf, tauf, scf = F.kernel_params()
    famg, qg, taug, scg = G.kernel_params()
    contact = mode in (0, 1)
    if contact and cot_b is None:
        raise ValueError("contact modes need cot(θ) boundary samples")
    if not contact and f0 is None:
        raise ValueError("pinned modes need boundary data")
    cot_arr = np.zeros(n_phi) if cot_b is None else np.asarray(cot_b, dtype=float)
    f0_arr = np.zeros(n_phi) if f0 is None else np.asarray(f0, dtype=float)

    ue = np.empty((n_r + 1, n_phi))
    ue[:n_r] = u0
    ue[n_r] = 0.0
    ucb = np.array([float(uc0)])
    if not contact:
        ue[n_r - 1] = f0_arr + f_rate * t0

    horizon = math.inf if t_final is None else float(t_final)
    steady_need = cfg.steady_window if steady_when_flat else _NEVER
    snaps = []
    requested = sorted(float(ts) for ts in snapshot_times
                       if t0 - 1e-12 <= ts <= horizon + 1e-12)
    if requested and abs(requested[0] - t0) <= 1e-12:
        snaps.append(Snapshot(t=t0, u=ue[:n_r].copy(), u_center=float(ucb[0])))
        requested = requested[1:]
    plan = [(ts, True) for ts in requested if ts > t0 + 1e-12]
    if not plan or plan[-1][0] < horizon - 1e-12:
        plan.append((horizon, False))

    log = _SampleLog()
    steps_total = 0
    steady_count = 0
    first = True
    t = float(t0)
    status = kernels.STATUS_TIME
    for tgt, want_snap in plan:
        while True:
            remaining = cfg.max_steps - steps_total
            if remaining <= 0:
                raise BlowUpError(
                    f"step budget {cfg.max_steps} exhausted at t={t:.6g} "
                    "before reaching the requested state", t=t)
            status, t, dsteps, ns, steady_count, bi, bj = kernels.run_2d(
                ue, ucb, mode,
                famf, qf, tauf, scf, famg, qg, taug, scg,
                grid.jinv, grid.sec, grid.center_fit, cot_arr,
                grid.n_dot_grad_r, grid.n_dot_grad_phi, grid.two_pi_over_L,
                f0_arr, f_rate, lam_pre, eps,
                cfg.sigma, grid.h_min, lam_floor,
                t, tgt, remaining, cfg.sample_every, first,
                cfg.steady_tol, steady_need, steady_count, relax_stop,
                *log.buf)
            first = False
            log.absorb(ns)
            steps_total += dsteps
            if status == kernels.STATUS_BLOWUP:
                node = "center" if bi < 0 else f"ring {bi}, column {bj}"
                raise BlowUpError(
                    f"non-finite update at {node}, t={t:.6g} after "
                    f"{steps_total} steps", t=t,
                    node=None if bi < 0 else (int(bi), int(bj)))
            if status == kernels.STATUS_BUFFER_FULL:
                continue
            if status == kernels.STATUS_MAXSTEPS:
                continue       # loops back into the budget check
            break
        if status == kernels.STATUS_STEADY:
            break
        if want_snap:
            snaps.append(Snapshot(t=t, u=ue[:n_r].copy(), u_center=float(ucb[0])))

    ts, supdu, suput, osc, meanut, stdut = log.arrays()
    state = FlowState(u=ue[:n_r].copy(), u_center=float(ucb[0]), t=t)
    if ts.size:
        state.sup_du = float(supdu[-1])
        state.sup_ut = float(suput[-1])
        state.osc = float(osc[-1])
        state.mean_ut = float(meanut[-1])
        state.std_ut = float(stdut[-1])
    meta = {
        "mode": mode, "sigma": cfg.sigma, "h_min": grid.h_min,
        "h_max": grid.h_max, "lam_floor": lam_floor,
        "dt_cap": cfg.sigma * grid.h_min ** 2 / (4.0 * lam_floor),
        "eps": eps, "lam_pre": lam_pre,
    }
    traj = Trajectory(t=ts, sup_du=supdu, sup_ut=suput, osc=osc,
                      mean_ut=meanut, std_ut=stdut, snapshots=snaps,
                      steps=steps_total, status=STATUS_NAMES[status], meta=meta)
    return state, traj


def _drive_1d(grid, F, G, *, mode: int, cfg: SolverConfig, u0,
              cot_l: float, cot_r: float, eps: float = 0.0,
              lam_floor: float, t0: float = 0.0,
              t_final: Optional[float] = None, snapshot_times=(),
              relax_stop: float = 0.0,
              steady_when_flat: bool = False) -> Tuple[FlowState, Trajectory]:
    famf, qf, tauf, scf = F.kernel_params()
    famg, qg, taug, scg = G.kernel_params()
    u = np.array(u0, dtype=float, copy=True)
    if u.shape != (grid.n + 1,):
        raise ValueError(f"field shape {u.shape} does not match grid ({grid.n + 1},)")

    horizon = math.inf if t_final is None else float(t_final)
    steady_need = cfg.steady_window if steady_when_flat else _NEVER
    snaps = []
    requested = sorted(float(ts) for ts in snapshot_times
                       if t0 - 1e-12 <= ts <= horizon + 1e-12)
    if requested and abs(requested[0] - t0) <= 1e-12:
        snaps.append(Snapshot(t=t0, u=u.copy()))
        requested = requested[1:]
    plan = [(ts, True) for ts in requested if ts > t0 + 1e-12]
    if not plan or plan[-1][0] < horizon - 1e-12:
        plan.append((horizon, False))

    log = _SampleLog()
    steps_total = 0
    steady_count = 0
    first = True
    t = float(t0)
    status = kernels.STATUS_TIME
    for tgt, want_snap in plan:
        while True:
            remaining = cfg.max_steps - steps_total
            if remaining <= 0:
                raise BlowUpError(
                    f"step budget {cfg.max_steps} exhausted at t={t:.6g} "
                    "before reaching the requested state", t=t)
            status, t, dsteps, ns, steady_count, bi = kernels.run_1d(
                u, mode,
                famf, qf, tauf, scf, famg, qg, taug, scg,
                cot_l, cot_r, grid.h, eps,
                cfg.sigma, lam_floor,
                t, tgt, remaining, cfg.sample_every, first,
                cfg.steady_tol, steady_need, steady_count, relax_stop,
                *log.buf)
            first = False
            log.absorb(ns)
            steps_total += dsteps
            if status == kernels.STATUS_BLOWUP:
                raise BlowUpError(
                    f"non-finite update at node {bi}, t={t:.6g} after "
                    f"{steps_total} steps", t=t, node=int(bi))
            if status in (kernels.STATUS_BUFFER_FULL, kernels.STATUS_MAXSTEPS):
                continue
            break
        if status == kernels.STATUS_STEADY:
            break
        if want_snap:
            snaps.append(Snapshot(t=t, u=u.copy()))

    ts, supdu, suput, osc, meanut, stdut = log.arrays()
    state = FlowState(u=u.copy(), u_center=None, t=t)
    if ts.size:
        state.sup_du = float(supdu[-1])
        state.sup_ut = float(suput[-1])
        state.osc = float(osc[-1])
        state.mean_ut = float(meanut[-1])
        state.std_ut = float(stdut[-1])
    meta = {
        "mode": mode, "sigma": cfg.sigma, "h_min": grid.h,
        "h_max": grid.h, "lam_floor": lam_floor,
        "dt_cap": cfg.sigma * grid.h ** 2 / (2.0 * lam_floor), "eps": eps,
    }
    traj = Trajectory(t=ts, sup_du=supdu, sup_ut=suput, osc=osc,
                      mean_ut=meanut, std_ut=stdut, snapshots=snaps,
                      steps=steps_total, status=STATUS_NAMES[status], meta=meta)
    return state, traj


# ---------------------------------------------------------------------------
# public drivers

def compatibility_residual(problem, u0, uc0: Optional[float] = None) -> np.ndarray:
    """Boundary mismatch of the initial data: contact problems measure
    D_N u + cot(θ)√(1+(D_T u)²) with one-sided interior differences, pinned
    problems the deviation from the prescribed values."""
    if isinstance(problem, ContactProblem):
        return contact_residual(problem.grid, problem.cot_b, u0, float(uc0))
    if isinstance(problem, IntervalProblem):
        u = np.asarray(u0, dtype=float)
        h = problem.grid.h
        dl = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
        dr = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)
        return np.array([dl + problem.cot_left, dr - problem.cot_right])
    if isinstance(problem, DirichletProblem):
        return np.asarray(u0)[problem.grid.n_r - 1] - problem.f0
    raise TypeError(f"unsupported problem type {type(problem).__name__}")


def run_flow(problem, u0, uc0: Optional[float] = None,
             config: Optional[SolverConfig] = None, *, check: bool = True,
             t0: float = 0.0) -> Tuple[FlowState, Trajectory]:
    """Advance the evolution from `u0` to `config.t_final`, or to steady
    translation when no horizon is set.  Raises AssumptionError when the
    problem assumptions or the initial compatibility fail, BlowUpError when a
    non-finite update appears."""
    cfg = (config or SolverConfig()).validated()
    if check:
        problem.validate()
        res = np.max(np.abs(compatibility_residual(problem, u0, uc0)))
        if res > cfg.compat_tol:
            raise AssumptionError(
                f"initial data incompatible with the boundary condition: "
                f"residual {res:.3g} > {cfg.compat_tol:.3g}; adjust the data "
                "(see compatibilize)")
    lam_floor = _lam_floor(problem)
    if isinstance(problem, ContactProblem):
        if uc0 is None:
            raise ValueError("contact problems need a center value")
        return _drive_2d(problem.grid, problem.F, problem.G, mode=0, cfg=cfg,
                         u0=u0, uc0=float(uc0), cot_b=problem.cot_b,
                         lam_floor=lam_floor, t0=t0, t_final=cfg.t_final,
                         snapshot_times=cfg.snapshot_times,
                         steady_when_flat=cfg.t_final is None)
    if isinstance(problem, IntervalProblem):
        return _drive_1d(problem.grid, problem.F, problem.G, mode=0, cfg=cfg,
                         u0=u0, cot_l=problem.cot_left, cot_r=problem.cot_right,
                         lam_floor=lam_floor, t0=t0, t_final=cfg.t_final,
                         snapshot_times=cfg.snapshot_times,
                         steady_when_flat=cfg.t_final is None)
    if isinstance(problem, DirichletProblem):
        if uc0 is None:
            raise ValueError("plane-domain problems need a center value")
        if cfg.t_final is None:
            raise AssumptionError("pinned-boundary runs need a finite horizon")
        return _drive_2d(problem.grid, problem.F, problem.G, mode=2, cfg=cfg,
                         u0=u0, uc0=float(uc0), f0=problem.f0,
                         f_rate=problem.f_rate, lam_floor=lam_floor, t0=t0,
                         t_final=cfg.t_final, snapshot_times=cfg.snapshot_times)
    raise TypeError(f"unsupported problem type {type(problem).__name__}")


def advance(problem, state: FlowState, config: Optional[SolverConfig] = None,
            dt: Optional[float] = None) -> FlowState:
    """One explicit Euler step through the vectorized reference operator;
    `dt=None` uses the same CFL rule as the kernels."""
    cfg = config or SolverConfig()
    lam_floor = _lam_floor(problem)
    if not np.all(np.isfinite(state.u)) or (
            state.u_center is not None and not math.isfinite(state.u_center)):
        raise ConfigError("state contains non-finite values; cannot form a step size")
    if isinstance(problem, IntervalProblem):
        du, ut, lam_max = operator_fields_1d(problem.grid, problem.F, problem.G,
                                             state.u, problem.cot_left,
                                             problem.cot_right)
        if not np.isfinite(lam_max):
            raise ConfigError("step-size rate is not finite; invalid state")
        if dt is None:
            dt = cfg.sigma * problem.grid.h ** 2 / (2.0 * max(lam_max, lam_floor))
        u = state.u + dt * ut
        return FlowState(u=u, u_center=None, t=state.t + dt,
                         sup_du=float(np.max(np.abs(du))),
                         sup_ut=float(np.max(np.abs(ut))),
                         osc=float(np.ptp(state.u)),
                         mean_ut=float(np.mean(ut)),
                         std_ut=float(np.std(ut)))
    grid = problem.grid
    if isinstance(problem, ContactProblem):
        f = operator_fields(grid, problem.F, problem.G, state.u, state.u_center,
                            boundary="contact", cot_b=problem.cot_b)
    else:
        f = operator_fields(grid, problem.F, problem.G, state.u, state.u_center,
                            boundary="pinned")
    if not np.isfinite(f.lam_max):
        raise ConfigError("step-size rate is not finite; invalid state")
    if dt is None:
        dt = cfg.sigma * grid.h_min ** 2 / (4.0 * max(f.lam_max, lam_floor))
    u = state.u.copy()
    u[:f.i_max] += dt * f.ut
    uc = state.u_center + dt * f.ut_center
    t = state.t + dt
    if isinstance(problem, DirichletProblem):
        u[grid.n_r - 1] = problem.f0 + problem.f_rate * t
    osc_rows = state.u if isinstance(problem, DirichletProblem) else state.u[:f.i_max]
    lo = min(float(np.min(osc_rows)), state.u_center)
    hi = max(float(np.max(osc_rows)), state.u_center)
    return FlowState(u=u, u_center=uc, t=t, sup_du=f.sup_du, sup_ut=f.sup_ut,
                     osc=hi - lo, mean_ut=f.mean_ut,
                     std_ut=float(np.std(np.append(f.ut.ravel(), f.ut_center))))


def compatibilize(problem, u0, uc0: Optional[float] = None, *,
                  tol: float = 1e-8, max_iter: int = 20):
    """Correct initial data inside a C² boundary collar so the one-sided
    normal slope matches the contact-angle condition; boundary values, the
    region away from the boundary, and the center node are untouched.
    Returns (u, uc, info)."""
    if isinstance(problem, ContactProblem):
        grid = problem.grid
        u = np.array(u0, dtype=float, copy=True)
        r0 = min(0.7, 1.0 - 4.0 * grid.h_r)
        psi = (grid.r - 1.0) * _smoothstep((grid.r - r0) / (1.0 - r0))
        dpsi = (3.0 * psi[-1] - 4.0 * psi[-2] + psi[-3]) / (2.0 * grid.h_r)
        its = 0
        res = compatibility_residual(problem, u, uc0)
        while np.max(np.abs(res)) > tol and its < max_iter:
            c = -res / (grid.n_dot_grad_r * dpsi)
            u += psi[:, None] * c[None, :]
            res = compatibility_residual(problem, u, uc0)
            its += 1
        info = {"iterations": its, "residual": float(np.max(np.abs(res)))}
        if info["residual"] > tol:
            raise AssumptionError(
                f"collar correction stalled at residual {info['residual']:.3g}")
        return u, float(uc0), info
    if isinstance(problem, IntervalProblem):
        grid = problem.grid
        u = np.array(u0, dtype=float, copy=True)
        x, half = grid.x, grid.half_length
        x0 = min(0.7 * half, half - 4.0 * grid.h)
        psi_r = (x - half) * _smoothstep((x - x0) / (half - x0))
        psi_l = -psi_r[::-1]
        d_r = (3.0 * psi_r[-1] - 4.0 * psi_r[-2] + psi_r[-3]) / (2.0 * grid.h)
        d_l = (-3.0 * psi_l[0] + 4.0 * psi_l[1] - psi_l[2]) / (2.0 * grid.h)
        its = 0
        res = compatibility_residual(problem, u)
        while np.max(np.abs(res)) > tol and its < max_iter:
            u += (-res[0] / d_l) * psi_l + (-res[1] / d_r) * psi_r
            res = compatibility_residual(problem, u)
            its += 1
        info = {"iterations": its, "residual": float(np.max(np.abs(res)))}
        if info["residual"] > tol:
            raise AssumptionError(
                f"collar correction stalled at residual {info['residual']:.3g}")
        return u, None, info
    raise TypeError("collar compatibilization applies to contact problems")


def random_smooth_field(grid, rng: np.random.Generator, *,
                        amplitude: float = 0.2, n_bumps: int = 4):
    """Smooth random initial data: a sum of Gaussian bumps centered inside the
    domain, evaluated at the grid nodes.  Returns (u, uc) for plane grids and
    a plain array for interval grids."""
    if hasattr(grid, "xy"):
        pts = grid.xy
        c = grid.center
        scale = math.sqrt(grid.domain.length) / 2.0
        u = np.zeros(pts.shape[:2])
        uc = 0.0
        for _ in range(n_bumps):
            amp = amplitude * rng.uniform(0.3, 1.0) * rng.choice([-1.0, 1.0])
            center = c + rng.uniform(-0.35, 0.35, size=2) * scale
            width = rng.uniform(0.35, 0.8) * scale
            d2 = np.sum((pts - center) ** 2, axis=-1)
            u += amp * np.exp(-d2 / (2.0 * width ** 2))
            uc += amp * math.exp(-float(np.sum((c - center) ** 2)) / (2.0 * width ** 2))
        return u, float(uc)
    x = grid.x
    u = np.zeros_like(x)
    for _ in range(n_bumps):
        amp = amplitude * rng.uniform(0.3, 1.0) * rng.choice([-1.0, 1.0])
        center = rng.uniform(-0.5, 0.5) * grid.half_length
        width = rng.uniform(0.25, 0.6) * grid.half_length
        u += amp * np.exp(-((x - center) ** 2) / (2.0 * width ** 2))
    return u
