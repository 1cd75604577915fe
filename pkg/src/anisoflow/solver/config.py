"""Problem bundles, solver configuration, and run artifacts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from ..anisotropy import AnisotropySpec, BoundsReport, MobilitySpec, estimate_constants
from ..errors import AssumptionError
from ..geometry import (
    ContactAngleField,
    ContactAngleReport,
    IntervalGrid,
    MappedGrid,
    check_contact_assumptions,
)

TRAJECTORY_COLUMNS = ("t", "sup_du", "sup_ut", "osc", "mean_ut")


@dataclass
class SolverConfig:
    """Time stepping and relaxation knobs.

    `t_final=None` means run until steady translation: the spatial standard
    deviation of u_t stays below `steady_tol` for `steady_window` consecutive
    sampled steps.
    """

    sigma: float = 0.4
    t_final: Optional[float] = None
    steady_tol: float = 1e-6
    steady_window: int = 100
    sample_every: int = 20
    snapshot_times: tuple = ()
    max_steps: int = 60_000_000
    compat_tol: float = 1e-6
    eps_schedule: tuple = (1e-1, 3e-2, 1e-2, 3e-3)
    relax_tol: float = 1e-8
    lambda_consistency_tol: float = 1e-3

    def validated(self) -> "SolverConfig":
        if not 0.0 < self.sigma <= 1.0:
            raise AssumptionError(f"CFL safety factor must lie in (0, 1], got {self.sigma}")
        if self.t_final is not None and self.t_final <= 0.0:
            raise AssumptionError("final time must be positive")
        if len(self.eps_schedule) >= 2:
            if not all(a > b > 0.0 for a, b in zip(self.eps_schedule, self.eps_schedule[1:])):
                raise AssumptionError("regularization schedule must be positive and decreasing")
        return self


@dataclass
class Snapshot:
    t: float
    u: np.ndarray
    u_center: Optional[float] = None


@dataclass
class Trajectory:
    t: np.ndarray
    sup_du: np.ndarray
    sup_ut: np.ndarray
    osc: np.ndarray
    mean_ut: np.ndarray
    std_ut: np.ndarray
    snapshots: list
    steps: int
    status: str
    meta: dict = field(default_factory=dict)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(TRAJECTORY_COLUMNS) + "\n")
            for k in range(self.t.size):
                fh.write("%r,%r,%r,%r,%r\n" % (
                    float(self.t[k]), float(self.sup_du[k]),
                    float(self.sup_ut[k]), float(self.osc[k]),
                    float(self.mean_ut[k])))


@dataclass
class FlowState:
    u: np.ndarray
    u_center: Optional[float]
    t: float
    sup_du: float = math.nan
    sup_ut: float = math.nan
    osc: float = math.nan
    mean_ut: float = math.nan
    std_ut: float = math.nan


@dataclass
class TranslatorResult:
    lam: float
    lam_richardson: float
    lam_direct: Optional[float]
    w: np.ndarray
    w_center: Optional[float]
    residual: float
    eps_schedule: tuple
    eps_center_estimates: tuple      # ε·w^ε at the center node, per ε
    eps_mean_estimates: tuple        # spatial mean of the operator, per ε
    flagged: bool
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# problem bundles

class ContactProblem:
    """Contact-angle evolution on a convex plane domain (graph dimension 2)."""

    def __init__(self, grid: MappedGrid, F: AnisotropySpec, G: MobilitySpec,
                 angles: ContactAngleField):
        if F.dim != 2 or G.dim != 2:
            raise AssumptionError("two-dimensional flows need dim-2 energy and mobility")
        self.grid = grid
        self.F = F
        self.G = G
        self.angles = angles
        self.theta_b = angles.theta(grid.s_boundary)
        if np.min(self.theta_b) < 1e-3 or np.max(self.theta_b) > math.pi - 1e-3:
            raise AssumptionError("A2 failed: contact angle within 1e-3 of 0 or π")
        self.cot_b = np.cos(self.theta_b) / np.sin(self.theta_b)

    @cached_property
    def bounds(self) -> BoundsReport:
        return estimate_constants(self.F, self.G)

    @cached_property
    def angle_report(self) -> ContactAngleReport:
        return check_contact_assumptions(self.grid.domain, self.angles)

    def validate(self) -> None:
        rep = self.angle_report
        if not rep.passed:
            raise AssumptionError(
                "A2 failed: contact-angle field inadmissible "
                f"(delta0={rep.delta0:.4g}, theta0={rep.theta0:.4g} at s={rep.worst_s:.4g})")
        if not self.bounds.a3_ok:
            raise AssumptionError(
                "A3 failed: sphere-restricted Hessian bound m2="
                f"{self.bounds.m2:.4g} is not below m0={self.bounds.m0:.4g}")


class IntervalProblem:
    """Contact-angle evolution on an interval (graph dimension 1); the two
    boundary points carry fixed angles and no curvature."""

    def __init__(self, grid: IntervalGrid, F: AnisotropySpec, G: MobilitySpec,
                 theta_left: float, theta_right: float):
        if F.dim != 1 or G.dim != 1:
            raise AssumptionError("interval flows need dim-1 energy and mobility")
        for th in (theta_left, theta_right):
            if not 1e-3 < th < math.pi - 1e-3:
                raise AssumptionError("A2 failed: endpoint angle within 1e-3 of 0 or π")
        self.grid = grid
        self.F = F
        self.G = G
        self.theta_left = float(theta_left)
        self.theta_right = float(theta_right)
        self.cot_left = math.cos(theta_left) / math.sin(theta_left)
        self.cot_right = math.cos(theta_right) / math.sin(theta_right)

    @cached_property
    def bounds(self) -> BoundsReport:
        return estimate_constants(self.F, self.G)

    def validate(self) -> None:
        if not self.bounds.a3_ok:
            raise AssumptionError(
                "A3 failed: sphere-restricted Hessian bound m2="
                f"{self.bounds.m2:.4g} is not below m0={self.bounds.m0:.4g}")


class DirichletProblem:
    """Prescribed boundary values f(x, t) = f0(x) + f_rate·t on a convex plane
    domain.  The data bound M = max(|f_t|, sup|D_T f|, sup|D_T D_T f|) is
    measured from the samples."""

    def __init__(self, grid: MappedGrid, F: AnisotropySpec, G: MobilitySpec,
                 f0, f_rate: float = 0.0):
        if F.dim != 2 or G.dim != 2:
            raise AssumptionError("two-dimensional flows need dim-2 energy and mobility")
        self.grid = grid
        self.F = F
        self.G = G
        self.f0 = np.broadcast_to(np.asarray(f0, dtype=float), (grid.n_phi,)).copy()
        self.f_rate = float(f_rate)

    @cached_property
    def bounds(self) -> BoundsReport:
        return estimate_constants(self.F, self.G)

    @cached_property
    def data_bound(self) -> float:
        # arclength-uniform boundary columns: D_T = (2π/L)·d/dφ
        g = self.grid
        scale = g.two_pi_over_L / g.h_phi
        d1 = (np.roll(self.f0, -1) - np.roll(self.f0, 1)) * 0.5 * scale
        d2 = (np.roll(self.f0, -1) - 2.0 * self.f0 + np.roll(self.f0, 1)) * scale ** 2
        return float(max(abs(self.f_rate), np.max(np.abs(d1)), np.max(np.abs(d2))))

    @cached_property
    def gamma(self):
        from ..anisotropy import gamma_constants
        return gamma_constants(self.bounds, self.data_bound)

    @cached_property
    def curvature_check(self):
        from ..anisotropy import check_curvature_condition
        checks = (check_curvature_condition(self.gamma, [k]) for k in self.grid.frame.k)
        return min(checks, key=lambda c: c.margin)

    def validate(self, require_gamma: bool = True) -> None:
        if not self.bounds.a3_ok:
            raise AssumptionError(
                "A3 failed: sphere-restricted Hessian bound m2="
                f"{self.bounds.m2:.4g} is not below m0={self.bounds.m0:.4g}")
        if require_gamma and not self.curvature_check.passed:
            raise AssumptionError(
                "curvature condition failed: worst weighted principal-curvature "
                f"sum {self.curvature_check.margin:.4g} ≤ 0 for data bound "
                f"M={self.data_bound:.4g}")
