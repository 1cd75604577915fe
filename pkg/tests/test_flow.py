"""Time stepping: fixed points, first-order accuracy in Δt, translation
equivariance, compatibility handling, trajectory/status bookkeeping, and
failure modes."""

import math
import os

import numpy as np
import pytest

from anisoflow.anisotropy import AnisotropySpec, MobilitySpec
from anisoflow.errors import AssumptionError, BlowUpError, ConfigError
from anisoflow.geometry import (
    ContactAngleField,
    ConvexDomain2D,
    build_grid,
    build_interval_grid,
)
from anisoflow.solver import (
    ContactProblem,
    DirichletProblem,
    FlowState,
    IntervalProblem,
    SolverConfig,
    advance,
    compatibilize,
    compatibility_residual,
    random_smooth_field,
    run_flow,
)

ISO2 = AnisotropySpec.isotropic(2)
MOB2 = MobilitySpec.constant(2, 1.0)


def _disk_problem(n_r=10, n_phi=20, theta=math.pi / 2):
    grid = build_grid(ConvexDomain2D.disk(1.0), n_r, n_phi)
    return ContactProblem(grid, ISO2, MOB2, ContactAngleField.constant(theta))


def _ellipse_problem(n_r=12, n_phi=24):
    grid = build_grid(ConvexDomain2D.ellipse(1.3, 0.9), n_r, n_phi)
    F = AnisotropySpec.interpolated(0.1, np.diag([1.0, 1.0, 4.0]), dim=2)
    angles = ContactAngleField.sinusoid(math.pi / 2 + 0.2, 0.2, 1,
                                        grid.domain.length)
    return ContactProblem(grid, F, MOB2, angles)


def test_constant_data_is_fixed_point():
    problem = _disk_problem()
    u0 = np.full((10, 20), 0.7)
    _, traj = run_flow(problem, u0, 0.7, SolverConfig(t_final=0.05))
    assert traj.status == "time"
    assert np.max(traj.sup_ut) < 1e-12
    assert np.max(traj.osc) < 1e-12


def test_time_stepping_first_order():
    # explicit Euler: halving σ halves the time-discretization error, so
    # successive differences at a fixed horizon shrink by ≈2
    problem = _disk_problem()
    rng = np.random.default_rng(1)
    u0, uc0 = random_smooth_field(problem.grid, rng, amplitude=0.2)
    u0, uc0, _ = compatibilize(problem, u0, uc0)
    finals = {}
    for sigma in (0.4, 0.2, 0.1):
        state, _ = run_flow(problem, u0, uc0,
                            SolverConfig(sigma=sigma, t_final=0.02))
        finals[sigma] = state.u
    d1 = np.max(np.abs(finals[0.4] - finals[0.2]))
    d2 = np.max(np.abs(finals[0.2] - finals[0.1]))
    assert 1.7 < d1 / d2 < 2.3


def test_translation_equivariance():
    # the operator sees only differences of u, so shifting the initial data
    # by a constant shifts the whole evolution by that constant
    problem = _ellipse_problem()
    rng = np.random.default_rng(7)
    u0, uc0 = random_smooth_field(problem.grid, rng, amplitude=0.2)
    u0, uc0, _ = compatibilize(problem, u0, uc0)
    shift = 3.7
    state_a, traj_a = run_flow(problem, u0, uc0, SolverConfig(t_final=0.05))
    state_b, traj_b = run_flow(problem, u0 + shift, uc0 + shift,
                               SolverConfig(t_final=0.05))
    assert np.max(np.abs(state_b.u - state_a.u - shift)) < 1e-11
    assert np.max(np.abs(traj_b.osc - traj_a.osc)) < 1e-11
    assert np.max(np.abs(traj_b.sup_ut - traj_a.sup_ut)) < 1e-11


def test_compatibilize_random_fields():
    problem = _ellipse_problem()
    rng = np.random.default_rng(0)
    for _ in range(20):
        u0, uc0 = random_smooth_field(problem.grid, rng, amplitude=0.25)
        u, uc, info = compatibilize(problem, u0, uc0)
        assert info["residual"] < 1e-8
        # correction is confined to the boundary collar
        inner = problem.grid.r < 0.5
        assert np.array_equal(u[inner], u0[inner])
        assert uc == uc0
        # boundary ring values are untouched (only the slope is adjusted)
        assert np.array_equal(u[-1], u0[-1])


def test_compatibilize_leaves_compatible_data_alone():
    problem = _disk_problem(theta=math.pi / 2)
    u0 = np.full((10, 20), 0.2)     # cot(π/2) = 0 and flat data: compatible
    u, uc, info = compatibilize(problem, u0, 0.2)
    assert info["iterations"] == 0
    assert np.array_equal(u, u0)


def test_incompatible_data_rejected():
    problem = _ellipse_problem()
    rng = np.random.default_rng(3)
    u0, uc0 = random_smooth_field(problem.grid, rng, amplitude=0.3)
    assert np.max(np.abs(compatibility_residual(problem, u0, uc0))) > 1e-3
    with pytest.raises(AssumptionError, match="incompatible"):
        run_flow(problem, u0, uc0, SolverConfig(t_final=0.01))


def test_trajectory_monotone_time_and_horizon():
    problem = _disk_problem()
    rng = np.random.default_rng(5)
    u0, uc0 = random_smooth_field(problem.grid, rng, amplitude=0.1)
    u0, uc0, _ = compatibilize(problem, u0, uc0)
    _, traj = run_flow(problem, u0, uc0, SolverConfig(t_final=0.03))
    assert traj.status == "time"
    assert traj.t[-1] == pytest.approx(0.03, abs=1e-12)
    assert np.all(np.diff(traj.t) > 0)
    assert traj.steps >= traj.t.size - 1


def test_snapshots_recorded_at_requested_times():
    problem = _disk_problem()
    rng = np.random.default_rng(6)
    u0, uc0 = random_smooth_field(problem.grid, rng, amplitude=0.1)
    u0, uc0, _ = compatibilize(problem, u0, uc0)
    times = (0.0, 0.01, 0.02, 0.03)
    _, traj = run_flow(problem, u0, uc0,
                       SolverConfig(t_final=0.03, snapshot_times=times))
    assert len(traj.snapshots) == len(times)
    for snap, ts in zip(traj.snapshots, times):
        assert snap.t == pytest.approx(ts, abs=1e-10)
        assert snap.u.shape == (10, 20)
    assert np.array_equal(traj.snapshots[0].u, u0)


def test_steady_detection_on_disk():
    problem = _disk_problem(theta=math.pi / 2)
    rng = np.random.default_rng(8)
    u0, uc0 = random_smooth_field(problem.grid, rng, amplitude=0.2)
    u0, uc0, _ = compatibilize(problem, u0, uc0)
    state, traj = run_flow(problem, u0, uc0, SolverConfig())
    assert traj.status == "steady"
    assert state.std_ut < 1e-6
    assert abs(state.mean_ut) < 1e-3      # flat steady state: zero speed


def test_blowup_reported_with_location():
    problem = _disk_problem()
    u0 = np.zeros((10, 20))
    u0[4, 7] = np.nan
    with pytest.raises(BlowUpError) as err:
        run_flow(problem, u0, 0.0, SolverConfig(t_final=0.01), check=False)
    assert err.value.node is not None


def test_step_budget_exhaustion_raises():
    problem = _disk_problem()
    u0 = np.zeros((10, 20))
    with pytest.raises(BlowUpError, match="budget"):
        run_flow(problem, u0, 0.0, SolverConfig(t_final=10.0, max_steps=10))


def test_advance_rejects_non_finite_state():
    problem = _disk_problem()
    state = FlowState(u=np.full((10, 20), np.nan), u_center=0.0, t=0.0)
    with pytest.raises(ConfigError):
        advance(problem, state)


def test_dirichlet_boundary_tracks_data():
    grid = build_grid(ConvexDomain2D.ellipse(2.0, 1.0), 10, 20)
    F = AnisotropySpec.interpolated(0.1, np.diag([1.0, 1.0, 4.0]), dim=2)
    f0 = 0.2 * np.sin(2 * 2 * math.pi * grid.s_boundary / grid.domain.length)
    problem = DirichletProblem(grid, F, MOB2, f0, f_rate=0.3)
    u0 = (grid.r ** 2)[:, None] * f0[None, :]
    _, traj = run_flow(problem, u0, 0.0,
                       SolverConfig(t_final=0.2, snapshot_times=(0.1, 0.2)))
    for snap in traj.snapshots:
        assert np.max(np.abs(snap.u[-1] - (f0 + 0.3 * snap.t))) < 1e-12


def test_dirichlet_needs_finite_horizon():
    grid = build_grid(ConvexDomain2D.disk(1.0), 10, 20)
    problem = DirichletProblem(grid, ISO2, MOB2, np.zeros(20), f_rate=0.0)
    with pytest.raises(AssumptionError, match="horizon"):
        run_flow(problem, np.zeros((10, 20)), 0.0, SolverConfig())


def test_interval_flow_and_compatibilize():
    grid = build_interval_grid(1.0, 80)
    problem = IntervalProblem(grid, AnisotropySpec.isotropic(1),
                              MobilitySpec.constant(1, 1.0),
                              math.pi / 3, 2 * math.pi / 5)
    rng = np.random.default_rng(12)
    u0 = random_smooth_field(grid, rng, amplitude=0.2)
    u0, _, info = compatibilize(problem, u0)
    assert info["residual"] < 1e-8
    _, traj = run_flow(problem, u0, None,
                       SolverConfig(t_final=0.05, snapshot_times=(0.0, 0.05)))
    assert traj.status == "time"
    assert len(traj.snapshots) == 2
    assert traj.snapshots[1].u.shape == (81,)


def test_trajectory_csv_header(tmp_path):
    problem = _disk_problem()
    u0 = np.zeros((10, 20))
    _, traj = run_flow(problem, u0, 0.0, SolverConfig(t_final=0.01))
    path = os.path.join(tmp_path, "traj.csv")
    traj.write_csv(path)
    with open(path) as fh:
        header = fh.readline().strip()
        first = fh.readline().strip()
    assert header == "t,sup_du,sup_ut,osc,mean_ut"
    assert len(first.split(",")) == 5


def test_solver_config_validation():
    with pytest.raises(AssumptionError):
        SolverConfig(sigma=1.5).validated()
    with pytest.raises(AssumptionError):
        SolverConfig(t_final=-1.0).validated()
    with pytest.raises(AssumptionError):
        SolverConfig(eps_schedule=(0.1, 0.2)).validated()   # must decrease
