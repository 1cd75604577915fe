"""Spatial operator on mapped grids: ghost-ring construction, derivative
accuracy, dual-route coefficient assembly, and kernel/reference agreement."""

import math

import numpy as np
import pytest

from anisoflow.anisotropy import AnisotropySpec, MobilitySpec, coefficient_matrix
from anisoflow.geometry import (
    ContactAngleField,
    ConvexDomain2D,
    build_grid,
    build_interval_grid,
)
from anisoflow.solver import (
    ContactProblem,
    FlowState,
    IntervalProblem,
    SolverConfig,
    advance,
    compatibilize,
    random_smooth_field,
    run_flow,
)
from anisoflow.solver.operator import (
    boundary_normal_derivative,
    boundary_tangential_derivative,
    contact_ghost_row,
    contact_residual,
    ghost_normal_derivative,
    interval_ghosts,
    operator_fields,
    operator_fields_1d,
)
from anisoflow.verify import grim_reaper_profile

ISO2 = AnisotropySpec.isotropic(2)
MOB2 = MobilitySpec.constant(2, 1.0)


def test_ghost_normal_derivative_values():
    assert ghost_normal_derivative(0.0, math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert ghost_normal_derivative(0.0, math.pi / 4) == pytest.approx(-1.0)
    # steeper tangential slope → steeper prescribed normal slope
    assert ghost_normal_derivative(1.0, math.pi / 4) == pytest.approx(-math.sqrt(2.0))
    assert ghost_normal_derivative(0.0, 3 * math.pi / 4) == pytest.approx(1.0)


def test_contact_ghost_row_encodes_angle_relation():
    grid = build_grid(ConvexDomain2D.ellipse(1.2, 0.8), 10, 20)
    rng = np.random.default_rng(5)
    u, _ = random_smooth_field(grid, rng, amplitude=0.3)
    theta = ContactAngleField.sinusoid(1.4, 0.2, 1, grid.domain.length)
    cot_b = np.cos(theta.theta(grid.s_boundary)) / np.sin(theta.theta(grid.s_boundary))
    ghost = contact_ghost_row(grid, cot_b, u)
    # reconstruct the boundary gradient the ghost implies and check the
    # angle relation D_N u = −cot(θ)·√(1 + (D_T u)²) holds identically
    ub = u[grid.n_r - 1]
    up = (np.roll(ub, -1) - np.roll(ub, 1)) * (0.5 / grid.h_phi)
    ur = (ghost - u[grid.n_r - 2]) / (2.0 * grid.h_r)
    dn = grid.n_dot_grad_r * ur + grid.n_dot_grad_phi * up
    dtu = grid.two_pi_over_L * up
    assert np.max(np.abs(dn + cot_b * np.sqrt(1.0 + dtu ** 2))) < 1e-13


def test_interval_ghosts_encode_endpoint_slopes():
    grid = build_interval_grid(1.0, 50)
    u = np.sin(grid.x)
    cot_l, cot_r = 0.6, -0.3
    gl, gr = interval_ghosts(grid, cot_l, cot_r, u)
    # centered differences across the ghosts give u'(−ℓ) = −cot_l, u'(+ℓ) = +cot_r
    assert (u[1] - gl) / (2 * grid.h) == pytest.approx(-cot_l, abs=1e-14)
    assert (gr - u[-2]) / (2 * grid.h) == pytest.approx(cot_r, abs=1e-14)


def test_affine_fields_second_order_on_annulus():
    # an affine graph has zero Hessian, so u_t must vanish; the mapped-grid
    # truncation error is O(h²) away from the coordinate center
    errs = {}
    for n in (16, 32):
        grid = build_grid(ConvexDomain2D.ellipse(1.3, 0.9), n, 2 * n)
        u = 0.3 + 0.7 * grid.xy[..., 0] - 0.4 * grid.xy[..., 1]
        uc = 0.3 + 0.7 * grid.center[0] - 0.4 * grid.center[1]
        f = operator_fields(grid, ISO2, MOB2, u, uc, boundary="pinned")
        mask = grid.r[:f.i_max] >= 0.5
        errs[n] = float(np.max(np.abs(f.ut[mask])))
        # gradient is globally second-order accurate
        assert np.max(np.abs(f.du - np.array([0.7, -0.4]))) < 0.02 / (n / 16) ** 2
        assert abs(f.ut_center) < 1e-12
    # measured 5.04e-2 → 1.43e-2 (ratio 3.53)
    assert errs[16] < 6e-2
    assert errs[16] / errs[32] > 3.0


def test_paraboloid_center_value_exact():
    # u = (x²+y²)/2 has Du = 0, Hessian = I at the center, so u_t = tr(a) = 2
    # for the isotropic energy; the center stencil is quadratic-exact
    grid = build_grid(ConvexDomain2D.disk(1.0), 16, 32)
    dx = grid.xy[..., 0] - grid.center[0]
    dy = grid.xy[..., 1] - grid.center[1]
    u = 0.5 * (dx ** 2 + dy ** 2)
    f = operator_fields(grid, ISO2, MOB2, u, 0.0, boundary="pinned")
    assert f.ut_center == pytest.approx(2.0, abs=1e-12)
    assert np.max(np.abs(f.du_center)) < 1e-12


def test_dual_route_coefficient_assembly_agrees():
    # vectorized einsum contraction vs independent per-point assembly of
    # a^{ij}(Du) contracted with the same Hessian
    grid = build_grid(ConvexDomain2D.ellipse(1.3, 0.9), 12, 24)
    F = AnisotropySpec.interpolated(0.1, np.diag([1.0, 1.0, 4.0]), dim=2)
    rng = np.random.default_rng(3)
    u, uc = random_smooth_field(grid, rng, amplitude=0.2)
    f = operator_fields(grid, F, MOB2, u, uc, boundary="pinned")
    for i, j in ((0, 0), (3, 7), (7, 19), (9, 2), (10, 23)):
        a = coefficient_matrix(F, MOB2, f.du[i, j])
        assert float(np.sum(a * f.hess[i, j])) == pytest.approx(
            float(f.ut[i, j]), abs=1e-13)
    a = coefficient_matrix(F, MOB2, f.du_center)
    assert float(np.sum(a * f.hess_center)) == pytest.approx(
        float(f.ut_center), abs=1e-13)


def test_interval_operator_second_order_interior():
    # on the exact translating profile the operator equals the speed; the
    # interior truncation error is O(h²), the mirror-ghost endpoints O(h)
    theta = math.pi / 3
    lam_star = math.pi / 2 - theta
    F, G = AnisotropySpec.isotropic(1), MobilitySpec.constant(1, 1.0)
    cot = math.cos(theta) / math.sin(theta)
    interior = {}
    for n in (100, 200):
        grid = build_interval_grid(1.0, n)
        w = grim_reaper_profile(theta, 1.0, grid.x)
        _, ut, _ = operator_fields_1d(grid, F, G, w, cot, cot)
        interior[n] = float(np.max(np.abs(ut[2:-2] - lam_star)))
        assert max(abs(ut[0] - lam_star), abs(ut[-1] - lam_star)) < 4.0 / n
    # measured 9.57e-6 → 2.39e-6
    assert interior[100] < 1.2e-5
    assert interior[100] / interior[200] > 3.8


def test_boundary_derivative_helpers_consistent():
    # for a field linear in x, the boundary tangential/normal derivatives
    # recover the projections of the constant gradient
    grid = build_grid(ConvexDomain2D.disk(1.0), 24, 48)
    b = np.array([0.8, -0.5])
    u = grid.xy @ b
    uc = float(grid.center @ b)
    dt = boundary_tangential_derivative(grid, u)
    dn = boundary_normal_derivative(grid, u, uc)
    assert np.max(np.abs(dt - grid.frame.T @ b)) < 5e-3
    assert np.max(np.abs(dn - grid.frame.N @ b)) < 5e-3


def test_contact_residual_zero_after_compatibilize():
    grid = build_grid(ConvexDomain2D.ellipse(1.3, 0.9), 12, 24)
    problem = ContactProblem(grid, ISO2, MOB2,
                             ContactAngleField.constant(math.pi / 2 + 0.2))
    rng = np.random.default_rng(9)
    u0, uc0 = random_smooth_field(grid, rng, amplitude=0.2)
    u, uc, info = compatibilize(problem, u0, uc0)
    res = contact_residual(grid, problem.cot_b, u, uc)
    assert np.max(np.abs(res)) < 1e-10


def test_kernel_matches_reference_operator():
    # drive the compiled kernel and the plain-numpy stepper over the same
    # horizon; the two routes must agree to rounding accumulation
    grid = build_grid(ConvexDomain2D.disk(1.0), 10, 20)
    problem = ContactProblem(grid, ISO2, MOB2,
                             ContactAngleField.constant(math.pi / 2))
    rng = np.random.default_rng(2)
    u0, uc0 = random_smooth_field(grid, rng, amplitude=0.2)
    u0, uc0, _ = compatibilize(problem, u0, uc0)
    cfg = SolverConfig(sample_every=1)
    state = FlowState(u=u0.copy(), u_center=uc0, t=0.0)
    for _ in range(20):
        state = advance(problem, state, cfg)
    final, traj = run_flow(problem, u0, uc0,
                           SolverConfig(t_final=state.t, sample_every=1))
    assert np.max(np.abs(final.u - state.u)) < 1e-12
    assert abs(final.u_center - state.u_center) < 1e-12
    assert final.t == pytest.approx(state.t, abs=1e-15)


def test_kernel_matches_reference_operator_1d():
    grid = build_interval_grid(1.0, 60)
    problem = IntervalProblem(grid, AnisotropySpec.isotropic(1),
                              MobilitySpec.constant(1, 1.0),
                              math.pi / 3, math.pi / 2)
    rng = np.random.default_rng(4)
    u0 = random_smooth_field(grid, rng, amplitude=0.2)
    u0, _, _ = compatibilize(problem, u0)
    cfg = SolverConfig(sample_every=1)
    state = FlowState(u=u0.copy(), u_center=None, t=0.0)
    for _ in range(20):
        state = advance(problem, state, cfg)
    final, _ = run_flow(problem, u0, None,
                        SolverConfig(t_final=state.t, sample_every=1))
    assert np.max(np.abs(final.u - state.u)) < 1e-12
