"""Uniformly convex plane domains, contact-angle fields on their boundaries,
and boundary-fitted grids.

Boundary curves are parametrized by arclength s with the Frenet conventions

    D_T T = k N,    D_T N = −k T,    k > 0,

for the counterclockwise unit tangent T and the *inward* unit normal N; a
uniformly convex C³ boundary has curvature pinched between k0 and k1 (the
structural assumption tagged A1).  A contact-angle field θ(s) is admissible
(tag A2) when |D_T θ| ≤ k − δ0 for some δ0 > 0 and θ0 ≤ θ ≤ π − θ0 for some
θ0 > 0.

Grids are star-shaped:  x(r, φ) = c + r·(B(s(φ)) − c) with r ∈ (0, 1] and
s(φ) = Lφ/2π, so boundary nodes are uniformly spaced in arclength and the
outermost ring lies exactly on ∂Ω.  Each node carries the inverse Jacobian
∂(r,φ)/∂(x,y) and the second-derivative tensors ∂²(r,φ)/∂x∂x needed to turn
logical finite differences into Cartesian derivatives; the single center
node is handled by a least-squares quadratic fit over the first ring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import AssumptionError, ConfigError

_DENSE = 8192


class ConvexDomain2D:
    """Closed uniformly convex curve, arclength-parametrized.

    Built-in factories are analytic (disk, ellipse); `from_samples` interpolates
    a sampled curve with periodic cubic splines, which are C² rather than C³ —
    curvature then comes from interpolant second derivatives and the usual
    regularity hypotheses hold only up to that caveat (see `smoothness`).
    """

    def __init__(self, length, center, point_fn, tangent_fn, curvature_fn,
                 name="custom", smoothness="spline-C2"):
        self.length = float(length)
        self.center = np.asarray(center, dtype=float)
        self._point = point_fn
        self._tangent = tangent_fn
        self._curvature = curvature_fn
        self.name = name
        self.smoothness = smoothness
        s = np.linspace(0.0, self.length, 4096, endpoint=False)
        ks = self.curvature(s)
        self.k0 = float(np.min(ks))
        self.k1 = float(np.max(ks))
        if self.k0 <= 0.0:
            raise AssumptionError(
                f"A1 failed: boundary not uniformly convex (min curvature {self.k0:.3e})")

    # -- factories ---------------------------------------------------------
    @staticmethod
    def disk(radius: float = 1.0, center=(0.0, 0.0)) -> "ConvexDomain2D":
        if radius <= 0.0:
            raise ConfigError("disk radius must be positive")
        R = float(radius)
        c = np.asarray(center, dtype=float)

        def point(s):
            a = np.asarray(s, dtype=float) / R
            return np.stack([c[0] + R * np.cos(a), c[1] + R * np.sin(a)], axis=-1)

        def tangent(s):
            a = np.asarray(s, dtype=float) / R
            return np.stack([-np.sin(a), np.cos(a)], axis=-1)

        def curvature(s):
            return np.full(np.shape(s), 1.0 / R)

        return ConvexDomain2D(2.0 * math.pi * R, c, point, tangent, curvature,
                              name="disk", smoothness="analytic")

    @staticmethod
    def ellipse(a: float, b: float, center=(0.0, 0.0)) -> "ConvexDomain2D":
        if a <= 0.0 or b <= 0.0:
            raise ConfigError("ellipse semi-axes must be positive")
        if max(a, b) / min(a, b) > 4.0:
            raise ConfigError("ellipse eccentricity too large for a well-behaved "
                              "star-shaped grid (semi-axis ratio capped at 4)")
        c = np.asarray(center, dtype=float)
        t_dense = np.linspace(0.0, 2.0 * math.pi, _DENSE + 1)
        speed = np.sqrt((a * np.sin(t_dense)) ** 2 + (b * np.cos(t_dense)) ** 2)
        s_dense = CubicSpline(t_dense, speed, bc_type="periodic").antiderivative()(t_dense)
        L = float(s_dense[-1])
        t_of_s = CubicSpline(s_dense, t_dense)

        def _t(s):
            return t_of_s(np.mod(np.asarray(s, dtype=float), L))

        def point(s):
            t = _t(s)
            return np.stack([c[0] + a * np.cos(t), c[1] + b * np.sin(t)], axis=-1)

        def tangent(s):
            t = _t(s)
            sp = np.sqrt((a * np.sin(t)) ** 2 + (b * np.cos(t)) ** 2)
            return np.stack([-a * np.sin(t) / sp, b * np.cos(t) / sp], axis=-1)

        def curvature(s):
            t = _t(s)
            sp = np.sqrt((a * np.sin(t)) ** 2 + (b * np.cos(t)) ** 2)
            return a * b / sp ** 3

        return ConvexDomain2D(L, c, point, tangent, curvature,
                              name="ellipse", smoothness="analytic")

    @staticmethod
    def from_samples(points) -> "ConvexDomain2D":
        """Closed convex curve through the given counterclockwise samples
        (periodic cubic interpolation, then arclength reparametrization)."""
        P = np.asarray(points, dtype=float)
        if P.ndim != 2 or P.shape[1] != 2 or P.shape[0] < 8:
            raise ConfigError("need at least 8 two-dimensional boundary samples")
        if np.allclose(P[0], P[-1]):
            P = P[:-1]
        closed = np.vstack([P, P[:1]])
        chord = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(closed, axis=0), axis=1))])
        spl = CubicSpline(chord, closed, bc_type="periodic")
        t_dense = np.linspace(0.0, chord[-1], _DENSE + 1)
        dp = spl(t_dense, 1)
        speed = np.linalg.norm(dp, axis=1)
        s_dense = CubicSpline(t_dense, speed, bc_type="periodic").antiderivative()(t_dense)
        L = float(s_dense[-1])
        t_of_s = CubicSpline(s_dense, t_dense)
        # polygon centroid of the dense trace (interior point for convex curves)
        dense_pts = spl(t_dense[:-1])
        x, y = dense_pts[:, 0], dense_pts[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cross = x * yn - xn * y
        area = 0.5 * np.sum(cross)
        centroid = np.array([np.sum((x + xn) * cross), np.sum((y + yn) * cross)]) / (6.0 * area)

        def _t(s):
            return t_of_s(np.mod(np.asarray(s, dtype=float), L))

        def point(s):
            return spl(_t(s))

        def tangent(s):
            d = spl(_t(s), 1)
            return d / np.linalg.norm(d, axis=-1, keepdims=True)

        def curvature(s):
            t = _t(s)
            d1 = spl(t, 1)
            d2 = spl(t, 2)
            sp = np.linalg.norm(d1, axis=-1)
            return (d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]) / sp ** 3

        return ConvexDomain2D(L, centroid, point, tangent, curvature, name="sampled")

    # -- evaluation --------------------------------------------------------
    def point(self, s):
        return self._point(np.mod(s, self.length))

    def tangent(self, s):
        return self._tangent(np.mod(s, self.length))

    def normal(self, s):
        """Inward unit normal: the counterclockwise tangent rotated by +90°."""
        t = self.tangent(s)
        return np.stack([-t[..., 1], t[..., 0]], axis=-1)

    def curvature(self, s):
        return self._curvature(np.mod(s, self.length))


@dataclass(frozen=True)
class BoundaryFrame:
    s: np.ndarray
    T: np.ndarray
    N: np.ndarray
    k: np.ndarray


def boundary_frame(domain: ConvexDomain2D, s) -> BoundaryFrame:
    s = np.atleast_1d(np.asarray(s, dtype=float))
    return BoundaryFrame(s=s, T=domain.tangent(s), N=domain.normal(s),
                         k=domain.curvature(s))


# ---------------------------------------------------------------------------
# contact-angle fields

class ContactAngleField:
    """Angle θ(s) between the evolving graph and the cylinder wall over ∂Ω.

    θ ≡ π/2 is the homogeneous Neumann case.  The tangential derivative is
    analytic for the built-in families and falls back to central differences
    for user callables.
    """

    def __init__(self, theta_fn: Callable, dtheta_fn: Optional[Callable] = None,
                 description: str = "custom"):
        self._theta = theta_fn
        self._dtheta = dtheta_fn
        self.description = description

    @staticmethod
    def constant(value: float) -> "ContactAngleField":
        v = float(value)
        return ContactAngleField(lambda s: np.full(np.shape(s), v),
                                 lambda s: np.zeros(np.shape(s)),
                                 description=f"const:{v:g}")

    @staticmethod
    def sinusoid(mean: float, amplitude: float, frequency: int,
                 length: float) -> "ContactAngleField":
        """θ(s) = mean + amplitude·sin(frequency·2πs/L)."""
        w = frequency * 2.0 * math.pi / length

        def theta(s):
            return mean + amplitude * np.sin(w * np.asarray(s, dtype=float))

        def dtheta(s):
            return amplitude * w * np.cos(w * np.asarray(s, dtype=float))

        return ContactAngleField(theta, dtheta,
                                 description=f"sinusoid:{mean:g}:{amplitude:g}:{frequency:d}")

    def theta(self, s):
        return np.asarray(self._theta(s), dtype=float)

    def dtheta(self, s, h: float = 1e-6):
        if self._dtheta is not None:
            return np.asarray(self._dtheta(s), dtype=float)
        s = np.asarray(s, dtype=float)
        return (self.theta(s + h) - self.theta(s - h)) / (2.0 * h)


@dataclass(frozen=True)
class ContactAngleReport:
    passed: bool
    delta0: float
    theta0: float
    theta_min: float
    theta_max: float
    worst_s: float


def check_contact_assumptions(domain: ConvexDomain2D, angles: ContactAngleField,
                              n_samples: int = 2048) -> ContactAngleReport:
    """Sampled verification of the angle admissibility conditions: returns
    δ0 = min(k − |D_Tθ|) and θ0 = min(min θ, π − max θ).  Angles within 1e−3
    of 0 or π are rejected outright."""
    if n_samples < 256:
        raise ValueError("need at least 256 boundary samples")
    s = np.linspace(0.0, domain.length, n_samples, endpoint=False)
    th = angles.theta(s)
    dth = angles.dtheta(s)
    k = domain.curvature(s)
    slack = k - np.abs(dth)
    i = int(np.argmin(slack))
    delta0 = float(slack[i])
    theta_min = float(np.min(th))
    theta_max = float(np.max(th))
    theta0 = float(min(theta_min, math.pi - theta_max))
    passed = delta0 > 0.0 and theta0 > 1e-3
    return ContactAngleReport(passed=passed, delta0=delta0, theta0=theta0,
                              theta_min=theta_min, theta_max=theta_max,
                              worst_s=float(s[i]))


# ---------------------------------------------------------------------------
# boundary-fitted grids

@dataclass
class MappedGrid:
    domain: ConvexDomain2D
    n_r: int
    n_phi: int
    h_r: float
    h_phi: float
    r: np.ndarray                 # (n_r,) ring radii, last = 1
    s_boundary: np.ndarray        # (n_phi,) arclength of each angular column
    xy: np.ndarray                # (n_r, n_phi, 2) node coordinates
    center: np.ndarray            # (2,)
    jinv: np.ndarray              # (n_r, n_phi, 2, 2): jinv[...,a,i] = ∂ξ^a/∂x_i
    sec: np.ndarray               # (n_r, n_phi, 2, 2, 2): ∂²ξ^a/∂x_i∂x_j
    frame: BoundaryFrame          # at the boundary columns
    n_dot_grad_r: np.ndarray      # (n_phi,)
    n_dot_grad_phi: np.ndarray    # (n_phi,)
    center_fit: np.ndarray        # (5, n_phi+1): data [ring1..., center] -> derivs
    h_min: float
    h_max: float
    two_pi_over_L: float

    @property
    def n_nodes(self) -> int:
        return self.n_r * self.n_phi + 1


def build_grid(domain: ConvexDomain2D, n_r: int, n_phi: int) -> MappedGrid:
    if n_r < 8 or n_phi < 16:
        raise ConfigError(f"grid too coarse: need n_r >= 8 and n_phi >= 16, "
                          f"got ({n_r}, {n_phi})")
    L = domain.length
    c = domain.center
    h_r = 1.0 / n_r
    h_phi = 2.0 * math.pi / n_phi
    r = (np.arange(n_r) + 1.0) * h_r
    s = L * np.arange(n_phi) / n_phi
    fr = boundary_frame(domain, s)

    R = domain.point(s) - c                       # (n_phi, 2)
    Rp = (L / (2.0 * math.pi)) * fr.T             # dR/dφ
    Rpp = (L / (2.0 * math.pi)) ** 2 * fr.k[:, None] * fr.N

    xy = c + r[:, None, None] * R[None, :, :]

    # Jacobian J[..., i, a] = ∂x_i/∂ξ^a with ξ = (r, φ)
    J = np.empty((n_r, n_phi, 2, 2))
    J[..., 0] = np.broadcast_to(R, (n_r, n_phi, 2))
    J[..., 1] = r[:, None, None] * Rp[None, :, :]
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    if np.min(det) <= 0.0:
        i, j = np.unravel_index(int(np.argmin(det)), det.shape)
        raise ConfigError(f"grid map degenerates at ring {i + 1}, column {j} "
                          f"(Jacobian determinant {det[i, j]:.3e}); the domain is "
                          "not star-shaped about its center")
    jinv = np.empty_like(J)       # jinv[..., a, i] = ∂ξ^a/∂x_i
    jinv[..., 0, 0] = J[..., 1, 1] / det
    jinv[..., 0, 1] = -J[..., 0, 1] / det
    jinv[..., 1, 0] = -J[..., 1, 0] / det
    jinv[..., 1, 1] = J[..., 0, 0] / det

    # map second derivatives H[..., d, a, b] = ∂²x_d/∂ξ^a∂ξ^b
    H = np.zeros((n_r, n_phi, 2, 2, 2))
    H[..., 0, 1] = np.broadcast_to(Rp, (n_r, n_phi, 2))
    H[..., 1, 0] = H[..., 0, 1]
    H[..., 1, 1] = r[:, None, None] * Rpp[None, :, :]
    # ∂²ξ^e/∂x_i∂x_j = − jinv[e,d] · H[d,a,b] · jinv[a,i] · jinv[b,j]
    sec = -np.einsum("...ed,...dab,...ai,...bj->...eij", jinv, H, jinv, jinv)

    n_dot_grad_r = np.einsum("ji,ji->j", fr.N, jinv[-1, :, 0, :])
    n_dot_grad_phi = np.einsum("ji,ji->j", fr.N, jinv[-1, :, 1, :])

    # least-squares quadratic fit at the center over [ring-1 nodes, center]
    d = xy[0] - c                                  # (n_phi, 2)
    rows = np.zeros((n_phi + 1, 6))
    rows[:n_phi, 0] = 1.0
    rows[:n_phi, 1] = d[:, 0]
    rows[:n_phi, 2] = d[:, 1]
    rows[:n_phi, 3] = 0.5 * d[:, 0] ** 2
    rows[:n_phi, 4] = d[:, 0] * d[:, 1]
    rows[:n_phi, 5] = 0.5 * d[:, 1] ** 2
    rows[n_phi, 0] = 1.0
    center_fit = np.linalg.pinv(rows)[1:6]

    ring_edges = np.linalg.norm(np.diff(xy, axis=0), axis=2)
    phi_edges = np.linalg.norm(np.roll(xy, -1, axis=1) - xy, axis=2)
    spoke0 = np.linalg.norm(xy[0] - c, axis=1)
    h_min = float(min(ring_edges.min(), phi_edges.min(), spoke0.min()))
    h_max = float(max(ring_edges.max(), phi_edges.max(), spoke0.max()))

    return MappedGrid(domain=domain, n_r=n_r, n_phi=n_phi, h_r=h_r, h_phi=h_phi,
                      r=r, s_boundary=s, xy=xy, center=c.copy(), jinv=jinv, sec=sec,
                      frame=fr, n_dot_grad_r=n_dot_grad_r,
                      n_dot_grad_phi=n_dot_grad_phi, center_fit=center_fit,
                      h_min=h_min, h_max=h_max, two_pi_over_L=2.0 * math.pi / L)


def grid_rows(grid: MappedGrid, u: Optional[np.ndarray] = None,
              u_center: Optional[float] = None):
    """Yield (r, phi, x, y[, u]) rows, boundary rings first ring inward out,
    center last; matches the snapshot CSV layout."""
    for i in range(grid.n_r):
        for j in range(grid.n_phi):
            row = [grid.r[i], j * grid.h_phi, grid.xy[i, j, 0], grid.xy[i, j, 1]]
            if u is not None:
                row.append(u[i, j])
            yield row
    row = [0.0, 0.0, grid.center[0], grid.center[1]]
    if u is not None:
        row.append(u_center)
    yield row


# ---------------------------------------------------------------------------
# 1-D interval mode (degenerate domain: two boundary points, no curvature)

@dataclass
class IntervalGrid:
    half_length: float
    n: int                        # number of cells; n+1 nodes
    x: np.ndarray
    h: float

    @property
    def n_nodes(self) -> int:
        return self.n + 1


def build_interval_grid(half_length: float, n: int) -> IntervalGrid:
    if half_length <= 0.0:
        raise ConfigError("interval half-length must be positive")
    if n < 8:
        raise ConfigError("need at least 8 cells on the interval")
    x = np.linspace(-half_length, half_length, n + 1)
    return IntervalGrid(half_length=float(half_length), n=n, x=x,
                        h=float(x[1] - x[0]))
