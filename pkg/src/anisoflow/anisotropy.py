"""One-homogeneous surface energies and mobilities on ℝ^{n+1} \\ {0}.

A surface energy density F is positively one-homogeneous, F(cp) = c·F(p) for
c > 0, hence determined by its restriction to the unit sphere: with
ξ = p/|p| one has

    F(p)           = |p| · F(ξ),
    D_{p_i}F(p)    = (p_i/|p|) F(ξ) + |p| · D_{p_i}(F∘ξ),
    D²_{p_ip_j}F(p)= (1/|p|)(δ_ij − p_ip_j/|p|²) F(ξ)
                     + (p_i/|p|) D_{p_j}(F∘ξ) + (p_j/|p|) D_{p_i}(F∘ξ)
                     + |p| · D²_{p_ip_j}(F∘ξ),

where F∘ξ : p ↦ F(p/|p|) is the degree-0 extension.  Consequences that the
tests exercise directly: p·DF(p) = F(p) (Euler relation) and D²F(p)·p = 0
(radial null space).

The quantities that control the graph evolution are the sphere-restricted
bounds

    m0 ≤ F ≤ M0,   |D_{p_i}(F∘ξ)| ≤ m1,   ‖D²(F∘ξ)‖_Frobenius ≤ m2

at unit arguments (the degree-0 map has degree −1/−2 derivatives, so bounds
at |p| = 1 scale to m1/|p|, m2/|p|² elsewhere), together with g0 ≤ G ≤ G0
for the mobility.  They are estimated by deterministic low-discrepancy
sampling of the sphere, and feed the closeness condition m2 < m0 (flag `a3`)
and the boundary-weight constants

    γ1 = g0 · (2/(2+M²)·m0 − √2·M·m1 − m2),
    γ2 = G0 · (M0 + √2·M·m1 + m2),

used by the prescribed-boundary-data estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidAnisotropyError

DEFAULT_SPHERE_SAMPLES = 4097

# family codes shared with the jitted kernels
FAM_ISOTROPIC = 0
FAM_ELLIPSOIDAL = 1
FAM_INTERPOLATED = 2


def _as_batch(p):
    P = np.asarray(p, dtype=float)
    single = P.ndim == 1
    if single:
        P = P[None, :]
    r = np.linalg.norm(P, axis=1)
    if np.any(r == 0.0) or not np.all(np.isfinite(P)):
        raise ValueError("surface energy undefined at p = 0 or non-finite p")
    return P, r, single


def _check_spd(q: np.ndarray, d: int) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (d, d):
        raise InvalidAnisotropyError(f"metric must be {d}x{d}, got {q.shape}")
    if not np.allclose(q, q.T, atol=1e-12):
        raise InvalidAnisotropyError("metric must be symmetric")
    if np.min(np.linalg.eigvalsh(q)) <= 0.0:
        raise InvalidAnisotropyError("metric must be positive definite")
    return q


@dataclass(frozen=True)
class AnisotropySpec:
    """One-homogeneous surface energy on ℝ^{dim+1} \\ {0}.

    Built-in families carry closed-form derivatives; a custom density is
    given by its unit-sphere values and differentiated by central finite
    differences at unit-scaled arguments (step `fd_step`), using the
    homogeneity degrees to rescale.
    """

    dim: int
    family: str
    q: Optional[np.ndarray] = None
    tau: float = 0.0
    scale: float = 1.0
    sphere_fn: Optional[Callable] = None
    fd_step: float = 1e-5

    # -- factories ---------------------------------------------------------
    @staticmethod
    def isotropic(dim: int, scale: float = 1.0) -> "AnisotropySpec":
        return AnisotropySpec(dim=dim, family="isotropic", scale=scale)

    @staticmethod
    def ellipsoidal(q, dim: Optional[int] = None, scale: float = 1.0) -> "AnisotropySpec":
        q = np.asarray(q, dtype=float)
        if dim is None:
            dim = q.shape[0] - 1
        _check_spd(q, dim + 1)
        return AnisotropySpec(dim=dim, family="ellipsoidal", q=q, scale=scale)

    @staticmethod
    def interpolated(tau: float, q, dim: Optional[int] = None, scale: float = 1.0) -> "AnisotropySpec":
        q = np.asarray(q, dtype=float)
        if dim is None:
            dim = q.shape[0] - 1
        _check_spd(q, dim + 1)
        if not 0.0 <= tau <= 1.0:
            raise InvalidAnisotropyError(f"interpolation weight must lie in [0, 1], got {tau}")
        return AnisotropySpec(dim=dim, family="interpolated", q=q, tau=tau, scale=scale)

    @staticmethod
    def from_callable(sphere_fn: Callable, dim: int, fd_step: float = 1e-5,
                      scale: float = 1.0) -> "AnisotropySpec":
        """`sphere_fn(q)` evaluates the density at unit vectors; it may be
        scalar or vectorized over a trailing batch of rows."""
        return AnisotropySpec(dim=dim, family="custom", sphere_fn=sphere_fn,
                              fd_step=fd_step, scale=scale)

    @property
    def ambient_dim(self) -> int:
        return self.dim + 1

    # -- evaluation --------------------------------------------------------
    def _custom_unit_values(self, U: np.ndarray) -> np.ndarray:
        try:
            out = np.asarray(self.sphere_fn(U), dtype=float)
            if out.shape == (U.shape[0],):
                return out
        except Exception:
            pass
        return np.array([float(self.sphere_fn(u)) for u in U])

    def _raw_value(self, P: np.ndarray, r: np.ndarray) -> np.ndarray:
        if self.family == "isotropic":
            return r
        if self.family == "ellipsoidal":
            return np.sqrt(np.einsum("ni,ij,nj->n", P, self.q, P))
        if self.family == "interpolated":
            e = np.sqrt(np.einsum("ni,ij,nj->n", P, self.q, P))
            return (1.0 - self.tau) * r + self.tau * e
        if self.family == "custom":
            return r * self._custom_unit_values(P / r[:, None])
        raise InvalidAnisotropyError(f"unknown family {self.family!r}")

    def value(self, p):
        P, r, single = _as_batch(p)
        out = self.scale * self._raw_value(P, r)
        return float(out[0]) if single else out

    def gradient(self, p):
        P, r, single = _as_batch(p)
        if self.family == "isotropic":
            out = P / r[:, None]
        elif self.family == "ellipsoidal":
            w = P @ self.q
            e = np.sqrt(np.einsum("ni,ni->n", P, w))
            out = w / e[:, None]
        elif self.family == "interpolated":
            w = P @ self.q
            e = np.sqrt(np.einsum("ni,ni->n", P, w))
            out = (1.0 - self.tau) * P / r[:, None] + self.tau * w / e[:, None]
        else:
            out = self._fd_gradient(P / r[:, None])  # degree 0: same at p and ξ
        out = self.scale * out
        return out[0] if single else out

    def hessian(self, p):
        P, r, single = _as_batch(p)
        if self.family == "custom":
            out = self._fd_hessian(P / r[:, None]) / r[:, None, None]  # degree −1
        else:
            out = self._analytic_hessian(P, r)
        out = self.scale * out
        return out[0] if single else out

    def _analytic_hessian(self, P: np.ndarray, r: np.ndarray) -> np.ndarray:
        d = self.ambient_dim
        eye = np.eye(d)
        xi = P / r[:, None]
        iso = (eye[None, :, :] - xi[:, :, None] * xi[:, None, :]) / r[:, None, None]
        if self.family == "isotropic":
            return iso
        w = P @ self.q
        e = np.sqrt(np.einsum("ni,ni->n", P, w))
        ell = (self.q[None, :, :] / e[:, None, None]
               - w[:, :, None] * w[:, None, :] / (e ** 3)[:, None, None])
        if self.family == "ellipsoidal":
            return ell
        return (1.0 - self.tau) * iso + self.tau * ell

    # central differences of the homogeneous extension |p|·f(p/|p|)
    def _fd_extension(self, P: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(P, axis=1)
        return r * self._custom_unit_values(P / r[:, None])

    def _fd_gradient(self, U: np.ndarray) -> np.ndarray:
        d, h = self.ambient_dim, self.fd_step
        out = np.empty_like(U)
        for i in range(d):
            e = np.zeros(d)
            e[i] = h
            out[:, i] = (self._fd_extension(U + e) - self._fd_extension(U - e)) / (2 * h)
        return out

    def _fd_hessian(self, U: np.ndarray) -> np.ndarray:
        d, h = self.ambient_dim, self.fd_step
        n = U.shape[0]
        out = np.empty((n, d, d))
        f0 = self._fd_extension(U)
        for i in range(d):
            ei = np.zeros(d)
            ei[i] = h
            out[:, i, i] = (self._fd_extension(U + ei) - 2 * f0 + self._fd_extension(U - ei)) / h ** 2
            for j in range(i + 1, d):
                ej = np.zeros(d)
                ej[j] = h
                mixed = (self._fd_extension(U + ei + ej) - self._fd_extension(U + ei - ej)
                         - self._fd_extension(U - ei + ej) + self._fd_extension(U - ei - ej)) / (4 * h ** 2)
                out[:, i, j] = mixed
                out[:, j, i] = mixed
        return out

    # -- validation --------------------------------------------------------
    def validate(self, n_samples: int = 2048, tol: float = 1e-7) -> None:
        """Sampled positivity, homogeneity, Euler relation, radial null space
        and convexity checks; raises InvalidAnisotropyError on failure."""
        U = sphere_samples(self.ambient_dim, max(n_samples, 64))
        vals = self.value(U)
        if np.min(vals) <= 0.0:
            raise InvalidAnisotropyError("non-positive density sample on the unit sphere")
        scale = float(np.max(vals))
        two = self.value(2.0 * U)
        if np.max(np.abs(two - 2.0 * vals)) > 1e-9 * scale:
            raise InvalidAnisotropyError("density is not one-homogeneous")
        grads = self.gradient(U)
        euler = np.einsum("ni,ni->n", U, grads) - vals
        fd_slack = 100.0 * self.fd_step if self.family == "custom" else tol
        if np.max(np.abs(euler)) > fd_slack * scale:
            raise InvalidAnisotropyError("Euler relation p·DF = F fails")
        H = self.hessian(U)
        radial = np.einsum("nij,nj->ni", H, U)
        if np.max(np.abs(radial)) > fd_slack * scale:
            raise InvalidAnisotropyError("radial direction not in Hessian null space")
        eigs = np.linalg.eigvalsh(H)
        if np.min(eigs) < -fd_slack * scale:
            raise InvalidAnisotropyError("Hessian not positive semi-definite (non-convex density)")

    def kernel_params(self):
        """(family code, metric, tau, scale) consumed by the jitted kernels."""
        codes = {"isotropic": FAM_ISOTROPIC, "ellipsoidal": FAM_ELLIPSOIDAL,
                 "interpolated": FAM_INTERPOLATED}
        if self.family not in codes:
            raise InvalidAnisotropyError(
                "custom densities support evaluation only; time stepping requires "
                "a built-in family")
        d = self.ambient_dim
        q = np.eye(d) if self.q is None else np.asarray(self.q, dtype=float)
        return codes[self.family], q, float(self.tau), float(self.scale)


@dataclass(frozen=True)
class MobilitySpec:
    """One-homogeneous mobility; only its value enters the evolution, so no
    derivative machinery is attached.  `constant(c)` means G ≡ c on the unit
    sphere, i.e. G(p) = c|p|."""

    dim: int
    family: str
    q: Optional[np.ndarray] = None
    tau: float = 0.0
    scale: float = 1.0
    sphere_fn: Optional[Callable] = None

    @staticmethod
    def constant(dim: int, c: float = 1.0) -> "MobilitySpec":
        if c <= 0.0:
            raise InvalidAnisotropyError("mobility must be positive")
        return MobilitySpec(dim=dim, family="isotropic", scale=c)

    @staticmethod
    def ellipsoidal(q, dim: Optional[int] = None, scale: float = 1.0) -> "MobilitySpec":
        q = np.asarray(q, dtype=float)
        if dim is None:
            dim = q.shape[0] - 1
        _check_spd(q, dim + 1)
        return MobilitySpec(dim=dim, family="ellipsoidal", q=q, scale=scale)

    @staticmethod
    def interpolated(tau: float, q, dim: Optional[int] = None, scale: float = 1.0) -> "MobilitySpec":
        q = np.asarray(q, dtype=float)
        if dim is None:
            dim = q.shape[0] - 1
        _check_spd(q, dim + 1)
        if not 0.0 <= tau <= 1.0:
            raise InvalidAnisotropyError(f"interpolation weight must lie in [0, 1], got {tau}")
        return MobilitySpec(dim=dim, family="interpolated", q=q, tau=tau, scale=scale)

    @staticmethod
    def from_callable(sphere_fn: Callable, dim: int, scale: float = 1.0) -> "MobilitySpec":
        return MobilitySpec(dim=dim, family="custom", sphere_fn=sphere_fn, scale=scale)

    @property
    def ambient_dim(self) -> int:
        return self.dim + 1

    def value(self, p):
        P, r, single = _as_batch(p)
        if self.family == "isotropic":
            out = r.copy()
        elif self.family in ("ellipsoidal", "interpolated"):
            e = np.sqrt(np.einsum("ni,ij,nj->n", P, self.q, P))
            out = e if self.family == "ellipsoidal" else (1.0 - self.tau) * r + self.tau * e
        elif self.family == "custom":
            U = P / r[:, None]
            try:
                vals = np.asarray(self.sphere_fn(U), dtype=float)
                if vals.shape != (U.shape[0],):
                    raise ValueError
            except Exception:
                vals = np.array([float(self.sphere_fn(u)) for u in U])
            out = r * vals
        else:
            raise InvalidAnisotropyError(f"unknown family {self.family!r}")
        out = self.scale * out
        return float(out[0]) if single else out

    def validate(self, n_samples: int = 2048) -> None:
        U = sphere_samples(self.ambient_dim, max(n_samples, 64))
        if np.min(self.value(U)) <= 0.0:
            raise InvalidAnisotropyError("non-positive mobility sample on the unit sphere")

    def kernel_params(self):
        codes = {"isotropic": FAM_ISOTROPIC, "ellipsoidal": FAM_ELLIPSOIDAL,
                 "interpolated": FAM_INTERPOLATED}
        if self.family not in codes:
            raise InvalidAnisotropyError(
                "custom mobilities support evaluation only; time stepping requires "
                "a built-in family")
        d = self.ambient_dim
        q = np.eye(d) if self.q is None else np.asarray(self.q, dtype=float)
        return codes[self.family], q, float(self.tau), float(self.scale)


# ---------------------------------------------------------------------------
# spec-op style wrappers

def eval_F(spec: AnisotropySpec, p) -> float:
    return spec.value(np.asarray(p, dtype=float))


def grad_F(spec: AnisotropySpec, p) -> np.ndarray:
    return spec.gradient(np.asarray(p, dtype=float))


def hess_F(spec: AnisotropySpec, p) -> np.ndarray:
    return spec.hessian(np.asarray(p, dtype=float))


# ---------------------------------------------------------------------------
# sphere-restricted derivative maps (degree 0 map F∘ξ, evaluated at |q| = 1)

def sphere_gradient_map(spec: AnisotropySpec, U: np.ndarray) -> np.ndarray:
    """D(F∘ξ) at unit arguments: DF(q) − F(q)·q."""
    vals = spec.value(U)
    return spec.gradient(U) - vals[:, None] * U


def sphere_hessian_map(spec: AnisotropySpec, U: np.ndarray) -> np.ndarray:
    """D²(F∘ξ) at unit arguments:
    D²F − q·DFᵀ − DF·qᵀ − F·I + 3F·qqᵀ."""
    d = spec.ambient_dim
    vals = spec.value(U)
    grads = spec.gradient(U)
    H = spec.hessian(U)
    qg = U[:, :, None] * grads[:, None, :]
    return (H - qg - np.swapaxes(qg, 1, 2)
            - vals[:, None, None] * np.eye(d)[None, :, :]
            + 3.0 * vals[:, None, None] * U[:, :, None] * U[:, None, :])


# ---------------------------------------------------------------------------
# deterministic sphere sampling

def unit_circle_points(n: int) -> np.ndarray:
    phi = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(phi), np.sin(phi)])


def unit_sphere_points(n: int) -> np.ndarray:
    """Golden-angle lattice with both poles included (endpoints of the z grid),
    so axis-aligned extrema are hit exactly."""
    k = np.arange(n, dtype=float)
    z = 1.0 - 2.0 * k / (n - 1)
    z = np.clip(z, -1.0, 1.0)
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    az = k * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([rho * np.cos(az), rho * np.sin(az), z])


def sphere_samples(ambient_dim: int, n: int) -> np.ndarray:
    if ambient_dim == 2:
        return unit_circle_points(n)
    if ambient_dim == 3:
        return unit_sphere_points(n)
    raise ValueError(
        f"sphere sampling implemented for ambient dimension 2 or 3, got {ambient_dim}")


# ---------------------------------------------------------------------------
# constants

@dataclass(frozen=True)
class BoundsReport:
    """Sphere-restricted bounds for a surface energy / mobility pair.

    m1 is the max over samples and components of |D(F∘ξ)|; m2 the max
    Frobenius norm of D²(F∘ξ); both at unit arguments.
    """

    dim: int
    m0: float
    M0: float
    m1: float
    m2: float
    g0: float
    G0: float
    n_samples: int
    gamma_ok: Optional[bool] = None

    @property
    def a3_ok(self) -> bool:
        return self.m2 < self.m0

    @property
    def a3_margin(self) -> float:
        return self.m0 - self.m2

    def manifest_items(self):
        yield "m0", self.m0
        yield "M0", self.M0
        yield "m1", self.m1
        yield "m2", self.m2
        yield "g0", self.g0
        yield "G0", self.G0
        yield "n_samples", self.n_samples
        yield "a3_ok", self.a3_ok


def estimate_constants(F: AnisotropySpec, G: MobilitySpec,
                       n_samples: int = DEFAULT_SPHERE_SAMPLES) -> BoundsReport:
    if n_samples < 1000:
        raise ValueError("need at least 1000 sphere samples for the constant estimates")
    if F.ambient_dim != G.ambient_dim:
        raise ValueError("surface energy and mobility dimensions disagree")
    U = sphere_samples(F.ambient_dim, n_samples)
    fvals = F.value(U)
    if np.min(fvals) <= 0.0:
        raise InvalidAnisotropyError("non-positive density sample on the unit sphere")
    gvals = G.value(U)
    if np.min(gvals) <= 0.0:
        raise InvalidAnisotropyError("non-positive mobility sample on the unit sphere")
    gmap = sphere_gradient_map(F, U)
    hmap = sphere_hessian_map(F, U)
    fro = np.sqrt(np.einsum("nij,nij->n", hmap, hmap))
    return BoundsReport(
        dim=F.dim,
        m0=float(np.min(fvals)),
        M0=float(np.max(fvals)),
        m1=float(np.max(np.abs(gmap))),
        m2=float(np.max(fro)),
        g0=float(np.min(gvals)),
        G0=float(np.max(gvals)),
        n_samples=n_samples,
    )


def largest_admissible_tau(q, dim: Optional[int] = None, tol: float = 1e-4,
                           n_samples: int = DEFAULT_SPHERE_SAMPLES) -> float:
    """Largest interpolation weight for which the closeness condition
    m2 < m0 still holds, located by bisection."""
    q = np.asarray(q, dtype=float)
    if dim is None:
        dim = q.shape[0] - 1

    def ok(tau: float) -> bool:
        spec = AnisotropySpec.interpolated(tau, q, dim=dim)
        rep = estimate_constants(spec, MobilitySpec.constant(dim), n_samples)
        return rep.a3_ok

    if not ok(0.0):
        raise InvalidAnisotropyError("closeness condition fails already at tau = 0")
    lo, hi = 0.0, 1.0
    if ok(1.0):
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# boundary-weight constants and the weighted curvature condition

@dataclass(frozen=True)
class GammaConstants:
    gamma1: float
    gamma2: float
    M: float


def gamma_constants(bounds: BoundsReport, M: float) -> GammaConstants:
    rt2 = math.sqrt(2.0)
    g1 = bounds.g0 * (2.0 / (2.0 + M * M) * bounds.m0 - rt2 * M * bounds.m1 - bounds.m2)
    g2 = bounds.G0 * (bounds.M0 + rt2 * M * bounds.m1 + bounds.m2)
    return GammaConstants(gamma1=g1, gamma2=g2, M=M)


@dataclass(frozen=True)
class CurvatureCheck:
    passed: bool
    margin: float
    alpha: int


def check_curvature_condition(gamma: GammaConstants, principal_curvatures) -> CurvatureCheck:
    """Weighted curvature condition at one boundary point: with curvatures
    sorted descending and α the number of non-negative entries, require
    γ1 > 0 and γ1·Σ_{k_i ≥ 0} k_i + γ2·Σ_{k_i < 0} k_i > 0."""
    ks = np.sort(np.asarray(principal_curvatures, dtype=float))[::-1]
    alpha = int(np.sum(ks >= 0.0))
    margin = float(gamma.gamma1 * np.sum(ks[:alpha]) + gamma.gamma2 * np.sum(ks[alpha:]))
    passed = bool(gamma.gamma1 > 0.0 and margin > 0.0)
    return CurvatureCheck(passed=passed, margin=margin, alpha=alpha)


# ---------------------------------------------------------------------------
# the diffusion coefficient matrix a^{ij}(Du)

def coefficient_matrix(F: AnisotropySpec, G: MobilitySpec, du,
                       method: str = "direct") -> np.ndarray:
    """a^{ij} = G(Du,−1) · [D²F(Du,−1)]_{ij}, i, j = 1..n (upper-left block).

    `method="decomposed"` assembles the same matrix through the sphere
    decomposition

        a^{ij} = (δ_ij − u_iu_j/v²)·F·G + (u_i D_j(F) + u_j D_i(F))·G
                 + v²·G·D²_{ij}(F)

    with F, G unit-sphere values at ξ = (Du,−1)/v and D(F), D²(F) the
    degree −1/−2 sphere-map derivatives evaluated at (Du,−1); the two routes
    agree to machine precision for built-in families.
    """
    du = np.atleast_1d(np.asarray(du, dtype=float))
    n = du.shape[0]
    if n != F.dim:
        raise ValueError(f"gradient has {n} components but the energy expects {F.dim}")
    p = np.append(du, -1.0)
    if method == "direct":
        return G.value(p) * F.hessian(p)[:n, :n]
    if method != "decomposed":
        raise ValueError(f"unknown assembly method {method!r}")
    v = math.sqrt(1.0 + float(du @ du))
    xi = p / v
    Fs = F.value(xi)
    Gs = G.value(xi)
    gmap = sphere_gradient_map(F, xi[None, :])[0] / v
    hmap = sphere_hessian_map(F, xi[None, :])[0] / (v * v)
    a = (np.eye(n) - np.outer(du, du) / (v * v)) * (Fs * Gs)
    a += Gs * (np.outer(du, gmap[:n]) + np.outer(gmap[:n], du))
    a += (v * v) * Gs * hmap[:n, :n]
    return a


def coefficient_eigen_range(F: AnisotropySpec, G: MobilitySpec, du):
    a = coefficient_matrix(F, G, du)
    eigs = np.linalg.eigvalsh(a)
    return float(eigs[0]), float(eigs[-1])
