"""Explicit time-stepping kernels.

One step of the graph evolution u_t = a^{ij}(Du)·u_{x_ix_j} with
a^{ij} = G(Du,−1)·[D²F(Du,−1)]_{ij}:  logical centered differences on the
star-shaped (r, φ) grid are pushed to Cartesian derivatives through the
per-node inverse Jacobian and curvature tensors, the contact-angle condition
enters through a ghost ring behind the boundary, and the time step obeys
dt = σ·h_min²/(2n·Λ_max) with Λ_max the largest coefficient eigenvalue over
the grid (floored away from zero).

Modes:
    0  plain flow, ghost-ring contact-angle boundary
    1  damped relaxation for the translating-profile problem on the
       mean-zero component:  y_t = Lu − mean(Lu) − ε·y  (contact boundary)
    2  plain flow with pinned boundary values  f0 + f_rate·t
    3  damped relaxation  w_t = Lu − λ  with pinned boundary values

All kernels mutate `u` (which carries one extra ghost ring in contact modes)
and the one-element center buffer in place, and append diagnostic samples
(t, sup|Du|, sup|u_t|, osc u, mean u_t, std u_t) every `sample_every` steps.
"""

import numpy as np

try:
    from numba import njit

    NUMBA = True
except ImportError:          # pragma: no cover - exercised only without numba
    NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap

STATUS_TIME = 0
STATUS_STEADY = 1
STATUS_MAXSTEPS = 2
STATUS_BLOWUP = 3
STATUS_BUFFER_FULL = 4


@njit(cache=True, inline="always")
def _hess_block_2d(fam, q, tau, scale, px, py, out):
    """Upper-left 2x2 block of D²F at p = (px, py, -1), times `scale`."""
    r2 = px * px + py * py + 1.0
    r = np.sqrt(r2)
    if fam == 0:
        out[0] = scale * (1.0 - px * px / r2) / r
        out[1] = scale * (-px * py / r2) / r
        out[2] = scale * (1.0 - py * py / r2) / r
        return
    w0 = q[0, 0] * px + q[0, 1] * py - q[0, 2]
    w1 = q[1, 0] * px + q[1, 1] * py - q[1, 2]
    w2 = q[2, 0] * px + q[2, 1] * py - q[2, 2]
    e2 = px * w0 + py * w1 - w2
    e = np.sqrt(e2)
    e3 = e2 * e
    h00 = q[0, 0] / e - w0 * w0 / e3
    h01 = q[0, 1] / e - w0 * w1 / e3
    h11 = q[1, 1] / e - w1 * w1 / e3
    if fam == 1:
        out[0] = scale * h00
        out[1] = scale * h01
        out[2] = scale * h11
        return
    om = 1.0 - tau
    out[0] = scale * (om * (1.0 - px * px / r2) / r + tau * h00)
    out[1] = scale * (om * (-px * py / r2) / r + tau * h01)
    out[2] = scale * (om * (1.0 - py * py / r2) / r + tau * h11)


@njit(cache=True, inline="always")
def _mobility_2d(fam, q, tau, scale, px, py):
    r = np.sqrt(px * px + py * py + 1.0)
    if fam == 0:
        return scale * r
    w0 = q[0, 0] * px + q[0, 1] * py - q[0, 2]
    w1 = q[1, 0] * px + q[1, 1] * py - q[1, 2]
    w2 = q[2, 0] * px + q[2, 1] * py - q[2, 2]
    e = np.sqrt(px * w0 + py * w1 - w2)
    if fam == 1:
        return scale * e
    return scale * ((1.0 - tau) * r + tau * e)


@njit(cache=True)
def run_2d(u, ucb, mode,
           famf, qf, tauf, scf, famg, qg, taug, scg,
           jinv, sec, center_fit, cot_theta, ngr, ngphi, twopil,
           f0, frate, lam_pre, eps,
           sigma, hmin, lam_floor,
           t0, t_target, max_steps, sample_every, record_first,
           steady_tol, steady_need, steady_count0, relax_stop,
           out_t, out_supdu, out_suput, out_osc, out_meanut, out_stdut):
    n_r = u.shape[0] - 1
    n_phi = u.shape[1]
    h_r = 1.0 / n_r
    h_phi = 2.0 * np.pi / n_phi
    contact = mode == 0 or mode == 1
    i_max = n_r if contact else n_r - 1        # rings with PDE evaluation
    n_diag = i_max * n_phi + 1
    cap = out_t.shape[0]
    inv2hr = 1.0 / (2.0 * h_r)
    invhr2 = 1.0 / (h_r * h_r)
    inv2hp = 1.0 / (2.0 * h_phi)
    invhp2 = 1.0 / (h_phi * h_phi)
    inv4 = 1.0 / (4.0 * h_r * h_phi)
    dt_scale = sigma * hmin * hmin / 4.0       # 2n = 4 in two dimensions

    ut = np.empty((i_max, n_phi))
    hb = np.empty(3)

    t = t0
    step = 0
    nsamples = 0
    steady_count = steady_count0
    status = STATUS_MAXSTEPS
    bi = -1
    bj = -1

    while True:
        uc = ucb[0]
        if contact:
            # ghost ring from the contact-angle relation
            for j in range(n_phi):
                jp = j + 1 if j + 1 < n_phi else 0
                jm = j - 1 if j >= 1 else n_phi - 1
                up_b = (u[n_r - 1, jp] - u[n_r - 1, jm]) * inv2hp
                dtu = twopil * up_b
                dn = -cot_theta[j] * np.sqrt(1.0 + dtu * dtu)
                ur_t = (dn - up_b * ngphi[j]) / ngr[j]
                u[n_r, j] = u[n_r - 2, j] + 2.0 * h_r * ur_t

        lam_max = lam_floor
        sup_du2 = 0.0
        sup_ut = 0.0
        umin = uc
        umax = uc
        sum_ut = 0.0
        sum_ut2 = 0.0
        ok = True

        for i in range(i_max):
            for j in range(n_phi):
                jp = j + 1 if j + 1 < n_phi else 0
                jm = j - 1 if j >= 1 else n_phi - 1
                uij = u[i, j]
                if i == 0:
                    uim = uc
                    uimp = uc
                    uimm = uc
                else:
                    uim = u[i - 1, j]
                    uimp = u[i - 1, jp]
                    uimm = u[i - 1, jm]
                uip = u[i + 1, j]
                ur = (uip - uim) * inv2hr
                urr = (uip - 2.0 * uij + uim) * invhr2
                up = (u[i, jp] - u[i, jm]) * inv2hp
                upp = (u[i, jp] - 2.0 * uij + u[i, jm]) * invhp2
                urp = (u[i + 1, jp] - u[i + 1, jm] - uimp + uimm) * inv4

                a0x = jinv[i, j, 0, 0]
                a0y = jinv[i, j, 0, 1]
                a1x = jinv[i, j, 1, 0]
                a1y = jinv[i, j, 1, 1]
                dux = a0x * ur + a1x * up
                duy = a0y * ur + a1y * up
                hxx = (a0x * a0x * urr + 2.0 * a0x * a1x * urp + a1x * a1x * upp
                       + ur * sec[i, j, 0, 0, 0] + up * sec[i, j, 1, 0, 0])
                hxy = (a0x * a0y * urr + (a0x * a1y + a0y * a1x) * urp + a1x * a1y * upp
                       + ur * sec[i, j, 0, 0, 1] + up * sec[i, j, 1, 0, 1])
                hyy = (a0y * a0y * urr + 2.0 * a0y * a1y * urp + a1y * a1y * upp
                       + ur * sec[i, j, 0, 1, 1] + up * sec[i, j, 1, 1, 1])

                _hess_block_2d(famf, qf, tauf, scf, dux, duy, hb)
                g = _mobility_2d(famg, qg, taug, scg, dux, duy)
                a11 = g * hb[0]
                a12 = g * hb[1]
                a22 = g * hb[2]
                utv = a11 * hxx + 2.0 * a12 * hxy + a22 * hyy
                ut[i, j] = utv

                lam = 0.5 * (a11 + a22) + np.sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12)
                if lam > lam_max:
                    lam_max = lam
                du2 = dux * dux + duy * duy
                if du2 > sup_du2:
                    sup_du2 = du2
                if uij < umin:
                    umin = uij
                if uij > umax:
                    umax = uij
                if not np.isfinite(utv):
                    ok = False
                    bi = i
                    bj = j

        # center node via the quadratic fit
        cux = center_fit[0, n_phi] * uc
        cuy = center_fit[1, n_phi] * uc
        cxx = center_fit[2, n_phi] * uc
        cxy = center_fit[3, n_phi] * uc
        cyy = center_fit[4, n_phi] * uc
        for j in range(n_phi):
            v = u[0, j]
            cux += center_fit[0, j] * v
            cuy += center_fit[1, j] * v
            cxx += center_fit[2, j] * v
            cxy += center_fit[3, j] * v
            cyy += center_fit[4, j] * v
        _hess_block_2d(famf, qf, tauf, scf, cux, cuy, hb)
        g = _mobility_2d(famg, qg, taug, scg, cux, cuy)
        a11 = g * hb[0]
        a12 = g * hb[1]
        a22 = g * hb[2]
        ut_c = a11 * cxx + 2.0 * a12 * cxy + a22 * cyy
        lam = 0.5 * (a11 + a22) + np.sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12)
        if lam > lam_max:
            lam_max = lam
        du2 = cux * cux + cuy * cuy
        if du2 > sup_du2:
            sup_du2 = du2
        if not np.isfinite(ut_c):
            ok = False
            bi = -1
            bj = -1

        # boundary of the oscillation range in pinned modes
        if not contact:
            for j in range(n_phi):
                v = u[n_r - 1, j]
                if v < umin:
                    umin = v
                if v > umax:
                    umax = v

        # effective time derivative per mode
        if mode == 1:
            s = ut_c
            for i in range(i_max):
                for j in range(n_phi):
                    s += ut[i, j]
            mean_raw = s / n_diag
            for i in range(i_max):
                for j in range(n_phi):
                    ut[i, j] = ut[i, j] - mean_raw - eps * u[i, j]
            ut_c = ut_c - mean_raw - eps * uc
        elif mode == 3:
            for i in range(i_max):
                for j in range(n_phi):
                    ut[i, j] = ut[i, j] - lam_pre
            ut_c = ut_c - lam_pre

        for i in range(i_max):
            for j in range(n_phi):
                v = ut[i, j]
                av = abs(v)
                if av > sup_ut:
                    sup_ut = av
                if mode != 1:
                    sum_ut += v
                    sum_ut2 += v * v
        av = abs(ut_c)
        if av > sup_ut:
            sup_ut = av
        if mode != 1:
            sum_ut += ut_c
            sum_ut2 += ut_c * ut_c
        if mode == 1:
            # report the raw operator mean (the speed estimate), spread of the
            # effective derivative
            sum_ut = mean_raw * n_diag
            for i in range(i_max):
                for j in range(n_phi):
                    v = ut[i, j]
                    sum_ut2 += v * v
            sum_ut2 += ut_c * ut_c
            mean_ut = mean_raw
            std_ut = np.sqrt(max(0.0, sum_ut2 / n_diag))
        else:
            mean_ut = sum_ut / n_diag
            std_ut = np.sqrt(max(0.0, sum_ut2 / n_diag - mean_ut * mean_ut))

        if not ok:
            status = STATUS_BLOWUP
            break

        sampled = step % sample_every == 0
        if sampled or t >= t_target - 1e-14:
            if step > 0 or record_first:
                if nsamples >= cap:
                    status = STATUS_BUFFER_FULL
                    break
                out_t[nsamples] = t
                out_supdu[nsamples] = np.sqrt(sup_du2)
                out_suput[nsamples] = sup_ut
                out_osc[nsamples] = umax - umin
                out_meanut[nsamples] = mean_ut
                out_stdut[nsamples] = std_ut
                nsamples += 1
            if sampled:
                if mode == 0:
                    if std_ut < steady_tol:
                        steady_count += 1
                    else:
                        steady_count = 0
                    if steady_count >= steady_need:
                        status = STATUS_STEADY
                        break
                elif mode == 1 or mode == 3:
                    if sup_ut < relax_stop:
                        status = STATUS_STEADY
                        break

        if t >= t_target - 1e-14:
            status = STATUS_TIME
            break
        if step >= max_steps:
            status = STATUS_MAXSTEPS
            break

        lam_eff = lam_max if lam_max > lam_floor else lam_floor
        dt = dt_scale / lam_eff
        if t + dt > t_target:
            dt = t_target - t

        for i in range(i_max):
            for j in range(n_phi):
                u[i, j] += dt * ut[i, j]
        ucb[0] += dt * ut_c
        t += dt
        step += 1
        if mode == 2 or mode == 3:
            for j in range(n_phi):
                u[n_r - 1, j] = f0[j] + frate * t

    return status, t, step, nsamples, steady_count, bi, bj


@njit(cache=True, inline="always")
def _coeff_1d(fam, q, tau, scale, ux):
    """a(u') = G(u',-1) * D²F(u',-1)[0,0], with 2x2 metric q."""
    r2 = ux * ux + 1.0
    r = np.sqrt(r2)
    if fam == 0:
        h = (1.0 - ux * ux / r2) / r
        e = r
    else:
        w0 = q[0, 0] * ux - q[0, 1]
        w1 = q[1, 0] * ux - q[1, 1]
        e2 = ux * w0 - w1
        e = np.sqrt(e2)
        he = q[0, 0] / e - w0 * w0 / (e2 * e)
        if fam == 1:
            h = he
        else:
            h = (1.0 - tau) * (1.0 - ux * ux / r2) / r + tau * he
            e = (1.0 - tau) * r + tau * e
    return scale * h, e


@njit(cache=True, inline="always")
def _mobility_1d(fam, q, tau, scale, ux):
    r = np.sqrt(ux * ux + 1.0)
    if fam == 0:
        return scale * r
    w0 = q[0, 0] * ux - q[0, 1]
    w1 = q[1, 0] * ux - q[1, 1]
    e = np.sqrt(ux * w0 - w1)
    if fam == 1:
        return scale * e
    return scale * ((1.0 - tau) * r + tau * e)


@njit(cache=True)
def run_1d(u, mode,
           famf, qf, tauf, scf, famg, qg, taug, scg,
           cot_l, cot_r, h, eps,
           sigma, lam_floor,
           t0, t_target, max_steps, sample_every, record_first,
           steady_tol, steady_need, steady_count0, relax_stop,
           out_t, out_supdu, out_suput, out_osc, out_meanut, out_stdut):
    n = u.shape[0] - 1
    cap = out_t.shape[0]
    dt_scale = sigma * h * h / 2.0             # 2n = 2 in one dimension
    ut = np.empty(n + 1)

    t = t0
    step = 0
    nsamples = 0
    steady_count = steady_count0
    status = STATUS_MAXSTEPS
    bi = -1

    while True:
        ghost_l = u[1] + 2.0 * h * cot_l
        ghost_r = u[n - 1] + 2.0 * h * cot_r

        lam_max = lam_floor
        sup_du = 0.0
        sup_ut = 0.0
        umin = u[0]
        umax = u[0]
        sum_ut = 0.0
        sum_ut2 = 0.0
        ok = True

        for i in range(n + 1):
            um = ghost_l if i == 0 else u[i - 1]
            up = ghost_r if i == n else u[i + 1]
            ux = (up - um) / (2.0 * h)
            uxx = (up - 2.0 * u[i] + um) / (h * h)
            hf, ge = _coeff_1d(famf, qf, tauf, scf, ux)
            gm = _mobility_1d(famg, qg, taug, scg, ux)
            a = gm * hf
            utv = a * uxx
            ut[i] = utv
            if a > lam_max:
                lam_max = a
            au = abs(ux)
            if au > sup_du:
                sup_du = au
            if u[i] < umin:
                umin = u[i]
            if u[i] > umax:
                umax = u[i]
            if not np.isfinite(utv):
                ok = False
                bi = i

        if mode == 1:
            s = 0.0
            for i in range(n + 1):
                s += ut[i]
            mean_raw = s / (n + 1)
            for i in range(n + 1):
                ut[i] = ut[i] - mean_raw - eps * u[i]

        for i in range(n + 1):
            av = abs(ut[i])
            if av > sup_ut:
                sup_ut = av
            if mode != 1:
                sum_ut += ut[i]
                sum_ut2 += ut[i] * ut[i]
        if mode == 1:
            mean_ut = mean_raw
            s2 = 0.0
            for i in range(n + 1):
                s2 += ut[i] * ut[i]
            std_ut = np.sqrt(s2 / (n + 1))
        else:
            mean_ut = sum_ut / (n + 1)
            std_ut = np.sqrt(max(0.0, sum_ut2 / (n + 1) - mean_ut * mean_ut))

        if not ok:
            status = STATUS_BLOWUP
            break

        sampled = step % sample_every == 0
        if sampled or t >= t_target - 1e-14:
            if step > 0 or record_first:
                if nsamples >= cap:
                    status = STATUS_BUFFER_FULL
                    break
                out_t[nsamples] = t
                out_supdu[nsamples] = sup_du
                out_suput[nsamples] = sup_ut
                out_osc[nsamples] = umax - umin
                out_meanut[nsamples] = mean_ut
                out_stdut[nsamples] = std_ut
                nsamples += 1
            if sampled:
                if mode == 0:
                    if std_ut < steady_tol:
                        steady_count += 1
                    else:
                        steady_count = 0
                    if steady_count >= steady_need:
                        status = STATUS_STEADY
                        break
                elif mode == 1:
                    if sup_ut < relax_stop:
                        status = STATUS_STEADY
                        break

        if t >= t_target - 1e-14:
            status = STATUS_TIME
            break
        if step >= max_steps:
            status = STATUS_MAXSTEPS
            break

        lam_eff = lam_max if lam_max > lam_floor else lam_floor
        dt = dt_scale / lam_eff
        if t + dt > t_target:
            dt = t_target - t
        for i in range(n + 1):
            u[i] += dt * ut[i]
        t += dt
        step += 1

    return status, t, step, nsamples, steady_count, bi


