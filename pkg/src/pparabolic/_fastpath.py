"""Numba kernel for the n = 2 box-section update.

Mirrors the generic numpy stepper arithmetic for static box cylinders.
Boundary-data reads discovered inside the kernel (probe exits and
inactive interpolation corners) enter the update linearly once the
gradient direction is fixed, so the kernel emits (position, coefficient,
row) requests that the caller settles with one vectorized call to the
data closure.  Gradient-flat nodes whose diagonal stencil touches the
boundary are deferred to the generic envelope code (rare).
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _box_exit(x0, x1, d0, d1, lo0, lo1, hi0, hi1):
    s = np.inf
    if d0 > 0.0:
        s = (hi0 - x0) / d0
    elif d0 < 0.0:
        s = (lo0 - x0) / d0
    if d1 > 0.0:
        s2 = (hi1 - x1) / d1
        if s2 < s:
            s = s2
    elif d1 < 0.0:
        s2 = (lo1 - x1) / d1
        if s2 < s:
            s = s2
    if s < 0.0:
        s = 0.0
    if s > 1.0:
        s = 1.0
    return s


@njit(cache=True)
def kernel_box(U, mask, cells_ok, idx_flat, xs, u_c,
               vp0, vm0, vp1, vm1,
               lo0, lo1, hi0, hi1, ax0, ax1, N0, N1,
               h, p, rho, gtol,
               Lout, req_pos, req_coef, req_row, env_rows):
    ns = u_c.shape[0]
    h2 = h * h
    two_h = 2.0 * h
    nreq = 0
    nenv = 0
    pend_pos = np.empty((2, 5, 2))
    pend_wgt = np.empty((2, 5))
    pend_cnt = np.empty(2, dtype=np.int64)
    res = np.empty(2)
    arm = np.empty(2)
    for i in range(ns):
        u = u_c[i]
        x0 = xs[i, 0]
        x1 = xs[i, 1]
        acc = vp0[i] + vm0[i]
        acc = acc + vp1[i]
        acc = acc + vm1[i]
        delta5 = (acc - 4.0 * u) / h2
        gx = (vp0[i] - vm0[i]) / two_h
        gy = (vp1[i] - vm1[i]) / two_h
        gn = np.sqrt(gx * gx + gy * gy)
        if gn <= gtol:
            # envelope branch; defer when the diagonal stencil leaves the grid
            flat = idx_flat[i]
            i0 = flat // N1
            i1 = flat % N1
            ok = (0 < i0 < N0 - 1) and (0 < i1 < N1 - 1)
            if ok:
                fpp = flat + N1 + 1
                fpm = flat + N1 - 1
                fmp = flat - N1 + 1
                fmm = flat - N1 - 1
                ok = mask[fpp] and mask[fpm] and mask[fmp] and mask[fmm]
            if ok:
                dxx = (vp0[i] - 2.0 * u + vm0[i]) / h2
                dyy = (vp1[i] - 2.0 * u + vm1[i]) / h2
                dxy = (U[fpp] - U[fpm] - U[fmp] + U[fmm]) / (4.0 * h2)
                mean = 0.5 * (dxx + dyy)
                rad = np.hypot(0.5 * (dxx - dyy), dxy)
                lam = mean - rad if p >= 2.0 else mean + rad
                Lout[i] = delta5 + (p - 2.0) * lam
            else:
                Lout[i] = delta5
                env_rows[nenv] = i
                nenv += 1
            continue
        nu0 = gx / gn
        nu1 = gy / gn
        if p > 2.0:
            L = delta5
            ndirs = 1
        else:
            L = 0.0
            ndirs = 2
        for kdir in range(ndirs):
            if kdir == 0:
                w0 = nu0
                w1 = nu1
                mult = (p - 2.0) if p > 2.0 else (p - 1.0)
            else:
                w0 = -nu1
                w1 = nu0
                mult = 1.0
            for ks in range(2):
                sgn = 1.0 if ks == 0 else -1.0
                d0 = sgn * rho * w0
                d1 = sgn * rho * w1
                tip0 = x0 + d0
                tip1 = x1 + d1
                pend_cnt[ks] = 0
                inside = (lo0 < tip0 < hi0) and (lo1 < tip1 < hi1)
                if not inside:
                    s = _box_exit(x0, x1, d0, d1, lo0, lo1, hi0, hi1)
                    dist = s * np.sqrt(d0 * d0 + d1 * d1)
                    a = dist if dist > h else h
                    arm[ks] = a
                    res[ks] = 0.0
                    pend_pos[ks, 0, 0] = x0 + s * d0
                    pend_pos[ks, 0, 1] = x1 + s * d1
                    pend_wgt[ks, 0] = 1.0
                    pend_cnt[ks] = 1
                    continue
                arm[ks] = rho
                pos0 = (tip0 - ax0) / h
                i0 = int(np.floor(pos0))
                if i0 < 0:
                    i0 = 0
                if i0 > N0 - 2:
                    i0 = N0 - 2
                f0 = pos0 - i0
                if f0 < 0.0:
                    f0 = 0.0
                if f0 > 1.0:
                    f0 = 1.0
                if f0 < 1e-9:
                    f0 = 0.0
                elif f0 > 1.0 - 1e-9:
                    f0 = 1.0
                pos1 = (tip1 - ax1) / h
                i1 = int(np.floor(pos1))
                if i1 < 0:
                    i1 = 0
                if i1 > N1 - 2:
                    i1 = N1 - 2
                f1 = pos1 - i1
                if f1 < 0.0:
                    f1 = 0.0
                if f1 > 1.0:
                    f1 = 1.0
                if f1 < 1e-9:
                    f1 = 0.0
                elif f1 > 1.0 - 1e-9:
                    f1 = 1.0
                base = i0 * N1 + i1
                w00 = (1.0 - f0) * (1.0 - f1)
                w01 = (1.0 - f0) * f1
                w10 = f0 * (1.0 - f1)
                w11 = f0 * f1
                if cells_ok[base]:
                    res[ks] = (w00 * U[base] + w01 * U[base + 1]
                               + w10 * U[base + N1] + w11 * U[base + N1 + 1])
                    continue
                r = 0.0
                for c in range(4):
                    if c == 0:
                        flat = base
                        wgt = w00
                        o0 = 0
                        o1 = 0
                    elif c == 1:
                        flat = base + 1
                        wgt = w01
                        o0 = 0
                        o1 = 1
                    elif c == 2:
                        flat = base + N1
                        wgt = w10
                        o0 = 1
                        o1 = 0
                    else:
                        flat = base + N1 + 1
                        wgt = w11
                        o0 = 1
                        o1 = 1
                    if mask[flat]:
                        r += wgt * U[flat]
                    elif wgt > 1e-14:
                        cx = ax0 + (i0 + o0) * h
                        cy = ax1 + (i1 + o1) * h
                        dd0 = cx - tip0
                        dd1 = cy - tip1
                        s = _box_exit(tip0, tip1, dd0, dd1, lo0, lo1, hi0, hi1)
                        k = pend_cnt[ks]
                        pend_pos[ks, k, 0] = tip0 + s * dd0
                        pend_pos[ks, k, 1] = tip1 + s * dd1
                        pend_wgt[ks, k] = wgt
                        pend_cnt[ks] = k + 1
                res[ks] = r
            a_p = arm[0]
            a_m = arm[1]
            denom = a_p * a_m * (a_p + a_m)
            L += mult * 2.0 * (a_m * res[0] + a_p * res[1] - (a_p + a_m) * u) / denom
            for k in range(pend_cnt[0]):
                req_pos[nreq, 0] = pend_pos[0, k, 0]
                req_pos[nreq, 1] = pend_pos[0, k, 1]
                req_coef[nreq] = mult * 2.0 * a_m * pend_wgt[0, k] / denom
                req_row[nreq] = i
                nreq += 1
            for k in range(pend_cnt[1]):
                req_pos[nreq, 0] = pend_pos[1, k, 0]
                req_pos[nreq, 1] = pend_pos[1, k, 1]
                req_coef[nreq] = mult * 2.0 * a_p * pend_wgt[1, k] / denom
                req_row[nreq] = i
                nreq += 1
        Lout[i] = L
    return nreq, nenv
