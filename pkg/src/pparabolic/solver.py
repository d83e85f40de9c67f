"""Monotone explicit finite-difference solver for u_t = p_lap_n(u).

The scheme marches a uniform space-time lattice restricted to the domain
by per-slice active-node masks.  At nodes with a resolved discrete
gradient the operator is the 3/5-point Laplacian plus (p - 2) times a
second difference along the gradient direction, evaluated at probe
points x +- rho nu with rho a small multiple of sqrt(h) (values by
multilinear interpolation of the slice); below the gradient threshold
the trace term is corrected by the eigenvalue envelope of the discrete
Hessian.  For 1 < p < 2 in two dimensions the update uses the rotated
frame (p-1) D_nu_nu + D_tau_tau instead, which keeps every stencil
weight nonnegative; with the CFL bound

    dt <= h^2 / (2 (n + |p - 2|) + 1)

the update is monotone in every node and boundary value.  Stencil and
interpolation points outside the active set read the boundary-data
closure F at their bisection projection onto the boundary; nodes newly
activated by a growing domain are initialized from F at their projection
in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import Domain, _bisect_arrays

__all__ = [
    "CFLViolation",
    "GridMismatch",
    "SolverParams",
    "Grid",
    "GridFunction",
    "make_grid",
    "step",
    "solve",
    "solve_on_grid",
    "discrete_comparison",
]

DataFn = Callable[[np.ndarray, np.ndarray], np.ndarray]

# the numba box kernel can be disabled to exercise the generic path
FASTPATH_ENABLED = True


class CFLViolation(ValueError):
    """Time step too large for a monotone explicit update."""


class GridMismatch(ValueError):
    """Grid functions live on different lattices."""


@dataclass(frozen=True)
class SolverParams:
    """Exponent and discretization thresholds.

    ``grad_tol`` defaults to h^2 max(1, |p-2|) (below discretization
    noise the gradient direction is meaningless).  ``probe_multiplier``
    fixes the directional probe arm as a node multiple; the default
    round(sqrt(L/h)) gives an arm of order sqrt(h).  Both can be pinned
    explicitly, which keeps matched-grid solves exactly equivariant
    under parabolic scaling.
    """

    p: float
    grad_tol: float | None = None
    probe_multiplier: int | None = None

    def __post_init__(self):
        if not 1.0 < self.p < float("inf"):
            raise ValueError("p must lie in (1, inf)")


class Grid:
    """Uniform lattice over the domain bounding box with active masks."""

    def __init__(self, dom: Domain, h: float, dt: float, t_lo: float, t_stop: float):
        self.dom = dom
        self.h = float(h)
        self.dt = float(dt)
        n = dom.n
        axes = []
        for i in range(n):
            lo, hi = dom.bbox.x_lo[i], dom.bbox.x_hi[i]
            count = int(math.ceil((hi - lo) / h - 1e-9)) + 1
            axes.append(lo + np.arange(count) * h)
        self.axes = tuple(axes)
        self.shape = tuple(a.size for a in axes)
        m_steps = int(round((t_stop - t_lo) / dt))
        self.times = t_lo + np.arange(m_steps + 1) * dt
        mesh = np.meshgrid(*axes, indexing="ij")
        self.points = np.stack([g.ravel() for g in mesh], axis=1)
        self._mask_cache: dict[int, np.ndarray] = {}
        self._static_mask: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def n_slices(self) -> int:
        return self.times.size

    def mask(self, m: int) -> np.ndarray:
        """Active nodes of slice m (flattened).

        The first and last slices are probed a hair inside the open time
        range so the closed bottom of the parabolic boundary and the
        final-time values are represented.
        """
        if self.dom.time_invariant_section:
            if self._static_mask is None:
                t_mid = 0.5 * (self.times[0] + self.times[-1])
                tq = np.full(self.points.shape[0], t_mid)
                self._static_mask = self.dom.contains(self.points, tq)
            return self._static_mask
        if m in self._mask_cache:
            return self._mask_cache[m]
        t = self.times[m]
        eps = self.dt * 1e-3
        if m == 0:
            t = t + eps
        elif m == self.times.size - 1:
            t = t - eps
        out = self.dom.contains(self.points, np.full(self.points.shape[0], t))
        if len(self._mask_cache) > 4:
            self._mask_cache.clear()
        self._mask_cache[m] = out
        return out

    def mask_eval_time(self, m: int) -> float:
        if self.dom.time_invariant_section:
            return 0.5 * (self.times[0] + self.times[-1])
        eps = self.dt * 1e-3
        if m == 0:
            return self.times[0] + eps
        if m == self.times.size - 1:
            return self.times[-1] - eps
        return self.times[m]


def make_grid(dom: Domain, h: float, params: SolverParams, dt: float | None = None,
              t_stop: float | None = None) -> Grid:
    """Grid over the domain box with a CFL-respecting snapped time step."""
    n = dom.n
    denom = 2.0 * (n + abs(params.p - 2.0)) + 1.0
    dt_max = h * h / denom
    t_lo = dom.bbox.t_lo
    t_hi = dom.bbox.t_hi if t_stop is None else min(t_stop, dom.bbox.t_hi)
    span = t_hi - t_lo
    if span <= 0:
        raise ValueError("empty time range")
    if dt is None:
        m_steps = int(math.ceil(span / dt_max - 1e-12))
        dt = span / m_steps
    elif dt > dt_max * (1.0 + 1e-12):
        raise CFLViolation(f"dt = {dt} exceeds CFL bound {dt_max}")
    else:
        m_steps = int(math.ceil(span / dt - 1e-9))
        t_hi = t_lo + m_steps * dt
    return Grid(dom, h, dt, t_lo, t_hi)


class _Stepper:
    """Per-solve workspace: neighbor tables and the monotone update."""

    def __init__(self, grid: Grid, F: DataFn, params: SolverParams):
        self.grid = grid
        self.dom = grid.dom
        self.F = F
        self.params = params
        self.h = grid.h
        self.n = grid.n
        if params.probe_multiplier is not None:
            self.m_pr = max(1, int(params.probe_multiplier))
        else:
            lmax = max(float(a[-1] - a[0]) for a in grid.axes)
            self.m_pr = max(1, int(round(math.sqrt(lmax / grid.h))))
        self.gtol = params.grad_tol if params.grad_tol is not None \
            else grid.h**2 * max(1.0, abs(params.p - 2.0))
        self.data_min = math.inf
        self.data_max = -math.inf
        self._axis_cache: dict = {}
        self._cells_ok: np.ndarray | None = None
        self._fast = None
        self._fast_buffers = None
        if (FASTPATH_ENABLED and self.n == 2 and params.p != 2.0
                and grid.dom.time_invariant_section
                and grid.dom.section_box is not None):
            try:
                from . import _fastpath

                self._fast = _fastpath
            except ImportError:
                self._fast = None

        N = grid.points.shape[0]
        shape = grid.shape
        idx = np.arange(N).reshape(shape)
        self.nb = []  # per axis: (plus_index, minus_index), -1 off lattice
        for ax in range(self.n):
            plus = np.full(shape, -1, dtype=np.int64)
            minus = np.full(shape, -1, dtype=np.int64)
            sl_to = [slice(None)] * self.n
            sl_from = [slice(None)] * self.n
            sl_to[ax], sl_from[ax] = slice(0, -1), slice(1, None)
            plus[tuple(sl_to)] = idx[tuple(sl_from)]
            minus[tuple(sl_from)] = idx[tuple(sl_to)]
            self.nb.append((plus.ravel(), minus.ravel()))
        if self.n == 2:
            self.diag = {}
            for s0 in (1, -1):
                for s1 in (1, -1):
                    d = np.full(shape, -1, dtype=np.int64)
                    r_to = slice(0, -1) if s0 > 0 else slice(1, None)
                    r_from = slice(1, None) if s0 > 0 else slice(0, -1)
                    c_to = slice(0, -1) if s1 > 0 else slice(1, None)
                    c_from = slice(1, None) if s1 > 0 else slice(0, -1)
                    d[r_to, c_to] = idx[r_from, c_from]
                    self.diag[(s0, s1)] = d.ravel()

    # -- boundary data reads ------------------------------------------------
    def _read_data(self, x: np.ndarray, t_read: float) -> np.ndarray:
        v = np.asarray(self.F(x, np.full(x.shape[0], t_read)), dtype=float)
        if v.size:
            self.data_min = min(self.data_min, float(v.min()))
            self.data_max = max(self.data_max, float(v.max()))
        return v

    def _crossing(self, x_in: np.ndarray, x_out: np.ndarray, t_geo: float) -> np.ndarray:
        tq = np.full(x_in.shape[0], t_geo)
        xb, _, _, _ = _bisect_arrays(self.dom, x_in, tq, x_out, tq, iters=52)
        return xb

    def _exit_point(self, x0: np.ndarray, d: np.ndarray, t_geo: float):
        """(crossing points, distances) for probe segments known to exit."""
        if self.dom.section_exit is not None:
            s = np.clip(self.dom.section_exit(x0, d, t_geo), 0.0, 1.0)
            zeta = x0 + s[:, None] * d
            return zeta, s * np.linalg.norm(d, axis=1)
        zeta = self._crossing(x0, x0 + d, t_geo)
        return zeta, np.linalg.norm(zeta - x0, axis=1)

    # -- stencil values -----------------------------------------------------
    def _axis_values(self, U_safe, mask_old, idxS, xs, t_read, t_geo):
        """Neighbor values at x +- h e_ax with boundary reads; (ax, sign) -> array."""
        static = self.dom.time_invariant_section
        out = {}
        for ax in range(self.n):
            for k, sign in enumerate((1, -1)):
                key = (ax, sign)
                if static and key in self._axis_cache:
                    need, zeta, nb_safe = self._axis_cache[key]
                else:
                    nb = self.nb[ax][k][idxS]
                    nb_safe = np.maximum(nb, 0)
                    valid = (nb >= 0) & mask_old[nb_safe]
                    need = np.flatnonzero(~valid)
                    zeta = None
                    if need.size:
                        d = np.zeros((need.size, self.n))
                        d[:, ax] = sign * self.h
                        zeta, _ = self._exit_point(xs[need], d, t_geo)
                    if static:
                        self._axis_cache[key] = (need, zeta, nb_safe)
                V = U_safe[nb_safe]
                if need.size:
                    V[need] = self._read_data(zeta, t_read)
                out[key] = V
        return out

    def advance(self, U_old: np.ndarray, m: int) -> np.ndarray:
        grid, dom, p = self.grid, self.dom, self.params.p
        h = self.h
        mask_old = grid.mask(m - 1)
        mask_new = grid.mask(m)
        t_read = grid.times[m - 1]
        t_geo = grid.mask_eval_time(m - 1)
        U_new = np.full_like(U_old, np.nan)

        stepped = mask_new & mask_old
        idxS = np.flatnonzero(stepped)
        if idxS.size:
            xs = grid.points[idxS]
            u_c = U_old[idxS]
            # zero out inactive entries once so gathers never meet NaN
            U_safe = np.where(mask_old, U_old, 0.0)
            V = self._axis_values(U_safe, mask_old, idxS, xs, t_read, t_geo)
            if p != 2.0 and self._fast is not None:
                L = self._fast_L(U_safe, mask_old, idxS, xs, u_c, V, t_read, t_geo)
                U_new[idxS] = u_c + grid.dt * L
                self._activate(U_new, mask_new, mask_old, m, t_geo)
                return U_new
            delta5 = V[(0, 1)] + V[(0, -1)]
            for ax in range(1, self.n):
                delta5 = delta5 + V[(ax, 1)] + V[(ax, -1)]
            delta5 = (delta5 - (2.0 * self.n) * u_c) / (h * h)
            if p == 2.0:
                L = delta5
            else:
                gvec = np.stack([(V[(ax, 1)] - V[(ax, -1)]) for ax in range(self.n)],
                                axis=1) / (2.0 * h)
                gn = np.sqrt(np.einsum("ij,ij->i", gvec, gvec))
                dirsel = gn > self.gtol
                L = np.empty(idxS.size)
                if np.any(dirsel):
                    nu = gvec[dirsel] / gn[dirsel, None]
                    sub = np.flatnonzero(dirsel)
                    d_nu = self._directional(U_safe, mask_old, xs[sub],
                                             u_c[sub], nu, t_read, t_geo)
                    if p > 2.0:
                        L[sub] = delta5[sub] + (p - 2.0) * d_nu
                    elif self.n == 1:
                        L[sub] = (p - 1.0) * d_nu
                    else:
                        tau = np.stack([-nu[:, 1], nu[:, 0]], axis=1)
                        d_tau = self._directional(U_safe, mask_old, xs[sub],
                                                  u_c[sub], tau, t_read, t_geo)
                        L[sub] = (p - 1.0) * d_nu + d_tau
                flat = ~dirsel
                if np.any(flat):
                    sub = np.flatnonzero(flat)
                    lam = self._envelope_eig(U_safe, mask_old, idxS[sub], xs[sub],
                                             u_c[sub], V, sub, t_read, t_geo)
                    L[sub] = delta5[sub] + (p - 2.0) * lam
            U_new[idxS] = u_c + grid.dt * L

        self._activate(U_new, mask_new, mask_old, m, t_geo)
        return U_new

    def _activate(self, U_new, mask_new, mask_old, m, t_geo):
        """Fresh nodes of a growing domain take data at their projection in time."""
        newly = mask_new & ~mask_old
        if not np.any(newly):
            return
        grid = self.grid
        idxA = np.flatnonzero(newly)
        xa = grid.points[idxA]
        t_in = np.full(idxA.size, grid.mask_eval_time(m))
        t_out = np.full(idxA.size, t_geo)
        _, tb, _, _ = _bisect_arrays(self.dom, xa, t_in, xa, t_out, iters=52)
        vals = np.asarray(self.F(xa, tb), dtype=float)
        U_new[idxA] = vals
        self.data_min = min(self.data_min, float(np.min(vals)))
        self.data_max = max(self.data_max, float(np.max(vals)))

    def _get_cells_ok(self, mask_old):
        """Per-cell flag: all corners of the interpolation cell are active."""
        if self._cells_ok is not None:
            return self._cells_ok
        g = self.grid
        ok = mask_old.reshape(g.shape)
        co = np.zeros(g.shape, dtype=bool)
        if self.n == 1:
            co[:-1] = ok[:-1] & ok[1:]
        else:
            co[:-1, :-1] = ok[:-1, :-1] & ok[1:, :-1] & ok[:-1, 1:] & ok[1:, 1:]
        co = co.ravel()
        if self.dom.time_invariant_section:
            self._cells_ok = co
        return co

    def _fast_L(self, U_safe, mask_old, idxS, xs, u_c, V, t_read, t_geo):
        """Numba box kernel plus linear settlement of boundary-data reads."""
        g = self.grid
        ns = idxS.size
        if self._fast_buffers is None or self._fast_buffers[0].size != ns:
            cap = 20 * ns + 64
            self._fast_buffers = (np.empty(ns), np.empty((cap, 2)), np.empty(cap),
                                  np.empty(cap, dtype=np.int64),
                                  np.empty(ns, dtype=np.int64))
        Lout, req_pos, req_coef, req_row, env_rows = self._fast_buffers
        lo, hi = self.dom.section_box
        nreq, nenv = self._fast.kernel_box(
            U_safe, mask_old, self._get_cells_ok(mask_old), idxS, xs, u_c,
            V[(0, 1)], V[(0, -1)], V[(1, 1)], V[(1, -1)],
            float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]),
            float(g.axes[0][0]), float(g.axes[1][0]), g.shape[0], g.shape[1],
            self.h, self.params.p, self.m_pr * self.h, self.gtol,
            Lout, req_pos, req_coef, req_row, env_rows)
        if nreq:
            vals = self._read_data(req_pos[:nreq], t_read)
            np.add.at(Lout, req_row[:nreq], req_coef[:nreq] * vals)
        if nenv:
            rows = env_rows[:nenv].copy()
            lam = self._envelope_eig(U_safe, mask_old, idxS[rows], xs[rows],
                                     u_c[rows], V, rows, t_read, t_geo)
            Lout[rows] += (self.params.p - 2.0) * lam
        return Lout

    # -- directional second difference ---------------------------------------
    def _directional(self, U_safe, mask_old, x0, u_c, w, t_read, t_geo):
        h = self.h
        rho = self.m_pr * h
        nd = x0.shape[0]
        # both probe signs in one batch
        d2 = np.concatenate([rho * w, -rho * w])
        x2 = np.concatenate([x0, x0])
        tip = x2 + d2
        arm = np.full(2 * nd, rho)
        val = np.empty(2 * nd)
        if self.dom.section_exit is not None:
            # the analytic first crossing also catches hidden slivers
            s = self.dom.section_exit(x2, d2, t_geo)
            exited = s <= 1.0
            e = np.flatnonzero(exited)
            if e.size:
                se = np.clip(s[e], 0.0, 1.0)
                zeta = x2[e] + se[:, None] * d2[e]
                arm[e] = np.maximum(se * np.linalg.norm(d2[e], axis=1), h)
                val[e] = self._read_data(zeta, t_read)
        else:
            tq = np.full(2 * nd, t_geo)
            exited = ~self.dom.contains(tip, tq)
            if not self.dom.section_convex and self.m_pr > 1:
                # scan interior sample points for hidden exits (thin slivers)
                n_chk = min(self.m_pr, 8)
                for i in range(1, n_chk):
                    exited |= ~self.dom.contains(x2 + (i / n_chk) * d2, tq)
            e = np.flatnonzero(exited)
            if e.size:
                zeta, dist = self._exit_point(x2[e], d2[e], t_geo)
                arm[e] = np.maximum(dist, h)
                val[e] = self._read_data(zeta, t_read)
        ins = np.flatnonzero(~exited)
        if ins.size:
            val[ins] = self._interpolate(U_safe, mask_old, tip[ins], t_read, t_geo)
        a_p, a_m = arm[:nd], arm[nd:]
        v_p, v_m = val[:nd], val[nd:]
        return 2.0 * (a_m * v_p + a_p * v_m - (a_p + a_m) * u_c) / (a_p * a_m * (a_p + a_m))

    def _interpolate(self, U_safe, mask_old, tips, t_read, t_geo):
        """Multilinear slice interpolation; inactive corners read F at the
        projection of [tip -> corner]."""
        g = self.grid
        n = self.n
        ix, fx = [], []
        for ax in range(n):
            pos = (tips[:, ax] - g.axes[ax][0]) / self.h
            i = np.floor(pos).astype(np.int64)
            np.clip(i, 0, g.axes[ax].size - 2, out=i)
            f = np.clip(pos - i, 0.0, 1.0)
            f[f < 1e-9] = 0.0
            f[f > 1.0 - 1e-9] = 1.0
            ix.append(i)
            fx.append(f)
        if n == 1:
            base = ix[0]
            corner_flats = (base, base + 1)
            corner_wgts = (1.0 - fx[0], fx[0])
            corner_off = ((0,), (1,))
        else:
            base = ix[0] * g.shape[1] + ix[1]
            f0, f1 = fx[0], fx[1]
            corner_flats = (base, base + 1, base + g.shape[1], base + g.shape[1] + 1)
            corner_wgts = ((1 - f0) * (1 - f1), (1 - f0) * f1, f0 * (1 - f1), f0 * f1)
            corner_off = ((0, 0), (0, 1), (1, 0), (1, 1))
        # cells with all corners active need no substitution checks
        if self.dom.time_invariant_section:
            simple = self._get_cells_ok(mask_old)[base]
        else:
            simple = np.zeros(tips.shape[0], dtype=bool)

        out = np.zeros(tips.shape[0])
        hard = np.flatnonzero(~simple)
        for flat, wgt, off in zip(corner_flats, corner_wgts, corner_off):
            vals = U_safe[flat]
            if hard.size:
                need = (~mask_old[flat[hard]]) & (wgt[hard] > 1e-14)
                if np.any(need):
                    sub = hard[np.flatnonzero(need)]
                    cpos = np.stack([g.axes[ax][ix[ax][sub] + off[ax]]
                                     for ax in range(n)], axis=1)
                    zeta, _ = self._exit_point(tips[sub], cpos - tips[sub], t_geo)
                    vals = vals.copy()
                    vals[sub] = self._read_data(zeta, t_read)
            out += wgt * vals
        return out

    def _envelope_eig(self, U_safe, mask_old, flat_idx, xs, u_c, V, sub, t_read, t_geo):
        """Envelope eigenvalue of the discrete Hessian at gradient-flat nodes."""
        p = self.params.p
        h = self.h
        if self.n == 1:
            dxx = (V[(0, 1)][sub] - 2.0 * u_c + V[(0, -1)][sub]) / h**2
            return dxx
        dxx = (V[(0, 1)][sub] - 2.0 * u_c + V[(0, -1)][sub]) / h**2
        dyy = (V[(1, 1)][sub] - 2.0 * u_c + V[(1, -1)][sub]) / h**2
        dval = {}
        for s0 in (1, -1):
            for s1 in (1, -1):
                nbd = self.diag[(s0, s1)][flat_idx]
                safe = np.maximum(nbd, 0)
                valid = (nbd >= 0) & mask_old[safe]
                v = U_safe[safe]
                need = ~valid
                if np.any(need):
                    dvec = np.tile([s0 * h, s1 * h], (int(need.sum()), 1))
                    zeta, _ = self._exit_point(xs[need], dvec, t_geo)
                    v[need] = self._read_data(zeta, t_read)
                dval[(s0, s1)] = v
        dxy = (dval[(1, 1)] - dval[(1, -1)] - dval[(-1, 1)] + dval[(-1, -1)]) / (4 * h**2)
        mean = 0.5 * (dxx + dyy)
        rad = np.hypot(0.5 * (dxx - dyy), dxy)
        return mean - rad if p >= 2.0 else mean + rad


class GridFunction:
    """Solution values on the active lattice, with the data closure."""

    def __init__(self, grid: Grid, slices: dict[int, np.ndarray], F: DataFn,
                 params: SolverParams, data_min: float, data_max: float):
        self.grid = grid
        self.slices = slices
        self.F = F
        self.params = params
        self.data_min = data_min
        self.data_max = data_max
        self._kept = np.array(sorted(slices))

    def kept_slices(self) -> np.ndarray:
        return self._kept.copy()

    def values(self, m: int) -> np.ndarray:
        return self.slices[m].reshape(self.grid.shape)

    def time_of(self, m: int) -> float:
        return float(self.grid.times[m])

    def final(self) -> np.ndarray:
        return self.values(int(self._kept[-1]))

    def _spatial_interp(self, U: np.ndarray, x: np.ndarray) -> np.ndarray:
        g = self.grid
        n = g.n
        ix, fx = [], []
        for ax in range(n):
            pos = (x[:, ax] - g.axes[ax][0]) / g.h
            i = np.clip(np.floor(pos).astype(np.int64), 0, g.axes[ax].size - 2)
            ix.append(i)
            fx.append(np.clip(pos - i, 0.0, 1.0))
        corners = [(0,), (1,)] if n == 1 else [(0, 0), (0, 1), (1, 0), (1, 1)]
        num = np.zeros(x.shape[0])
        den = np.zeros(x.shape[0])
        for c in corners:
            if n == 1:
                flat = ix[0] + c[0]
                wgt = fx[0] if c[0] == 1 else 1.0 - fx[0]
            else:
                flat = (ix[0] + c[0]) * g.shape[1] + (ix[1] + c[1])
                w0 = fx[0] if c[0] == 1 else 1.0 - fx[0]
                w1 = fx[1] if c[1] == 1 else 1.0 - fx[1]
                wgt = w0 * w1
            v = U[flat]
            ok = ~np.isnan(v)
            num += np.where(ok, wgt * np.nan_to_num(v, nan=0.0), 0.0)
            den += np.where(ok, wgt, 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(den > 0, num / den, np.nan)

    def sample(self, x, t) -> np.ndarray:
        """Space-time interpolation of the stored slices at query points."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        kept_t = self.grid.times[self._kept]
        j = np.clip(np.searchsorted(kept_t, t) - 1, 0, kept_t.size - 2)
        t0, t1 = kept_t[j], kept_t[j + 1]
        lam = np.clip((t - t0) / (t1 - t0), 0.0, 1.0)
        out = np.empty(t.size)
        for jj in np.unique(j):
            pick = j == jj
            v0 = self._spatial_interp(self.slices[int(self._kept[jj])], x[pick])
            v1 = self._spatial_interp(self.slices[int(self._kept[jj + 1])], x[pick])
            both = ~np.isnan(v0) & ~np.isnan(v1)
            blend = np.where(both, (1 - lam[pick]) * np.nan_to_num(v0)
                             + lam[pick] * np.nan_to_num(v1),
                             np.where(np.isnan(v0), v1, v0))
            out[pick] = blend
        return out

    def range(self) -> tuple[float, float]:
        lo, hi = math.inf, -math.inf
        for U in self.slices.values():
            good = ~np.isnan(U)
            if np.any(good):
                lo = min(lo, float(np.min(U[good])))
                hi = max(hi, float(np.max(U[good])))
        return lo, hi


def step(u_slice: np.ndarray, grid: Grid, m: int, F: DataFn,
         params: SolverParams) -> np.ndarray:
    """One explicit update: slice m - 1 values to slice m values."""
    denom = 2.0 * (grid.n + abs(params.p - 2.0)) + 1.0
    if grid.dt > grid.h**2 / denom * (1.0 + 1e-12):
        raise CFLViolation(f"dt = {grid.dt} exceeds {grid.h**2 / denom}")
    st = _Stepper(grid, F, params)
    return st.advance(np.asarray(u_slice, dtype=float).ravel(), m).reshape(grid.shape)


def solve(dom: Domain, F: DataFn, params: SolverParams, h: float,
          dt: float | None = None, t_stop: float | None = None,
          keep: str | int = "auto", monitor=None) -> GridFunction:
    """March the scheme over the domain with boundary-data closure F.

    F must be defined on all of space-time (its restriction to the
    parabolic boundary is the Dirichlet data).  ``keep`` controls stored
    slices: "all", an integer stride, or "auto" (at most ~4096 slices).
    ``monitor(m, t, values, active_mask)`` is called per slice.

    Raises:
        EmptyDomain: if the grid has no active nodes at all.
        CFLViolation: if an explicit dt violates the monotonicity bound.
    """
    grid = make_grid(dom, h, params, dt=dt, t_stop=t_stop)
    return solve_on_grid(grid, F, params, keep=keep, monitor=monitor)


def solve_on_grid(grid: Grid, F: DataFn, params: SolverParams,
                  keep: str | int = "auto", monitor=None) -> GridFunction:
    """March the scheme on a pre-built grid (see :func:`solve`)."""
    st = _Stepper(grid, F, params)
    M = grid.n_slices - 1
    if keep == "all":
        stride = 1
    elif keep == "auto":
        stride = max(1, (M + 1) // 4096)
    else:
        stride = max(1, int(keep))

    mask0 = grid.mask(0)
    U = np.full(grid.points.shape[0], np.nan)
    if np.any(mask0):
        idx = np.flatnonzero(mask0)
        U[idx] = st._read_data(grid.points[idx], grid.times[0])
    slices = {0: U.copy()}
    if monitor is not None:
        monitor(0, grid.times[0], U, mask0)
    any_active = bool(np.any(mask0))
    for m in range(1, M + 1):
        U = st.advance(U, m)
        any_active = any_active or bool(np.any(grid.mask(m)))
        if m % stride == 0 or m == M:
            slices[m] = U.copy()
        if monitor is not None:
            monitor(m, grid.times[m], U, grid.mask(m))
    if not any_active:
        from .geometry import EmptyDomain

        raise EmptyDomain("no active lattice nodes; refine h or check the domain")
    if not math.isfinite(st.data_min):
        st.data_min, st.data_max = math.nan, math.nan
    return GridFunction(grid, slices, F, params, st.data_min, st.data_max)


def discrete_comparison(u: GridFunction, v: GridFunction) -> bool:
    """True iff u >= v at every stored active node of every stored slice."""
    gu, gv = u.grid, v.grid
    if (gu.h != gv.h or gu.dt != gv.dt or gu.shape != gv.shape
            or gu.times.size != gv.times.size
            or not np.array_equal(u.kept_slices(), v.kept_slices())):
        raise GridMismatch("grid functions are not on matching lattices")
    for m in u.slices:
        a, b = u.slices[m], v.slices[m]
        good = ~np.isnan(a) & ~np.isnan(b)
        if np.any(a[good] < b[good]):
            return False
    return True
