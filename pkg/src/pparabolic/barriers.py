"""Explicit barrier families with auto-tuned parameters and verification.

Three closed-form families are provided:

* exterior-ball barriers  w = exp(-j R1^2) - exp(-j R^2) with R the
  space-time distance to the ball centre; the steepness j is chosen so
  that the sign bracket  n+p-2 - 2j(p-1)|x-x1|^2 - (t-t1)  is nonpositive
  on a certified neighbourhood of the boundary point;
* the regular-side profile  u = -f(t) e^{|x|^2 / k|t|} + h(t)  with
  k = 4(p-1), a = (n+p-2)/k, f = |log|t||^{-a-1}, h = 2 |log|t||^{-a},
  which is a barrier for the region |x|^2 < A |t| log|log|t|| when A <= k;
* the irregularity profile with 4(p-1) < k < A, a = A/k - 1,
  b = 4(n+p-2)/k, c = k - 4(p-1), h = (2b/a) |log|t||^{-a/2}, which is
  subparabolic near the last point when A > 4(p-1) and forces the
  boundary limit -1 while the axis limit is 0.

Verification is sample-based: residual signs are checked through exact
jets and the operator module, positivity on boundary-adjacent samples,
and the vanishing limit at the distinguished point across a dyadic
squeeze of parabolic neighbourhoods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import fields
from .fields import Field
from .geometry import (Domain, SpacetimePoint, ball_complement, parabolic_boundary_sample,
                       petrovskii, point, scale_domain, tusk_closure_contains, tusk_house)
from .operator import CheckReport, OperatorParams, classical_subsolution_check, \
    classical_supersolution_check
from .sampling import SampleSet, build_sample_set

__all__ = [
    "GeometryViolation",
    "RadiusTooSmall",
    "NoAdmissibleTau",
    "ResolutionTooCoarse",
    "ExteriorBallBarrier",
    "PetrovskiiBarrier",
    "IrregularityBarrier",
    "TuskHouseBarrierSpec",
    "BarrierReport",
    "IrregularityReport",
    "make_exterior_ball_barrier",
    "make_petrovskii_barrier",
    "make_irregularity_barrier",
    "verify_barrier",
    "verify_irregularity_barrier",
    "estimate_alpha_and_beta",
    "pasted_min_supersolution_check",
]


class GeometryViolation(ValueError):
    """The prescribed ball does not touch the boundary point."""


class RadiusTooSmall(ValueError):
    """North-pole contact needs radius R1 > n + p - 2."""


class NoAdmissibleTau(RuntimeError):
    """No certified time depth found above the search floor."""


class ResolutionTooCoarse(RuntimeError):
    """The numeric contraction factor did not separate from 1."""


# ---------------------------------------------------------------------------
# exterior-ball barriers


@dataclass(frozen=True)
class ExteriorBallBarrier:
    """w = exp(-j R1^2) - exp(-j R^2), certified on a delta-neighbourhood."""

    xi0: SpacetimePoint
    xi1: SpacetimePoint
    R1: float
    j: float
    delta: float
    n: int
    p: float
    north_pole: bool

    @property
    def field(self) -> Field:
        rsq = fields.constant(0.0, self.n)
        for i in range(self.n):
            d = fields.coordinate(i, self.n) - self.xi1.x[i]
            rsq = rsq + d * d
        dt = fields.time_coordinate(self.n) - self.xi1.t
        rsq = rsq + dt * dt
        return math.exp(-self.j * self.R1**2) - fields.exp(-self.j * rsq)

    def verification_domain(self, enlarge: float = 1.25) -> Domain:
        """Neighbourhood of xi0 minus an enlarged ball tangent at xi0.

        Enlarging the excluded ball (same tangent point) makes xi0 the
        only contact point of the sphere with the closure, so the barrier
        is strictly positive on the rest of the boundary.
        """
        x0, t0 = self.xi0.x_array(), self.xi0.t
        x1, t1 = self.xi1.x_array(), self.xi1.t
        c = np.concatenate([x0 + enlarge * (x1 - x0), [t0 + enlarge * (t1 - t0)]])
        return ball_complement(c, enlarge * self.R1,
                               np.concatenate([x0, [t0]]), self.delta)


def make_exterior_ball_barrier(xi0: SpacetimePoint, xi1: SpacetimePoint, R1: float,
                               n: int, p: float, safety: float = 1.1) -> ExteriorBallBarrier:
    """Tune the steepness j and the certified radius delta for an exterior ball.

    With x1 != x0 the neighbourhood radius is delta = |x1 - x0| / 2 and j
    is the smallest value making the sign bracket nonpositive there,
    times ``safety``.  At the north pole (xi1 directly below xi0) any j
    works provided R1 > n + p - 2.

    Raises:
        GeometryViolation: if |xi0 - xi1| != R1 (within 1e-9).
        RadiusTooSmall: north-pole contact with R1 <= n + p - 2.
    """
    R1 = float(R1)
    x0, t0 = xi0.x_array(), xi0.t
    x1, t1 = xi1.x_array(), xi1.t
    dist = math.hypot(float(np.linalg.norm(x1 - x0)), t1 - t0)
    if abs(dist - R1) > 1e-9:
        raise GeometryViolation(f"|xi0 - xi1| = {dist} but R1 = {R1}")
    dx = float(np.linalg.norm(x1 - x0))
    if dx > 0.0:
        delta = dx / 2.0
        j = safety * (n + p - 2.0 + abs(t1 - t0) + delta) / (2.0 * (p - 1.0) * delta**2)
        return ExteriorBallBarrier(xi0, xi1, R1, j, delta, n, p, north_pole=False)
    if t1 >= t0:
        raise GeometryViolation("spatially centred ball must sit below xi0")
    if R1 <= n + p - 2.0:
        raise RadiusTooSmall(
            f"north-pole contact needs R1 > n+p-2 = {n + p - 2.0}, got {R1}")
    delta = (R1 - (n + p - 2.0)) / 2.0
    return ExteriorBallBarrier(xi0, xi1, R1, 1.0, delta, n, p, north_pole=True)


# ---------------------------------------------------------------------------
# Petrovskii-type profiles


def _squeeze_profile(n: int, k: float, f: Field, h: Field) -> Field:
    """-f(t) exp(|x|^2 / (k |t|)) + h(t) as an exact field (|t| = -t)."""
    tv = fields.time_coordinate(n)
    s = fields.radius_sq(n) / (k * (-tv))
    return -f * fields.exp(s) + h


@dataclass(frozen=True)
class PetrovskiiBarrier:
    """Regular-side barrier: k = 4(p-1), a = (n+p-2)/k."""

    n: int
    p: float
    k: float
    a: float
    f: Field = dataclass_field(repr=False)
    h: Field = dataclass_field(repr=False)
    field: Field = dataclass_field(repr=False)

    def positivity_bound(self, t: np.ndarray) -> np.ndarray:
        """|x|^2 bound below which the barrier is positive: k|t|(log|log|t|| + log 2)."""
        s = -np.asarray(t, dtype=float)
        return self.k * s * (np.log(np.log(1.0 / s)) + math.log(2.0))


def make_petrovskii_barrier(n: int, p: float) -> PetrovskiiBarrier:
    k = 4.0 * (p - 1.0)
    a = (n + p - 2.0) / k
    L = fields.abs_log_abs_time(n)
    f = L ** (-a - 1.0)
    h = 2.0 * L ** (-a)
    return PetrovskiiBarrier(n, p, k, a, f, h, _squeeze_profile(n, k, f, h))


@dataclass(frozen=True)
class IrregularityBarrier:
    """Irregularity profile for A > 4(p-1): 4(p-1) < k < A."""

    n: int
    p: float
    A: float
    k: float
    a: float
    b: float
    c: float
    f: Field = dataclass_field(repr=False)
    h: Field = dataclass_field(repr=False)
    field: Field = dataclass_field(repr=False)

    def h_values(self, t: np.ndarray) -> np.ndarray:
        L = -np.log(-np.asarray(t, dtype=float))
        return (2.0 * self.b / self.a) * L ** (-self.a / 2.0)


def make_irregularity_barrier(n: int, p: float, A: float,
                              k: float | None = None) -> IrregularityBarrier:
    """Profile witnessing irregularity; requires A > 4(p-1).

    The default k is the midpoint of (4(p-1), A), which balances the
    slack in the two strict inequalities the construction needs.
    """
    thr = 4.0 * (p - 1.0)
    if A <= thr:
        raise ValueError(f"irregularity barrier needs A > 4(p-1) = {thr}, got A = {A}")
    if k is None:
        k = 0.5 * (thr + A)
    if not thr < k < A:
        raise ValueError(f"need 4(p-1) < k < A, got k = {k}")
    a = A / k - 1.0
    b = 4.0 * (n + p - 2.0) / k
    c = k - thr
    L = fields.abs_log_abs_time(n)
    f = L ** (-a - 1.0)
    h = (2.0 * b / a) * L ** (-a / 2.0)
    return IrregularityBarrier(n, p, A, k, a, b, c, f, h, _squeeze_profile(n, k, f, h))


# ---------------------------------------------------------------------------
# verification


@dataclass
class BarrierReport:
    """Three-part verdict: residual sign, positivity, vanishing limit."""

    passed: bool
    supersolution: CheckReport
    positivity_passed: bool
    min_boundary_value: float
    limit_passed: bool
    limit_gaps: list[tuple[float, float]]
    meta: dict

    def to_json_dict(self) -> dict:
        return {
            "pass": self.passed,
            "supersolution": self.supersolution.to_json_dict(),
            "positivity": {"pass": self.positivity_passed,
                           "min_boundary_value": self.min_boundary_value},
            "limit": {"pass": self.limit_passed,
                      "gaps": [[r, g] for r, g in self.limit_gaps]},
            "meta": self.meta,
        }


def _limit_gaps(field_u: Field, dom: Domain, xi0: SpacetimePoint, seed: int,
                k_range=range(3, 11), per_ring: int = 400) -> list[tuple[float, float]]:
    """max |u| over domain samples in B_r(x0) x (t0 - r^2, t0 + r^2), dyadic r."""
    rng = np.random.default_rng(seed)
    x0, t0 = xi0.x_array(), xi0.t
    scale = dom.bbox.parabolic_diameter
    gaps = []
    for kk in k_range:
        r = scale * 2.0 ** (-kk)
        lo = np.concatenate([np.maximum(x0 - r, dom.bbox.x_lo),
                             [max(t0 - r * r, dom.bbox.t_lo)]])
        hi = np.concatenate([np.minimum(x0 + r, dom.bbox.x_hi),
                             [min(t0 + r * r, dom.bbox.t_hi)]])
        if np.any(lo >= hi):
            continue
        pts_x, pts_t, have = [], [], 0
        for _ in range(60):
            m = 4 * per_ring
            cand = rng.uniform(lo, hi, size=(m, dom.n + 1))
            x, t = cand[:, :-1], cand[:, -1]
            keep = (np.linalg.norm(x - x0, axis=1) < r) & dom.contains(x, t)
            pts_x.append(x[keep])
            pts_t.append(t[keep])
            have += int(np.count_nonzero(keep))
            if have >= per_ring:
                break
        if have == 0:
            continue
        x = np.concatenate(pts_x)[:per_ring]
        t = np.concatenate(pts_t)[:per_ring]
        gaps.append((r, float(np.max(np.abs(field_u.value(x, t))))))
    return gaps


def verify_barrier(field_u: Field, dom: Domain, xi0: SpacetimePoint,
                   params: OperatorParams, sampler: SampleSet | None = None,
                   slack: float = 1e-8, seed: int = 0,
                   n_boundary: int = 800) -> BarrierReport:
    """Check the three defining barrier conditions by sampling.

    (i) the classical supersolution residual is >= -slack on interior
    samples; (ii) the field is positive on the domain and on boundary
    samples away from xi0; (iii) max |u| over parabolic neighbourhoods of
    xi0 decreases monotonically along a dyadic radius sequence.
    """
    if sampler is None:
        sampler = build_sample_set(dom, seed=seed, x_axis=xi0.x_array(),
                                   t_anchor=xi0.t)
    check = classical_supersolution_check(field_u, dom, params,
                                          (sampler.x, sampler.t), slack=slack)

    x0, t0 = xi0.x_array(), xi0.t
    scale = dom.bbox.parabolic_diameter
    excl = scale * 2.0 ** (-10)
    bpts = parabolic_boundary_sample(dom, n_boundary, seed=seed + 7)
    bx = np.array([q.x for q in bpts])
    bt = np.array([q.t for q in bpts])
    dpar = np.linalg.norm(bx - x0, axis=1) + np.sqrt(np.abs(bt - t0))
    keep = dpar > excl
    vals = [field_u.value(bx[keep], bt[keep])] if np.any(keep) else []
    interior_vals = field_u.value(sampler.x, sampler.t)
    vals.append(interior_vals)
    min_val = float(min(np.min(v) for v in vals if v.size))
    positivity = min_val > 0.0

    gaps = _limit_gaps(field_u, dom, xi0, seed + 13)
    gvals = [g for _, g in gaps]
    limit_ok = len(gaps) >= 4 and all(
        gvals[i + 1] <= gvals[i] * (1.0 + 1e-12) for i in range(len(gvals) - 1))

    return BarrierReport(bool(check.passed and positivity and limit_ok), check,
                         positivity, min_val, limit_ok, gaps,
                         {"n_interior": int(sampler.count), "n_boundary": int(len(bpts)),
                          "slack": slack})


@dataclass
class IrregularityReport:
    """Certified time depth and the sign conditions behind it."""

    passed: bool
    tau: float
    condition_a: bool            # (a+1)/|log|t|| <= b/2 on (-tau, 0)
    condition_b: bool            # squeeze inequality on samples (exact form)
    condition_c: bool            # axis u_t < 0 on (-tau, 0)
    strict_bracket_ok: bool      # the stronger per-case bound (diagnostic only)
    n_case_small: int
    n_case_large: int
    subsolution: CheckReport
    boundary_identity_dev: float
    axis_limit: list[tuple[float, float]]
    boundary_limit: list[tuple[float, float]]
    meta: dict

    def to_json_dict(self) -> dict:
        return {
            "pass": self.passed,
            "tau": self.tau,
            "conditions": {"a": self.condition_a, "b": self.condition_b,
                           "c": self.condition_c,
                           "strict_bracket": self.strict_bracket_ok,
                           "n_case_small": self.n_case_small,
                           "n_case_large": self.n_case_large},
            "subsolution": self.subsolution.to_json_dict(),
            "boundary_identity_dev": self.boundary_identity_dev,
            "axis_limit": [[t, v] for t, v in self.axis_limit],
            "boundary_limit": [[t, v] for t, v in self.boundary_limit],
            "meta": self.meta,
        }


def _bracket_min(bar: IrregularityBarrier, L: float, grid: int = 4000) -> float:
    """min over 0 <= s < (a+1) log L of  c s / k + b e^{-s} L^{a/2}."""
    s = np.linspace(0.0, (bar.a + 1.0) * math.log(L), grid)
    g = bar.c * s / bar.k + bar.b * np.exp(-s) * L ** (bar.a / 2.0)
    return float(np.min(g))


def verify_irregularity_barrier(bar: IrregularityBarrier, dom: Domain,
                                params: OperatorParams | None = None,
                                seed: int = 0, tau_floor: float = 1e-6,
                                n_domain: int = 6000, n_axis: int = 800,
                                n_band: int = 800) -> IrregularityReport:
    """Find a certified depth tau by halving and verify the sign conditions.

    Halving from 1/3, tau is accepted once, for all -tau < t < 0 with
    L = |log|t||: (a) (a+1)/L <= b/2; (b) the squeeze inequality
    c|x|^2/(k^2|t|) + b e^{-|x|^2/k|t|} L^{a/2} >= b/2 + (a+1)/L holds at
    every sample, which is exactly the subparabolicity bracket; and (c)
    u_t(0, t) = h'(t) - f'(t) < 0.  The literal two-case bound (the
    right-hand side b instead of b/2 + (a+1)/L) is reported as a
    diagnostic: its large-|x| case needs astronomically small |t| for
    some (p, n, A) even though the profile is already subparabolic, so it
    does not gate the verdict.  Samples are tagged by the case split at
    |x|^2 = (a k / 2) |t| log L.

    Raises:
        NoAdmissibleTau: if no tau above ``tau_floor`` satisfies the
            analytic worst-case conditions.
        ValueError: if the domain is not the matching Petrovskii region.
    """
    if params is None:
        params = OperatorParams(p=bar.p)
    if dom.kind != "petrovskii" or abs(dom.params["A"] - bar.A) > 1e-12 \
            or dom.params["n"] != bar.n:
        raise ValueError("domain must be the Petrovskii region matching the barrier")

    a, b, c, k = bar.a, bar.b, bar.c, bar.k
    tau = 1.0 / 3.0
    found = None
    while tau >= tau_floor:
        L = -math.log(tau)
        ok_a = (a + 1.0) / L <= b / 2.0
        ok_c = (a + 1.0) / L < b * L ** (a / 2.0)
        ok_b = _bracket_min(bar, L) >= b / 2.0 + (a + 1.0) / L
        if ok_a and ok_b and ok_c:
            found = tau
            break
        tau *= 0.5
    if found is None:
        raise NoAdmissibleTau(f"no admissible tau above {tau_floor} "
                              f"for (p, n, A, k) = {(bar.p, bar.n, bar.A, bar.k)}")
    tau = found

    sampler = build_sample_set(dom, n_domain=n_domain, n_axis=n_axis, n_band=n_band,
                               seed=seed, t_window=(-tau, 0.0), t_anchor=0.0)
    x, t = sampler.x, sampler.t
    s_abs = -t
    L = -np.log(s_abs)
    s = np.sum(x * x, axis=1) / (k * s_abs)
    case_small = s <= 0.5 * a * np.log(L)
    g = c * s / k + b * np.exp(-s) * L ** (a / 2.0)
    exact_ok = g >= b / 2.0 + (a + 1.0) / L - 1e-12
    condition_b = bool(np.all(exact_ok))
    strict_ok = bool(np.all(np.where(case_small,
                                     b * np.exp(-s) * L ** (a / 2.0) >= b * (1 - 1e-12),
                                     g >= b * (1 - 1e-12))))
    condition_a = bool(np.all((a + 1.0) / L <= b / 2.0 + 1e-15))

    # axis time-derivative sign, u_t(0, t) = h'(t) - f'(t)
    t_ax = -tau * 2.0 ** (-np.linspace(0.0, 18.0, 40))
    L_ax = -np.log(-t_ax)
    u_t_axis = (L_ax ** (-a - 1.0) / (-t_ax)) * ((a + 1.0) / L_ax - b * L_ax ** (a / 2.0))
    condition_c = bool(np.all(u_t_axis < 0.0))

    # operator-route cross check of subparabolicity on the same samples
    sub = classical_subsolution_check(bar.field, dom, params, (x, t), slack=1e-9)

    # boundary identity u = h(t) - 1 on the lateral boundary
    t_b = -np.exp(np.linspace(math.log(1.0 / 3.0) - 1e-9, math.log(1e-7), 200))
    L_b = -np.log(-t_b)
    r_b = np.sqrt(bar.A * (-t_b) * np.log(L_b))
    if bar.n == 1:
        xb = r_b[:, None]
    else:
        ang = np.random.default_rng(seed + 3).uniform(0, 2 * math.pi, t_b.size)
        xb = np.stack([r_b * np.cos(ang), r_b * np.sin(ang)], axis=1)
    u_b = bar.field.value(xb, t_b)
    identity_dev = float(np.max(np.abs(u_b - (bar.h_values(t_b) - 1.0))))

    # limits: axis value -> 0 and boundary value -> -1 (monotone tails)
    t_seq = -tau * 2.0 ** (-np.arange(0, 22, 2, dtype=float))
    ax_val = np.abs(bar.field.value(np.zeros((t_seq.size, bar.n)), t_seq))
    axis_limit = list(zip(t_seq.tolist(), ax_val.tolist()))
    axis_ok = bool(np.all(np.diff(ax_val) <= 1e-12)) and ax_val[-1] < ax_val[0]
    L_seq = -np.log(-t_seq)
    bnd_dev = np.abs(bar.h_values(t_seq))  # |u - (-1)| = h on the lateral boundary
    boundary_limit = list(zip(t_seq.tolist(), bnd_dev.tolist()))
    bnd_ok = bool(np.all(np.diff(bnd_dev) <= 1e-12)) and bnd_dev[-1] < bnd_dev[0]

    passed = (condition_a and condition_b and condition_c and sub.passed
              and identity_dev <= 1e-10 and axis_ok and bnd_ok)
    return IrregularityReport(bool(passed), tau, condition_a, condition_b, condition_c,
                              strict_ok, int(np.count_nonzero(case_small)),
                              int(np.count_nonzero(~case_small)), sub, identity_dev,
                              axis_limit, boundary_limit,
                              {"p": bar.p, "n": bar.n, "A": bar.A, "k": bar.k,
                               "n_samples": int(t.size)})


# ---------------------------------------------------------------------------
# tusk-house barrier: numeric contraction factor and Hoelder exponent


@dataclass(frozen=True)
class TuskHouseBarrierSpec:
    """Geometry of the tusk-house boundary-value problem (tusk depth 1)."""

    xhat: tuple[float, ...]
    R: float
    R0: float

    def domain(self) -> Domain:
        return tusk_house(self.xhat, self.R, self.R0)

    def boundary_data(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """-t on the tusk boundary, 1 on the rest of the house boundary."""
        on_tusk = tusk_closure_contains(np.asarray(self.xhat), self.R, 1.0,
                                        np.atleast_2d(x), np.atleast_1d(t))
        return np.where(on_tusk, -np.atleast_1d(t), 1.0)


def estimate_alpha_and_beta(spec: TuskHouseBarrierSpec, solver_resolution: float,
                            p: float = 2.0, seed: int = 0,
                            n_k_samples: int = 600):
    """Numeric contraction factor alpha and Hoelder exponent of the tusk house.

    Solves the boundary-value problem with data -t on the tusk and 1
    elsewhere, samples the numeric solution over the compact set
    K = closure(boundary of the half-scaled domain minus the tusk), and
    returns (alpha, beta, info) with alpha = max(alpha_1, 1/4) and
    beta = -log(alpha) / log 2.

    Raises:
        ResolutionTooCoarse: if alpha_1 >= 1 - 2 * solver_resolution.
    """
    from .solver import SolverParams, solve

    dom = spec.domain()
    params = SolverParams(p=p)
    gf = solve(dom, spec.boundary_data, params, h=solver_resolution,
               t_stop=0.27, keep="all")

    half = scale_domain(dom, 2.0, 1)
    pts = parabolic_boundary_sample(half, 3 * n_k_samples, seed=seed)
    bx = np.array([q.x for q in pts])
    bt = np.array([q.t for q in pts])
    # drop the tusk portion of the boundary (K excludes it); inflate the
    # closed tusk slightly so bisection round-off cannot leak points in
    xhat = np.asarray(spec.xhat, dtype=float)
    near_tusk = tusk_closure_contains(xhat, spec.R * (1.0 + 1e-6) + 1e-9, 1.0, bx, bt)
    keep = ~near_tusk
    bx, bt = bx[keep][:n_k_samples], bt[keep][:n_k_samples]
    if bt.size == 0:
        raise RuntimeError("no K samples found on the half-scaled boundary")
    vals = gf.sample(bx, bt)
    alpha1 = float(np.nanmax(vals))
    if alpha1 >= 1.0 - 2.0 * solver_resolution:
        raise ResolutionTooCoarse(f"alpha_1 = {alpha1} too close to 1 at h = {solver_resolution}")
    alpha = max(alpha1, 0.25)
    beta = -math.log(alpha) / math.log(2.0)
    info = {"alpha1": alpha1, "n_K": int(bt.size), "h": solver_resolution}
    return alpha, beta, info


def pasted_min_supersolution_check(field_u: Field, cap: float, dom: Domain,
                                   params: OperatorParams, samples,
                                   slack: float = 0.0) -> CheckReport:
    """Supersolution check of min(u, cap) across the pasting interface.

    Where u < cap the jet of u is used; elsewhere the constant branch
    applies (zero derivatives pass the gradient-zero criterion).  The
    interface itself has sample measure zero.
    """
    x = np.atleast_2d(np.asarray(samples[0], dtype=float)) if isinstance(samples, tuple) \
        else np.array([q.x for q in samples])
    t = np.atleast_1d(np.asarray(samples[1], dtype=float)) if isinstance(samples, tuple) \
        else np.array([q.t for q in samples])
    vals = field_u.value(x, t)
    low = vals < cap
    if np.any(low):
        rep = classical_supersolution_check(field_u, dom, params, (x[low], t[low]),
                                            slack=slack)
    else:
        rep = classical_supersolution_check(field_u, dom, params,
                                            (x[:0], t[:0]), slack=slack)
    # constant branch: dt = 0 >= -slack with PSD zero Hessian, always passes
    counts = dict(rep.branch_counts)
    counts["grad_zero_psd"] += int(np.count_nonzero(~low))
    return CheckReport(rep.passed, int(t.size), rep.worst_residual, rep.worst_point,
                       counts, rep.n_failed, None)
