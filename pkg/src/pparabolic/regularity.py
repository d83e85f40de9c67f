"""Numerical boundary-regularity classification.

A boundary point xi0 is probed with the continuous data

    f(xi) = min(1, d_par(xi, xi0) / rho),   d_par = |x - x0| + |t - t0|^{1/2},

which vanishes exactly at xi0.  The numeric solution is solved on a
ladder of grids; for dyadic radii r the gap sup |u| over the part of the
parabolic neighbourhood B_r(x0) x (t0 - r^2, t0) before t0 measures how
well the boundary value is attained.  Gaps decreasing monotonically to
below ``theta_reg`` certify "regular", gaps pinned above ``theta_irr``
on the two finest grids certify "irregular", anything else is
"inconclusive".  Verdicts are numerical evidence, not proofs; near the
threshold A = 4(p-1) of the Petrovskii regions the log log separation is
far below desk-scale resolution and "inconclusive" is the honest answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Domain, SpacetimePoint, petrovskii
from .solver import GridFunction, SolverParams, make_grid, solve_on_grid

__all__ = [
    "NotABoundaryPoint",
    "InsufficientDecades",
    "RegularityReport",
    "probe_data",
    "classify",
    "fit_holder",
    "petrovskii_sweep",
    "THETA_REG",
    "THETA_IRR",
]

# verdict thresholds relative to the unit data range, frozen after the
# calibration runs on the catalogue cases
THETA_REG = 0.05
THETA_IRR = 0.25
# gaps "stay" above theta_irr only if the tail has stalled: mean decay
# factor per radius halving above this value (irregular cases sit at
# ~1.0, slowly-regular loglog cases at ~0.9 or below)
PLATEAU_RATIO = 0.97

_R_EXPONENTS = range(2, 9)  # dyadic radii r = 2^-k * parabolic diameter


class NotABoundaryPoint(ValueError):
    """The reference point is not on the boundary of the domain."""


class InsufficientDecades(RuntimeError):
    """Fewer than three usable radii for the log-log fit."""


@dataclass
class RegularityReport:
    """Verdict with the gap ladder and optional Hoelder fit."""

    verdict: str  # "regular" | "irregular" | "inconclusive"
    gaps: list[tuple[float, float]]
    holder: tuple[float, float, float] | None  # (beta, C, residual)
    resolutions: list[float]
    per_grid: list[dict]

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "gaps": [[r, g] for r, g in self.gaps],
            "holder": None if self.holder is None else
                {"beta": self.holder[0], "C": self.holder[1],
                 "residual": self.holder[2]},
            "resolutions": self.resolutions,
            "per_grid": self.per_grid,
        }


def probe_data(xi0: SpacetimePoint, rho: float):
    """Parabolic distance cone data, clipped at 1 and vanishing at xi0."""
    x0, t0 = xi0.x_array(), xi0.t

    def F(x, t):
        x = np.atleast_2d(x)
        d = np.linalg.norm(x - x0, axis=1) + np.sqrt(np.abs(t - t0))
        return np.minimum(1.0, d / rho)

    return F


def _check_boundary_point(dom: Domain, xi0: SpacetimePoint, seed: int = 0):
    if bool(dom.contains(xi0.x_array()[None, :], np.array([xi0.t]))[0]):
        raise NotABoundaryPoint("point is interior to the domain")
    rng = np.random.default_rng(seed)
    x0, t0 = xi0.x_array(), xi0.t
    scale = dom.bbox.parabolic_diameter
    for k in (6, 9, 12):
        r = scale * 2.0 ** (-k)
        x = x0 + rng.uniform(-r, r, size=(400, dom.n))
        t = t0 + rng.uniform(-r * r, r * r, size=400)
        if not np.any(dom.contains(x, t)):
            raise NotABoundaryPoint(
                f"no interior points within parabolic distance {r} of the point")


def _gap_ladder(dom: Domain, xi0: SpacetimePoint, p: float, h: float,
                rho: float, solver_params: SolverParams | None,
                probe=None):
    """Solve once and accumulate sup |u| over shrinking parabolic windows."""
    params = solver_params if solver_params is not None else SolverParams(p=p)
    x0, t0 = xi0.x_array(), xi0.t
    t_stop = min(t0, dom.bbox.t_hi) if t0 > dom.bbox.t_lo else dom.bbox.t_hi
    grid = make_grid(dom, h, params, t_stop=t_stop)
    scale = dom.bbox.parabolic_diameter
    radii = [scale * 2.0 ** (-k) for k in _R_EXPONENTS]
    dist = np.linalg.norm(grid.points - x0, axis=1)
    spatial = [np.flatnonzero(dist <= r) for r in radii]
    gaps = np.zeros(len(radii))
    counts = np.zeros(len(radii), dtype=np.int64)
    F = probe if probe is not None else probe_data(xi0, rho)

    def monitor(m, t, U, active):
        if t >= t0:
            return
        for i, r in enumerate(radii):
            if t <= t0 - r * r:
                continue
            idx = spatial[i]
            vals = U[idx]
            good = ~np.isnan(vals)
            cnt = int(np.count_nonzero(good))
            if cnt:
                gaps[i] = max(gaps[i], float(np.max(np.abs(vals[good]))))
                counts[i] += cnt

    solve_on_grid(grid, F, params, keep=grid.n_slices - 1, monitor=monitor)
    usable = counts > 0
    return [(float(r), float(g)) for r, g, u in zip(radii, gaps, usable) if u]


def _verdict_from_gaps(gaps, theta_reg: float, theta_irr: float) -> str:
    if len(gaps) < 4:
        return "inconclusive"
    vals = [g for _, g in gaps]
    tail = vals[-4:]
    monotone = all(tail[i + 1] <= tail[i] * (1.0 + 1e-9) for i in range(3))
    if monotone and vals[-1] < theta_reg:
        return "regular"
    stalled = tail[0] > 0 and (tail[-1] / tail[0]) ** (1.0 / 3.0) >= PLATEAU_RATIO
    if vals[-1] >= theta_irr and stalled:
        return "irregular"
    return "inconclusive"


def _fit_from_gaps(gaps, ceiling: float | None = None) -> tuple[float, float, float]:
    usable = [(r, g) for r, g in gaps if g > 0]
    if ceiling is not None:
        # leading radii pinned at the clipped data range carry no scaling
        # information; drop them (but keep at least three points)
        while len(usable) > 3 and usable[0][1] >= 0.9 * ceiling:
            usable.pop(0)
    if len(usable) < 3:
        raise InsufficientDecades(f"only {len(usable)} usable radii")
    lr = np.log([r for r, _ in usable])
    lg = np.log([g for _, g in usable])
    slope, intercept = np.polyfit(lr, lg, 1)
    resid = float(np.sqrt(np.mean((lg - (slope * lr + intercept)) ** 2)))
    return float(slope), float(math.exp(intercept)), resid


def classify(dom: Domain, xi0: SpacetimePoint, p: float, grid_ladder,
             theta_reg: float = THETA_REG, theta_irr: float = THETA_IRR,
             probe_rho: float | None = None, seed: int = 0,
             solver_params: SolverParams | None = None) -> RegularityReport:
    """Classify xi0 as regular / irregular / inconclusive.

    Solves the probe problem on each grid of the ladder (coarse to fine)
    and applies the verdict rule per grid; the final verdict stands only
    if the two finest grids agree, otherwise it degrades to
    "inconclusive".  Gaps are measured strictly before t0 (the future
    part of the domain cannot influence regularity at xi0).

    Raises:
        NotABoundaryPoint: if xi0 is interior or unreachable from inside.
    """
    _check_boundary_point(dom, xi0, seed=seed)
    rho = probe_rho if probe_rho is not None else dom.bbox.parabolic_diameter / 4.0
    ladder = sorted(grid_ladder, reverse=True)
    per_grid = []
    verdicts = []
    gaps_finest = []
    for h in ladder:
        gaps = _gap_ladder(dom, xi0, p, h, rho, solver_params)
        v = _verdict_from_gaps(gaps, theta_reg, theta_irr)
        per_grid.append({"h": h, "verdict": v, "gaps": [[r, g] for r, g in gaps]})
        verdicts.append(v)
        gaps_finest = gaps
    if len(verdicts) >= 2:
        verdict = verdicts[-1] if verdicts[-1] == verdicts[-2] else "inconclusive"
    else:
        verdict = verdicts[-1]
    holder = None
    if verdict == "regular":
        try:
            holder = _fit_from_gaps(gaps_finest, ceiling=1.0)
        except InsufficientDecades:
            holder = None
    return RegularityReport(verdict, gaps_finest, holder, list(ladder), per_grid)


def fit_holder(u: GridFunction, xi0: SpacetimePoint, f0: float):
    """Least-squares parabolic Hoelder fit of the boundary gap of a solution.

    Gathers sup |u - f0| over stored slices in the dyadic parabolic
    neighbourhoods of xi0 (before t0) and fits log gap against log r.
    Returns (beta, C, residual).

    Raises:
        InsufficientDecades: fewer than 3 radii carry data.
    """
    grid = u.grid
    x0, t0 = xi0.x_array(), xi0.t
    scale = grid.dom.bbox.parabolic_diameter
    radii = [scale * 2.0 ** (-k) for k in _R_EXPONENTS]
    dist = np.linalg.norm(grid.points - x0, axis=1)
    gaps = []
    for r in radii:
        idx = np.flatnonzero(dist <= r)
        best = 0.0
        seen = False
        for m in u.kept_slices():
            t = grid.times[m]
            if not (t0 - r * r < t < t0):
                continue
            vals = u.slices[int(m)][idx]
            good = ~np.isnan(vals)
            if np.any(good):
                seen = True
                best = max(best, float(np.max(np.abs(vals[good] - f0))))
        if seen:
            gaps.append((r, best))
    ceiling = max(abs(u.data_max - f0), abs(u.data_min - f0))
    if not math.isfinite(ceiling) or ceiling <= 0:
        ceiling = None
    return _fit_from_gaps(gaps, ceiling=ceiling)


def petrovskii_sweep(p: float, n: int, A_list, grid_ladder,
                     theta_reg: float = THETA_REG, theta_irr: float = THETA_IRR,
                     seed: int = 0, relative: bool = True) -> list[dict]:
    """Classify the Petrovskii last point for each A.

    Ladder entries are fractions of each region's spatial extent (the
    regions differ in width by sqrt(A)), unless ``relative`` is False.
    Rows carry the theoretical threshold 4(p-1) for reference.
    """
    threshold = 4.0 * (p - 1.0)
    rows = []
    for A in A_list:
        dom = petrovskii(A, n)
        width = float(dom.bbox.x_hi[0] - dom.bbox.x_lo[0])
        ladder = [width * g for g in grid_ladder] if relative else list(grid_ladder)
        rep = classify(dom, SpacetimePoint((0.0,) * n, 0.0), p, ladder,
                       theta_reg=theta_reg, theta_irr=theta_irr, seed=seed)
        final_gap = rep.gaps[-1][1] if rep.gaps else math.nan
        rows.append({"A": float(A), "verdict": rep.verdict,
                     "final_gap": final_gap, "threshold": threshold})
    return rows
