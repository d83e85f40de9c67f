"""Bounded open space-time domains described by membership predicates.

Points in R^{n+1} are written xi = (x, t) with x in R^n (n = 1 or 2) and
t in R.  A :class:`Domain` is an open bounded set given by a vectorized
membership predicate plus an axis-aligned bounding box.  Boundaries are
implicit: they are located by bisection along segments, never meshed.

The constructor catalogue covers space-time cylinders over boxes and
balls, tusks and tusk complements, the "tusk house" used to certify the
tusk condition, Petrovskii regions ``|x|^2 < A|t| log|log|t||``, ball
complements, geometric ellipse chains, wedge cylinders and generic
user-supplied predicates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

__all__ = [
    "EmptyDomain",
    "SpacetimePoint",
    "BoundingBox",
    "Domain",
    "point",
    "membership",
    "interior_point",
    "project_to_boundary",
    "parabolic_boundary_sample",
    "parabolic_scale",
    "scale_domain",
    "cylinder",
    "cylinder_ball",
    "tusk",
    "tusk_complement",
    "tusk_house",
    "tusk_closure_contains",
    "petrovskii",
    "petrovskii_halfwidth",
    "ball_complement",
    "ellipse_chain",
    "wedge_cylinder",
    "generic",
    "domain_from_json",
    "domain_to_json",
]


class EmptyDomain(RuntimeError):
    """No interior point was found after exhaustive sampling."""


@dataclass(frozen=True)
class SpacetimePoint:
    """A point xi = (x, t) with x in R^n and t in R."""

    x: tuple[float, ...]
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(c) for c in self.x))
        object.__setattr__(self, "t", float(self.t))
        if len(self.x) not in (1, 2):
            raise ValueError(f"spatial dimension must be 1 or 2, got {len(self.x)}")
        if not all(math.isfinite(c) for c in self.x) or not math.isfinite(self.t):
            raise ValueError("coordinates must be finite")

    @property
    def n(self) -> int:
        return len(self.x)

    def x_array(self) -> np.ndarray:
        return np.asarray(self.x, dtype=float)


def point(x, t: float) -> SpacetimePoint:
    """Build a SpacetimePoint from a scalar or sequence ``x`` and time ``t``."""
    if np.isscalar(x):
        return SpacetimePoint((float(x),), t)
    return SpacetimePoint(tuple(np.asarray(x, dtype=float).ravel()), t)


@dataclass(frozen=True, eq=False)
class BoundingBox:
    """Axis-aligned bounding box in R^{n+1}."""

    x_lo: np.ndarray
    x_hi: np.ndarray
    t_lo: float
    t_hi: float

    def __post_init__(self):
        object.__setattr__(self, "x_lo", np.atleast_1d(np.asarray(self.x_lo, dtype=float)))
        object.__setattr__(self, "x_hi", np.atleast_1d(np.asarray(self.x_hi, dtype=float)))
        object.__setattr__(self, "t_lo", float(self.t_lo))
        object.__setattr__(self, "t_hi", float(self.t_hi))
        if np.any(self.x_lo >= self.x_hi) or self.t_lo >= self.t_hi:
            raise ValueError("bounding box must have positive extents")

    @property
    def n(self) -> int:
        return self.x_lo.size

    def contains(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        inside = np.all((x > self.x_lo) & (x < self.x_hi), axis=1)
        return inside & (t > self.t_lo) & (t < self.t_hi)

    @property
    def spatial_diameter(self) -> float:
        return float(np.linalg.norm(self.x_hi - self.x_lo))

    @property
    def parabolic_diameter(self) -> float:
        """Spatial diameter plus the square root of the time extent."""
        return self.spatial_diameter + math.sqrt(self.t_hi - self.t_lo)


# membership predicates receive x with shape (N, n) and t with shape (N,)
MembershipFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Domain:
    """Open bounded space-time set with implicit boundary.

    Membership is false outside ``bbox`` by construction.
    ``section_convex`` marks domains whose fixed-time spatial sections
    are convex (within-slice segments between interior points stay
    interior); ``time_invariant_section`` marks cylinders whose section
    does not change with t.  The solver exploits both, and uses
    ``section_exit`` (when present) as a closed-form substitute for
    boundary bisection within a slice.
    """

    kind: str
    params: dict
    bbox: BoundingBox
    predicate: MembershipFn
    section_convex: bool = False
    time_invariant_section: bool = False
    # analytic first-exit fraction of the spatial segment x -> x + d at time t
    section_exit: Callable[[np.ndarray, np.ndarray, float], np.ndarray] | None = None
    # spatial section when it is exactly an axis box (enables fast kernels)
    section_box: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def n(self) -> int:
        return self.bbox.n

    def contains(self, x, t) -> np.ndarray:
        """Vectorized open-set membership for x of shape (N, n), t of shape (N,)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        inside = self.bbox.contains(x, t)
        if np.any(inside):
            sub = self.predicate(x[inside], t[inside])
            out = np.zeros(t.shape, dtype=bool)
            out[inside] = sub
            return out
        return inside


def membership(dom: Domain, xi: SpacetimePoint) -> bool:
    """True iff xi lies in the open set; boundary points return False."""
    return bool(dom.contains(xi.x_array()[None, :], np.array([xi.t]))[0])


# ---------------------------------------------------------------------------
# constructors


def _ray_ball_exit(x: np.ndarray, d: np.ndarray, center: np.ndarray,
                   radius) -> np.ndarray:
    """Smallest s > 0 with |x + s d - center| = radius (x inside assumed)."""
    q = x - center
    a = np.sum(d * d, axis=1)
    b = np.sum(q * d, axis=1)
    c = np.sum(q * q, axis=1) - radius**2
    disc = np.maximum(b * b - a * c, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (-b + np.sqrt(disc)) / a
    return np.where(a > 0, s, np.inf)


def _ray_ball_entry(x: np.ndarray, d: np.ndarray, center: np.ndarray,
                    radius) -> np.ndarray:
    """Smallest s > 0 with x + s d entering the closed ball, inf if it misses."""
    q = x - center
    a = np.sum(d * d, axis=1)
    b = np.sum(q * d, axis=1)
    c = np.sum(q * q, axis=1) - radius**2
    disc = b * b - a * c
    out = np.full(a.shape, np.inf)
    ok = (disc > 0) & (a > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (-b - np.sqrt(np.maximum(disc, 0.0))) / a
    hit = ok & (s > 0)
    out[hit] = s[hit]
    # start already inside the closed ball
    out[c <= 0] = 0.0
    return out


def cylinder(lo, hi, t1: float, t2: float) -> Domain:
    """Space-time box Q x (t1, t2) with spatial box Q = (lo, hi)."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    bbox = BoundingBox(lo, hi, t1, t2)

    def pred(x, t):
        return np.all((x > lo) & (x < hi), axis=1)

    def exit_dist(x, d, t):
        # smallest s > 0 with x + s*d on a face of the box
        with np.errstate(divide="ignore", invalid="ignore"):
            s_hi = np.where(d > 0, (hi - x) / d, np.inf)
            s_lo = np.where(d < 0, (lo - x) / d, np.inf)
        return np.minimum(s_hi.min(axis=1), s_lo.min(axis=1))

    return Domain("cylinder", {"lo": lo.tolist(), "hi": hi.tolist(), "t1": t1, "t2": t2},
                  bbox, pred, section_convex=True, time_invariant_section=True,
                  section_exit=exit_dist, section_box=(lo, hi))


def cylinder_ball(center, radius: float, t1: float, t2: float) -> Domain:
    """Space-time cylinder B(center, radius) x (t1, t2)."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    radius = float(radius)
    bbox = BoundingBox(center - radius, center + radius, t1, t2)

    def pred(x, t):
        return np.sum((x - center) ** 2, axis=1) < radius**2

    def exit_dist(x, d, t):
        return _ray_ball_exit(x, d, center, radius)

    return Domain("cylinder_ball", {"center": center.tolist(), "radius": radius,
                                    "t1": t1, "t2": t2},
                  bbox, pred, section_convex=True, time_invariant_section=True,
                  section_exit=exit_dist)


def _tusk_pred(xhat: np.ndarray, R: float, T: float, closed: bool):
    def pred(x, t):
        neg_t = -t
        ok = (t > -T) & (t < 0)
        if closed:
            ok = (t >= -T) & (t <= 0)
        root = np.sqrt(np.maximum(neg_t, 0.0))
        dist2 = np.sum((x - root[:, None] * xhat) ** 2, axis=1)
        if closed:
            return ok & (dist2 <= R**2 * np.maximum(neg_t, 0.0))
        return ok & (dist2 < R**2 * neg_t)
    return pred


def tusk(xhat, R: float, T: float = 1.0) -> Domain:
    """The open tusk {(x,t): -T < t < 0, |x - sqrt(-t) xhat|^2 < R^2 (-t)}."""
    xhat = np.atleast_1d(np.asarray(xhat, dtype=float))
    R, T = float(R), float(T)
    w = (np.abs(xhat) + R) * math.sqrt(T)
    bbox = BoundingBox(-w, w, -T, 0.0)

    def exit_dist(x, d, t):
        root = math.sqrt(max(-t, 0.0))
        return _ray_ball_exit(x, d, root * xhat, R * root)

    return Domain("tusk", {"xhat": xhat.tolist(), "R": R, "T": T}, bbox,
                  _tusk_pred(xhat, R, T, closed=False),
                  section_convex=True, section_exit=exit_dist)


def tusk_closure_contains(xhat, R: float, T: float, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Vectorized membership in the closed tusk (used for complements and data)."""
    xhat = np.atleast_1d(np.asarray(xhat, dtype=float))
    return _tusk_pred(xhat, float(R), float(T), closed=True)(np.atleast_2d(x), np.atleast_1d(t))


def tusk_complement(xhat, R: float, T: float = 1.0, halfwidth: float | None = None,
                    t_lo: float | None = None, t_hi: float | None = None) -> Domain:
    """A box around the origin minus the closed tusk."""
    xhat = np.atleast_1d(np.asarray(xhat, dtype=float))
    R, T = float(R), float(T)
    if halfwidth is None:
        halfwidth = float((np.max(np.abs(xhat)) + R) * math.sqrt(T) + 1.0)
    t_lo = -T if t_lo is None else float(t_lo)
    t_hi = T if t_hi is None else float(t_hi)
    w = np.full(xhat.shape, float(halfwidth))
    bbox = BoundingBox(-w, w, t_lo, t_hi)
    closed = _tusk_pred(xhat, R, T, closed=True)

    def pred(x, t):
        return ~closed(x, t)

    def exit_dist(x, d, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            s_hi = np.where(d > 0, (w - x) / d, np.inf)
            s_lo = np.where(d < 0, (-w - x) / d, np.inf)
        s = np.minimum(s_hi.min(axis=1), s_lo.min(axis=1))
        if -T < t < 0.0:
            root = math.sqrt(-t)
            s = np.minimum(s, _ray_ball_entry(x, d, root * xhat, R * root))
        return s

    return Domain("tusk_complement",
                  {"xhat": xhat.tolist(), "R": R, "T": T, "halfwidth": halfwidth,
                   "t_lo": t_lo, "t_hi": t_hi},
                  bbox, pred, section_exit=exit_dist)


def tusk_house(xhat, R: float, R0: float) -> Domain:
    """House-with-roof domain minus a closed tusk of depth T = 1.

    The house is the cylinder {|x| < R0, -1 < t <= 0} capped by the cone
    {|x| < R0 (1 - t), 0 <= t < 1}; the tusk (apex at the origin) is
    removed.  Requires R0 > |xhat| + R so the tusk stays inside.
    """
    xhat = np.atleast_1d(np.asarray(xhat, dtype=float))
    R, R0 = float(R), float(R0)
    if R0 <= float(np.linalg.norm(xhat)) + R:
        raise ValueError("tusk house requires R0 > |xhat| + R")
    w = np.full(xhat.shape, R0)
    bbox = BoundingBox(-w, w, -1.0, 1.0)
    closed = _tusk_pred(xhat, R, 1.0, closed=True)

    def pred(x, t):
        rad = np.linalg.norm(x, axis=1)
        cap = R0 * np.minimum(1.0, 1.0 - t)
        in_house = (t > -1.0) & (t < 1.0) & (rad < cap)
        return in_house & ~closed(x, t)

    origin = np.zeros(xhat.shape)

    def exit_dist(x, d, t):
        cap = R0 * min(1.0, 1.0 - t)
        s = _ray_ball_exit(x, d, origin, cap)
        if -1.0 < t < 0.0:
            root = math.sqrt(-t)
            s = np.minimum(s, _ray_ball_entry(x, d, root * xhat, R * root))
        return s

    return Domain("tusk_house", {"xhat": xhat.tolist(), "R": R, "R0": R0},
                  bbox, pred, section_exit=exit_dist)


_PETROVSKII_T_LO = -1.0 / 3.0


def _petrovskii_sup() -> float:
    # sup of s * log(log(1/s)) over 0 < s <= 1/3
    res = optimize.minimize_scalar(lambda s: -s * math.log(math.log(1.0 / s)),
                                   bounds=(1e-12, 1.0 / 3.0), method="bounded",
                                   options={"xatol": 1e-14})
    return float(-res.fun)


_PETROVSKII_SUP = _petrovskii_sup()


def petrovskii_halfwidth(A: float) -> float:
    """Spatial half-width sqrt(A * sup |t| log|log|t||) of the Petrovskii region."""
    return math.sqrt(float(A) * _PETROVSKII_SUP)


def petrovskii(A: float, n: int = 1) -> Domain:
    """Region |x|^2 < A |t| log|log|t|| for -1/3 < t < 0, last point at (0, 0)."""
    A = float(A)
    if A <= 0:
        raise ValueError("A must be positive")
    w = np.full(n, petrovskii_halfwidth(A))
    bbox = BoundingBox(-w, w, _PETROVSKII_T_LO, 0.0)

    def pred(x, t):
        s = -t
        ok = (s > 0) & (s < 1.0 / 3.0)
        loglog = np.zeros_like(s)
        good = s > 0
        loglog[good] = np.log(-np.log(s[good]))
        return ok & (np.sum(x * x, axis=1) < A * s * loglog)

    def exit_dist(x, d, t):
        s = -t
        if not 0.0 < s < 1.0 / 3.0:
            return np.zeros(x.shape[0])
        radius = math.sqrt(A * s * math.log(-math.log(s)))
        return _ray_ball_exit(x, d, np.zeros(n), radius)

    return Domain("petrovskii", {"A": A, "n": n}, bbox, pred,
                  section_convex=True, section_exit=exit_dist)


def ball_complement(xi1: Sequence[float] | SpacetimePoint, R1: float,
                    center: Sequence[float] | SpacetimePoint, halfwidth: float) -> Domain:
    """An open box neighbourhood of ``center`` minus the closed space-time ball B(xi1, R1)."""
    if isinstance(xi1, SpacetimePoint):
        x1, t1 = xi1.x_array(), xi1.t
    else:
        arr = np.asarray(xi1, dtype=float)
        x1, t1 = arr[:-1], float(arr[-1])
    if isinstance(center, SpacetimePoint):
        xc, tc = center.x_array(), center.t
    else:
        arr = np.asarray(center, dtype=float)
        xc, tc = arr[:-1], float(arr[-1])
    R1, halfwidth = float(R1), float(halfwidth)
    bbox = BoundingBox(xc - halfwidth, xc + halfwidth, tc - halfwidth, tc + halfwidth)

    def pred(x, t):
        d2 = np.sum((x - x1) ** 2, axis=1) + (t - t1) ** 2
        return d2 > R1**2

    return Domain("ball_complement",
                  {"xi1": [*x1.tolist(), t1], "R1": R1,
                   "center": [*xc.tolist(), tc], "halfwidth": halfwidth},
                  bbox, pred)


def ellipse_chain(xhat, a: float, b: float, c: float, q: float,
                  halfwidth_x: float | None = None,
                  t_lo: float | None = None, t_hi: float | None = None) -> Domain:
    """Box around the origin minus geometrically spaced closed ellipses.

    Ellipse k is centred at (q^k xhat, -c q^{2k}) with semi-axes a q^k in
    space and b q^{2k} in time, k = 1, 2, ...  The chain accumulates at
    the origin, which must stay outside every ellipse.
    """
    xhat = np.atleast_1d(np.asarray(xhat, dtype=float))
    a, b, c, q = float(a), float(b), float(c), float(q)
    if not (0 < q < 1):
        raise ValueError("q must lie in (0, 1)")
    if min(a, b, c) <= 0:
        raise ValueError("a, b, c must be positive")
    xhat_norm = float(np.linalg.norm(xhat))
    if (xhat_norm / a) ** 2 + (c / b) ** 2 <= 1.0:
        raise ValueError("origin lies inside the closed ellipses; chain is degenerate")
    if halfwidth_x is None:
        halfwidth_x = q * (xhat_norm + 2 * a)
    t_lo = -(c + 2 * b) * q**2 if t_lo is None else float(t_lo)
    t_hi = b * q**2 if t_hi is None else float(t_hi)
    w = np.full(xhat.shape, float(halfwidth_x))
    bbox = BoundingBox(-w, w, t_lo, t_hi)

    def pred(x, t):
        out = np.ones(t.shape, dtype=bool)
        qk = q
        for _ in range(1, 400):
            bk = b * qk * qk
            ck = c * qk * qk
            # ellipse k lives in t in [-(c+b) q^{2k}, (b-c) q^{2k}]
            if ck + bk < 1e-300:
                break
            xk = qk * xhat
            ak = a * qk
            val = np.sum((x - xk) ** 2, axis=1) / ak**2 + (t + ck) ** 2 / bk**2
            out &= val > 1.0
            qk *= q
        return out

    return Domain("ellipse_chain",
                  {"xhat": xhat.tolist(), "a": a, "b": b, "c": c, "q": q,
                   "halfwidth_x": float(halfwidth_x), "t_lo": t_lo, "t_hi": t_hi},
                  bbox, pred)


def wedge_cylinder(x0, y, a: float, r: float, t1: float, t2: float) -> Domain:
    """Cylinder over a ball minus the closed cone {(x-x0).y >= a |x-x0|}.

    The cone opens in direction y and sits in the complement of the
    spatial section, so (x0, t) is a lateral boundary point.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    a, r = float(a), float(r)
    if not (0 < a < np.linalg.norm(y)):
        raise ValueError("need 0 < a < |y| for a nonempty exterior cone")
    bbox = BoundingBox(x0 - r, x0 + r, t1, t2)

    def pred(x, t):
        d = x - x0
        rad = np.linalg.norm(d, axis=1)
        return (rad < r) & (d @ y < a * rad)

    return Domain("wedge_cylinder",
                  {"x0": x0.tolist(), "y": y.tolist(), "a": a, "r": r,
                   "t1": t1, "t2": t2},
                  bbox, pred, time_invariant_section=True)


def generic(predicate: MembershipFn, bbox: BoundingBox, params: dict | None = None,
            section_convex: bool = False) -> Domain:
    """Domain from a user-supplied vectorized membership predicate over a bbox."""
    return Domain("generic", params or {}, bbox, predicate, section_convex=section_convex)


def scale_domain(dom: Domain, b: float, k: int) -> Domain:
    """Parabolic preimage {(x,t): (b^k x, b^{2k} t) in dom}."""
    b = float(b)
    if b <= 1.0:
        raise ValueError("scale base b must exceed 1")
    k = int(k)
    if k == 0:
        return dom
    f = b**k
    bbox = BoundingBox(dom.bbox.x_lo / f, dom.bbox.x_hi / f,
                       dom.bbox.t_lo / f**2, dom.bbox.t_hi / f**2)

    def pred(x, t):
        return dom.contains(f * x, f * f * t)

    exit_fn = None
    if dom.section_exit is not None:
        base_exit = dom.section_exit

        def exit_fn(x, d, t):
            return base_exit(f * x, f * d, f * f * t)

    box = None
    if dom.section_box is not None:
        box = (dom.section_box[0] / f, dom.section_box[1] / f)
    return Domain("scaled", {"base": domain_to_json(dom), "b": b, "k": k},
                  bbox, pred, section_convex=dom.section_convex,
                  time_invariant_section=dom.time_invariant_section,
                  section_exit=exit_fn, section_box=box)


def parabolic_scale(xi: SpacetimePoint, lam: float) -> SpacetimePoint:
    """The scaled point (lam * x, lam^2 * t)."""
    lam = float(lam)
    if lam <= 0:
        raise ValueError("scaling factor must be positive")
    return SpacetimePoint(tuple(lam * c for c in xi.x), lam * lam * xi.t)


# ---------------------------------------------------------------------------
# boundary location


def _bisect_arrays(dom: Domain, x_in, t_in, x_out, t_out, iters: int = 52):
    """Vectorized bisection from inside to outside points; returns boundary-side
    coordinates (outside bracket end) and the matching inside bracket end."""
    x_in = np.array(x_in, dtype=float, copy=True)
    x_out = np.array(x_out, dtype=float, copy=True)
    t_in = np.array(t_in, dtype=float, copy=True)
    t_out = np.array(t_out, dtype=float, copy=True)
    for _ in range(iters):
        xm = 0.5 * (x_in + x_out)
        tm = 0.5 * (t_in + t_out)
        inside = dom.contains(xm, tm)
        x_in[inside] = xm[inside]
        t_in[inside] = tm[inside]
        x_out[~inside] = xm[~inside]
        t_out[~inside] = tm[~inside]
    return x_out, t_out, x_in, t_in


def project_to_boundary(dom: Domain, xi_inside: SpacetimePoint,
                        xi_outside: SpacetimePoint, tol: float = 1e-12) -> SpacetimePoint:
    """Boundary point on the segment [xi_inside, xi_outside] found by bisection.

    The returned point has membership False and an interior point of the
    segment within ``tol`` of the segment length.
    """
    if not membership(dom, xi_inside):
        raise ValueError("xi_inside must lie in the domain")
    if membership(dom, xi_outside):
        raise ValueError("xi_outside must lie outside the domain")
    iters = max(1, math.ceil(math.log2(1.0 / tol)))
    xb, tb, _, _ = _bisect_arrays(
        dom,
        xi_inside.x_array()[None, :], np.array([xi_inside.t]),
        xi_outside.x_array()[None, :], np.array([xi_outside.t]),
        iters=iters,
    )
    return SpacetimePoint(tuple(xb[0]), float(tb[0]))


def interior_point(dom: Domain, seed: int = 0, max_tries: int = 10**6) -> SpacetimePoint:
    """Any interior point, found by rejection sampling of the bounding box."""
    rng = np.random.default_rng(seed)
    batch = 4096
    tried = 0
    bb = dom.bbox
    while tried < max_tries:
        x = rng.uniform(bb.x_lo, bb.x_hi, size=(batch, bb.n))
        t = rng.uniform(bb.t_lo, bb.t_hi, size=batch)
        hit = dom.contains(x, t)
        if np.any(hit):
            i = int(np.argmax(hit))
            return SpacetimePoint(tuple(x[i]), float(t[i]))
        tried += batch
    raise EmptyDomain(f"no interior point of {dom.kind!r} found in {max_tries} samples")


def _interior_pool(dom: Domain, rng: np.random.Generator, want: int,
                   max_tries: int = 10**6):
    bb = dom.bbox
    xs, ts, tried = [], [], 0
    while sum(len(a) for a in ts) < want and tried < max_tries:
        batch = 8192
        x = rng.uniform(bb.x_lo, bb.x_hi, size=(batch, bb.n))
        t = rng.uniform(bb.t_lo, bb.t_hi, size=batch)
        hit = dom.contains(x, t)
        xs.append(x[hit])
        ts.append(t[hit])
        tried += batch
    x = np.concatenate(xs) if xs else np.empty((0, bb.n))
    t = np.concatenate(ts) if ts else np.empty(0)
    if t.size == 0:
        raise EmptyDomain(f"no interior point of {dom.kind!r} found in {max_tries} samples")
    return x, t


def _bbox_face_points(bb: BoundingBox, rng: np.random.Generator, count: int):
    """Uniform points on the faces of the bounding box (all outside the open set)."""
    d = bb.n + 1
    lo = np.concatenate([bb.x_lo, [bb.t_lo]])
    hi = np.concatenate([bb.x_hi, [bb.t_hi]])
    pts = rng.uniform(lo, hi, size=(count, d))
    face_axis = rng.integers(0, d, size=count)
    face_side = rng.integers(0, 2, size=count)
    vals = np.where(face_side == 1, hi[face_axis], lo[face_axis])
    pts[np.arange(count), face_axis] = vals
    return pts[:, :-1], pts[:, -1]


def parabolic_boundary_sample(dom: Domain, count: int, seed: int = 0) -> list[SpacetimePoint]:
    """Deterministic sample of the parabolic boundary.

    Points are found by bisection along segments from interior points to
    the bounding-box faces.  Points on the open top slice (final time of
    the box, approachable from directly below) are rejected, which for
    cylinders reproduces the classical parabolic boundary: the bottom
    plus the lateral wall, but not the open top.

    Raises:
        EmptyDomain: if no interior point exists within 10^6 box samples.
    """
    count = int(count)
    if count == 0:
        return []
    rng = np.random.default_rng(seed)
    pool_x, pool_t = _interior_pool(dom, rng, max(64, count))
    eps_t = (dom.bbox.t_hi - dom.bbox.t_lo) * 1e-6
    out: list[SpacetimePoint] = []
    attempts = 0
    max_attempts = 400 * count + 4000
    while len(out) < count and attempts < max_attempts:
        take = min(4 * (count - len(out)) + 8, 4096)
        attempts += take
        idx = rng.integers(0, pool_t.size, size=take)
        fx, ft = _bbox_face_points(dom.bbox, rng, take)
        ok = ~dom.contains(fx, ft)
        xb, tb, _, _ = _bisect_arrays(dom, pool_x[idx][ok], pool_t[idx][ok], fx[ok], ft[ok])
        # reject the open top slice: boundary points at the final time with
        # interior points directly below
        at_top = (dom.bbox.t_hi - tb) <= eps_t
        below = dom.contains(xb, tb - eps_t)
        keep = ~(at_top & below)
        for x, t in zip(xb[keep], tb[keep]):
            out.append(SpacetimePoint(tuple(x), float(t)))
            if len(out) == count:
                break
    if len(out) < count:
        raise RuntimeError(f"boundary sampling stalled for {dom.kind!r}")
    return out


# ---------------------------------------------------------------------------
# JSON descriptors

_JSON_BUILDERS: dict[str, Callable[..., Domain]] = {
    "cylinder": cylinder,
    "cylinder_ball": cylinder_ball,
    "tusk": tusk,
    "tusk_complement": tusk_complement,
    "tusk_house": tusk_house,
    "petrovskii": petrovskii,
    "ball_complement": ball_complement,
    "ellipse_chain": ellipse_chain,
    "wedge_cylinder": wedge_cylinder,
}


def domain_from_json(obj: dict) -> Domain:
    """Rebuild a catalogue domain from its JSON descriptor.

    Generic domains carry an inequality expression ``expr`` in the
    variables x0, ..., t; the open set is {expr > 0} within the given
    bbox.  The expression is parsed with sympy.
    """
    obj = dict(obj)
    kind = obj.pop("kind")
    if kind == "scaled":
        base = domain_from_json(obj["base"])
        return scale_domain(base, obj["b"], obj["k"])
    if kind == "generic":
        import sympy

        bbox = obj["bbox"]
        bb = BoundingBox(np.asarray(bbox["x_lo"], dtype=float),
                         np.asarray(bbox["x_hi"], dtype=float),
                         bbox["t_lo"], bbox["t_hi"])
        n = bb.n
        syms = sympy.symbols([f"x{i}" for i in range(n)] + ["t"])
        expr = sympy.sympify(obj["expr"])
        fn = sympy.lambdify(syms, expr, modules="numpy")

        def pred(x, t):
            args = [x[:, i] for i in range(n)] + [t]
            return np.asarray(fn(*args)) > 0

        return generic(pred, bb, params={"expr": obj["expr"], "bbox": bbox})
    try:
        builder = _JSON_BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unknown domain kind {kind!r}") from None
    return builder(**obj)


def domain_to_json(dom: Domain) -> dict:
    """JSON descriptor that round-trips through :func:`domain_from_json`."""
    if dom.kind == "generic" and "expr" not in dom.params:
        raise ValueError("generic domains built from callables have no JSON form")
    return {"kind": dom.kind, **dom.params}
