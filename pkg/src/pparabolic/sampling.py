"""Deterministic sample sets over domains.

Verification samplers combine a low-discrepancy (Halton) set over the
whole domain with two targeted augmentations: points on the spatial axis
x = x0 (where barrier gradients vanish) and points in dyadic time bands
accumulating at the reference time (where the delicate sign conditions
live).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .geometry import Domain

__all__ = ["SampleSet", "build_sample_set", "halton_in_domain"]


@dataclass
class SampleSet:
    """Concatenated sample batch with named groups."""

    x: np.ndarray
    t: np.ndarray
    groups: dict[str, np.ndarray]  # group name -> index array

    @property
    def count(self) -> int:
        return self.t.size

    def group(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        idx = self.groups[name]
        return self.x[idx], self.t[idx]


def halton_in_domain(dom: Domain, count: int, seed: int = 0,
                     t_window: tuple[float, float] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Low-discrepancy points of the domain via rejection from the bbox."""
    bb = dom.bbox
    d = bb.n + 1
    sampler = qmc.Halton(d=d, scramble=True, seed=seed)
    t_lo, t_hi = (bb.t_lo, bb.t_hi) if t_window is None else t_window
    lo = np.concatenate([bb.x_lo, [t_lo]])
    hi = np.concatenate([bb.x_hi, [t_hi]])
    xs, ts, have = [], [], 0
    for _ in range(200):
        block = sampler.random(max(4 * (count - have), 256))
        pts = lo + block * (hi - lo)
        x, t = pts[:, :-1], pts[:, -1]
        hit = dom.contains(x, t)
        xs.append(x[hit])
        ts.append(t[hit])
        have += int(np.count_nonzero(hit))
        if have >= count:
            break
    x = np.concatenate(xs)[:count]
    t = np.concatenate(ts)[:count]
    if t.size < count:
        raise RuntimeError(f"could not draw {count} interior samples from {dom.kind!r}")
    return x, t


def _uniform_in_domain(dom: Domain, count: int, rng: np.random.Generator,
                       t_window: tuple[float, float]) -> tuple[np.ndarray, np.ndarray]:
    bb = dom.bbox
    t_lo = max(t_window[0], bb.t_lo)
    t_hi = min(t_window[1], bb.t_hi)
    if t_hi <= t_lo:
        return np.empty((0, bb.n)), np.empty(0)
    xs, ts, have = [], [], 0
    for _ in range(400):
        m = max(4 * (count - have), 256)
        x = rng.uniform(bb.x_lo, bb.x_hi, size=(m, bb.n))
        t = rng.uniform(t_lo, t_hi, size=m)
        hit = dom.contains(x, t)
        xs.append(x[hit])
        ts.append(t[hit])
        have += int(np.count_nonzero(hit))
        if have >= count:
            break
    if have == 0:
        return np.empty((0, bb.n)), np.empty(0)
    return np.concatenate(xs)[:count], np.concatenate(ts)[:count]


def build_sample_set(dom: Domain, n_domain: int = 10_000, n_axis: int = 1_000,
                     n_band: int = 1_000, band_max: int = 20, seed: int = 0,
                     x_axis=None, t_anchor: float | None = None,
                     t_window: tuple[float, float] | None = None) -> SampleSet:
    """Default verification sampler.

    ``n_domain`` Halton points over the domain, ``n_axis`` points on the
    spatial axis x = x_axis (default 0), and ``n_band`` points split over
    dyadic time bands (t_anchor - 2^-m, t_anchor - 2^-m-1) for m up to
    ``band_max``; the anchor defaults to the top of the time range.
    """
    bb = dom.bbox
    rng = np.random.default_rng(seed)
    t_lo = bb.t_lo if t_window is None else max(t_window[0], bb.t_lo)
    t_hi = bb.t_hi if t_window is None else min(t_window[1], bb.t_hi)
    anchor = t_hi if t_anchor is None else float(t_anchor)
    x0 = np.zeros(bb.n) if x_axis is None else np.asarray(x_axis, dtype=float)

    groups: dict[str, np.ndarray] = {}
    xs, ts = [], []
    pos = 0

    def push(name, x, t):
        nonlocal pos
        xs.append(np.atleast_2d(x))
        ts.append(np.atleast_1d(t))
        groups[name] = np.arange(pos, pos + t.size)
        pos += t.size

    x, t = halton_in_domain(dom, n_domain, seed=seed, t_window=(t_lo, t_hi))
    push("domain", x, t)

    if n_axis > 0:
        # axis points: Halton in t, keep those with (x0, t) in the domain
        h = qmc.Halton(d=1, scramble=True, seed=seed + 1)
        t_cand = t_lo + h.random(8 * n_axis)[:, 0] * (t_hi - t_lo)
        x_cand = np.broadcast_to(x0, (t_cand.size, bb.n))
        hit = dom.contains(x_cand, t_cand)
        t_ax = t_cand[hit][:n_axis]
        if t_ax.size:
            push("axis", np.broadcast_to(x0, (t_ax.size, bb.n)).copy(), t_ax)

    if n_band > 0:
        span = t_hi - t_lo
        bands = []
        for m in range(band_max + 1):
            b_hi = anchor - span * 2.0 ** (-m - 1)
            b_lo = anchor - span * 2.0 ** (-m)
            if b_hi <= t_lo:
                continue
            bands.append((max(b_lo, t_lo), b_hi))
        if bands:
            per = max(1, n_band // len(bands))
            bx, bt = [], []
            for i, (b_lo, b_hi) in enumerate(bands):
                x, t = _uniform_in_domain(dom, per, np.random.default_rng(seed + 100 + i),
                                          (b_lo, b_hi))
                bx.append(x)
                bt.append(t)
            bx = np.concatenate(bx)
            bt = np.concatenate(bt)
            if bt.size:
                push("bands", bx, bt)

    return SampleSet(np.concatenate(xs), np.concatenate(ts), groups)
