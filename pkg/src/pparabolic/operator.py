"""Normalized p-Laplacian evaluation and the classical sign criterion.

For a jet with nonzero gradient,

    inf_lap  = <H nu, nu>,          nu = grad / |grad|,
    p_lap_n  = trace(H) + (p - 2) * inf_lap,

and at gradient zeros the operator is replaced by its eigenvalue
envelope: the smallest eigenvalue of H when p >= 2, the largest when
1 < p < 2.

``classical_supersolution_check`` applies the pointwise criterion for
smooth supersolutions: where the gradient is nonzero the residual
u_t - p_lap_n(u) must be nonnegative; where the gradient vanishes and
the Hessian is positive semidefinite, u_t must be nonnegative; gradient
zeros with indefinite Hessian impose no requirement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import Field, Jet2, SingularPoint, eval_jet_batch
from .geometry import Domain, SpacetimePoint

__all__ = [
    "ZeroGradient",
    "SingularSample",
    "OperatorParams",
    "CheckReport",
    "normalized_inf_laplacian",
    "normalized_p_laplacian",
    "envelope_eigenvalue",
    "classical_supersolution_check",
    "classical_subsolution_check",
]


class ZeroGradient(ValueError):
    """The gradient is below threshold where a direction is required."""


class SingularSample(ValueError):
    """A sample point hit a singular locus of the field."""


@dataclass(frozen=True)
class OperatorParams:
    """Exponent p in (1, inf) and the gradient-zero threshold."""

    p: float
    grad_tol: float = 1e-10

    def __post_init__(self):
        if not 1.0 < self.p < float("inf"):
            raise ValueError("p must lie in (1, inf)")
        if self.grad_tol < 0:
            raise ValueError("grad_tol must be nonnegative")


def normalized_inf_laplacian(j: Jet2, grad_tol: float = 1e-10) -> float:
    """<H nu, nu> with nu the unit gradient; raises ZeroGradient if |grad| <= grad_tol."""
    gn = float(np.linalg.norm(j.grad))
    if gn <= grad_tol:
        raise ZeroGradient(f"|grad| = {gn} <= {grad_tol}")
    nu = j.grad / gn
    return float(nu @ j.hess @ nu)


def normalized_p_laplacian(j: Jet2, params: OperatorParams) -> float:
    """trace(H) + (p - 2) <H nu, nu>; raises ZeroGradient at gradient zeros."""
    return float(np.trace(j.hess)) + (params.p - 2.0) * normalized_inf_laplacian(
        j, params.grad_tol)


def _eig_extremes(hess: np.ndarray) -> tuple[float, float]:
    """(smallest, largest) eigenvalue; closed form for n <= 2."""
    h = np.asarray(hess, dtype=float)
    if h.ndim == 0 or h.shape == (1, 1):
        v = float(h) if h.ndim == 0 else float(h[0, 0])
        return v, v
    if h.shape == (2, 2):
        mean = 0.5 * (h[0, 0] + h[1, 1])
        rad = np.hypot(0.5 * (h[0, 0] - h[1, 1]), h[0, 1])
        return float(mean - rad), float(mean + rad)
    w = np.linalg.eigvalsh(h)
    return float(w[0]), float(w[-1])


def envelope_eigenvalue(hess, p: float) -> float:
    """Smallest eigenvalue of the Hessian if p >= 2, largest if 1 < p < 2."""
    lo, hi = _eig_extremes(np.asarray(hess, dtype=float))
    return lo if p >= 2.0 else hi


# batch helpers used here and by the barrier verifier -----------------------


def _batch_eig_extremes(hess_packed: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    if n == 1:
        v = hess_packed[:, 0]
        return v, v
    if n == 2:
        a, b, c = hess_packed[:, 0], hess_packed[:, 1], hess_packed[:, 2]
        mean = 0.5 * (a + c)
        rad = np.hypot(0.5 * (a - c), b)
        return mean - rad, mean + rad
    from .fields import _unpack

    w = np.linalg.eigvalsh(_unpack(hess_packed, n))
    return w[:, 0], w[:, -1]


def _batch_trace(hess_packed: np.ndarray, n: int) -> np.ndarray:
    idx = np.cumsum([0] + list(range(n, 1, -1)))
    return hess_packed[:, idx].sum(axis=1)


def _batch_quadratic_form(hess_packed: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    """<H v, v> from packed upper triangles."""
    out = np.zeros(hess_packed.shape[0])
    k = 0
    for i in range(n):
        for j in range(i, n):
            w = 1.0 if i == j else 2.0
            out += w * hess_packed[:, k] * v[:, i] * v[:, j]
            k += 1
    return out


@dataclass
class CheckReport:
    """Outcome of a pointwise sign check over a sample set."""

    passed: bool
    n_samples: int
    worst_residual: float | None
    worst_point: SpacetimePoint | None
    branch_counts: dict[str, int]
    n_failed: int
    per_sample_pass: np.ndarray = field(repr=False, default=None)

    def to_json_dict(self) -> dict:
        wp = None
        if self.worst_point is not None:
            wp = {"x": list(self.worst_point.x), "t": self.worst_point.t}
        return {
            "pass": self.passed,
            "n_samples": self.n_samples,
            "worst_residual": self.worst_residual,
            "worst_point": wp,
            "branch_counts": dict(self.branch_counts),
        }


def _as_batch(samples):
    if isinstance(samples, tuple) and len(samples) == 2:
        x = np.atleast_2d(np.asarray(samples[0], dtype=float))
        t = np.atleast_1d(np.asarray(samples[1], dtype=float))
        return x, t
    pts = list(samples)
    x = np.array([p.x for p in pts], dtype=float)
    t = np.array([p.t for p in pts], dtype=float)
    return x, t


def classical_supersolution_check(field_u: Field, dom: Domain, params: OperatorParams,
                                  samples, slack: float = 0.0) -> CheckReport:
    """Check the classical supersolution criterion on interior samples.

    Per sample: with |grad| > grad_tol the residual u_t - p_lap_n(u) must
    be >= -slack; with |grad| <= grad_tol and positive semidefinite
    Hessian (eigenvalues >= -slack), u_t >= -slack is required; gradient
    zeros with indefinite Hessian pass vacuously.  Samples may be a list
    of SpacetimePoint or a pair of arrays (x, t).

    Raises:
        SingularSample: if a sample hits a singular locus of the field.
        ValueError: if a sample lies outside the domain.
    """
    x, t = _as_batch(samples)
    if x.shape[0] == 0:
        return CheckReport(True, 0, None, None,
                           {"grad_nonzero": 0, "grad_zero_psd": 0, "grad_zero_vacuous": 0},
                           0, np.zeros(0, dtype=bool))
    inside = dom.contains(x, t)
    if not np.all(inside):
        k = int(np.argmin(inside))
        raise ValueError(f"sample {(tuple(x[k]), float(t[k]))} is not in the domain")
    try:
        jets = eval_jet_batch(field_u, x, t)
    except SingularPoint as e:
        raise SingularSample(str(e)) from e
    n = jets.n
    p = params.p
    gn = np.linalg.norm(jets.grad, axis=1)
    nonzero = gn > params.grad_tol
    trace = _batch_trace(jets.hess_packed, n)
    lam_lo, lam_hi = _batch_eig_extremes(jets.hess_packed, n)

    residual = np.full(x.shape[0], np.inf)
    ok = np.ones(x.shape[0], dtype=bool)
    vacuous = np.zeros(x.shape[0], dtype=bool)

    if np.any(nonzero):
        nu = jets.grad[nonzero] / gn[nonzero, None]
        inf_lap = _batch_quadratic_form(jets.hess_packed[nonzero], nu, n)
        r = jets.dt[nonzero] - (trace[nonzero] + (p - 2.0) * inf_lap)
        residual[nonzero] = r
        ok[nonzero] = r >= -slack

    zero = ~nonzero
    if np.any(zero):
        psd = lam_lo[zero] >= -slack
        idx = np.flatnonzero(zero)
        psd_idx = idx[psd]
        ok[psd_idx] = jets.dt[psd_idx] >= -slack
        residual[psd_idx] = jets.dt[psd_idx]
        vacuous[idx[~psd]] = True

    counted = ~vacuous
    branch_counts = {
        "grad_nonzero": int(np.count_nonzero(nonzero)),
        "grad_zero_psd": int(np.count_nonzero(zero & counted)),
        "grad_zero_vacuous": int(np.count_nonzero(vacuous)),
    }
    worst_res, worst_pt = None, None
    if np.any(counted):
        res = residual[counted]
        xs, ts = x[counted], t[counted]
        # deterministic worst: smallest residual, ties by (t, x) lexicographic
        keys = np.lexsort(tuple(xs[:, i] for i in range(n - 1, -1, -1)) + (ts, res))
        k = keys[0]
        worst_res = float(res[k])
        worst_pt = SpacetimePoint(tuple(xs[k]), float(ts[k]))
    return CheckReport(bool(np.all(ok)), int(x.shape[0]), worst_res, worst_pt,
                       branch_counts, int(np.count_nonzero(~ok)), ok)


def classical_subsolution_check(field_u: Field, dom: Domain, params: OperatorParams,
                                samples, slack: float = 0.0) -> CheckReport:
    """Subsolution criterion: the supersolution check applied to -u."""
    return classical_supersolution_check(-field_u, dom, params, samples, slack=slack)
