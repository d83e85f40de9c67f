"""Closed-form scalar fields on space-time with exact second-order jets.

A :class:`Field` is an expression tree over constants, the spatial
coordinates, time, arithmetic, powers, exp, log and the radial
primitives |x| and |x|^2.  Jets (value, du/dt, gradient, Hessian) are
obtained by recursive exact differentiation of the tree, which keeps the
signs of residuals reliable near singular loci such as t -> 0- where
finite differences degrade.

Hessians are stored as packed upper triangles, which makes them exactly
symmetric by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SingularPoint",
    "Jet2",
    "BatchJet",
    "Field",
    "constant",
    "coordinate",
    "time_coordinate",
    "radius",
    "radius_sq",
    "abs_log_abs_time",
    "exp",
    "log",
    "eval_jet",
    "eval_jet_batch",
]


class SingularPoint(ArithmeticError):
    """A subexpression is undefined at the evaluation point."""


def _tri_indices(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def _unpack(packed: np.ndarray, n: int) -> np.ndarray:
    """Expand packed upper triangles (N, n(n+1)/2) to full (N, n, n) matrices."""
    N = packed.shape[0]
    full = np.empty((N, n, n), dtype=float)
    for k, (i, j) in enumerate(_tri_indices(n)):
        full[:, i, j] = packed[:, k]
        full[:, j, i] = packed[:, k]
    return full


@dataclass(frozen=True, eq=False)
class Jet2:
    """Second-order data of a field at one point."""

    value: float
    dt: float
    grad: np.ndarray
    hess: np.ndarray

    @property
    def n(self) -> int:
        return self.grad.size


class BatchJet:
    """Jets at a batch of points; Hessian packed as upper triangle."""

    __slots__ = ("value", "dt", "grad", "hess_packed", "n")

    def __init__(self, value, dt, grad, hess_packed, n):
        self.value = value
        self.dt = dt
        self.grad = grad
        self.hess_packed = hess_packed
        self.n = n

    def hess_full(self) -> np.ndarray:
        return _unpack(self.hess_packed, self.n)

    def __getitem__(self, i: int) -> Jet2:
        return Jet2(float(self.value[i]), float(self.dt[i]),
                    self.grad[i].copy(), _unpack(self.hess_packed[i:i + 1], self.n)[0])


def _outer_packed(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Packed symmetric part a b^T + b a^T restricted to the upper triangle."""
    cols = [a[:, i] * b[:, j] + b[:, i] * a[:, j] for (i, j) in _tri_indices(n)]
    return np.stack(cols, axis=1)


class _Node:
    def jet(self, x: np.ndarray, t: np.ndarray) -> BatchJet:  # pragma: no cover
        raise NotImplementedError


class _Const(_Node):
    def __init__(self, c: float):
        self.c = float(c)

    def jet(self, x, t):
        N, n = x.shape
        m = n * (n + 1) // 2
        return BatchJet(np.full(N, self.c), np.zeros(N),
                        np.zeros((N, n)), np.zeros((N, m)), n)


class _Coord(_Node):
    def __init__(self, i: int):
        self.i = int(i)

    def jet(self, x, t):
        N, n = x.shape
        m = n * (n + 1) // 2
        g = np.zeros((N, n))
        g[:, self.i] = 1.0
        return BatchJet(x[:, self.i].copy(), np.zeros(N), g, np.zeros((N, m)), n)


class _Time(_Node):
    def jet(self, x, t):
        N, n = x.shape
        m = n * (n + 1) // 2
        return BatchJet(t.copy(), np.ones(N), np.zeros((N, n)), np.zeros((N, m)), n)


class _RadiusSq(_Node):
    """|x|^2, a polynomial: smooth everywhere including x = 0."""

    def jet(self, x, t):
        N, n = x.shape
        tri = _tri_indices(n)
        h = np.zeros((N, len(tri)))
        for k, (i, j) in enumerate(tri):
            if i == j:
                h[:, k] = 2.0
        return BatchJet(np.sum(x * x, axis=1), np.zeros(N), 2.0 * x, h, n)


class _Radius(_Node):
    """|x|; declared singular at x = 0."""

    def jet(self, x, t):
        N, n = x.shape
        r = np.sqrt(np.sum(x * x, axis=1))
        if np.any(r == 0.0):
            raise SingularPoint("|x| is singular at x = 0")
        g = x / r[:, None]
        tri = _tri_indices(n)
        h = np.empty((N, len(tri)))
        for k, (i, j) in enumerate(tri):
            h[:, k] = ((1.0 if i == j else 0.0) - g[:, i] * g[:, j]) / r
        return BatchJet(r, np.zeros(N), g, h, n)


class _Add(_Node):
    def __init__(self, u, v):
        self.u, self.v = u, v

    def jet(self, x, t):
        a, b = self.u.jet(x, t), self.v.jet(x, t)
        return BatchJet(a.value + b.value, a.dt + b.dt, a.grad + b.grad,
                        a.hess_packed + b.hess_packed, a.n)


class _Sub(_Node):
    def __init__(self, u, v):
        self.u, self.v = u, v

    def jet(self, x, t):
        a, b = self.u.jet(x, t), self.v.jet(x, t)
        return BatchJet(a.value - b.value, a.dt - b.dt, a.grad - b.grad,
                        a.hess_packed - b.hess_packed, a.n)


class _Mul(_Node):
    def __init__(self, u, v):
        self.u, self.v = u, v

    def jet(self, x, t):
        a, b = self.u.jet(x, t), self.v.jet(x, t)
        val = a.value * b.value
        dt = a.dt * b.value + a.value * b.dt
        grad = a.grad * b.value[:, None] + b.grad * a.value[:, None]
        hess = (a.hess_packed * b.value[:, None] + b.hess_packed * a.value[:, None]
                + _outer_packed(a.grad, b.grad, a.n))
        return BatchJet(val, dt, grad, hess, a.n)


class _Div(_Node):
    def __init__(self, u, v):
        self.u, self.v = u, v

    def jet(self, x, t):
        a, b = self.u.jet(x, t), self.v.jet(x, t)
        if np.any(b.value == 0.0):
            raise SingularPoint("division by zero")
        w = a.value / b.value
        grad = (a.grad - w[:, None] * b.grad) / b.value[:, None]
        hess = (a.hess_packed - w[:, None] * b.hess_packed
                - _outer_packed(grad, b.grad, a.n)) / b.value[:, None]
        dt = (a.dt - w * b.dt) / b.value
        return BatchJet(w, dt, grad, hess, a.n)


class _Pow(_Node):
    """u^q for a real constant q; non-integer q requires u > 0."""

    def __init__(self, u, q: float):
        self.u = u
        self.q = float(q)
        self.integral = float(q).is_integer()

    def jet(self, x, t):
        a = self.u.jet(x, t)
        q = self.q
        if self.integral:
            if q < 0 and np.any(a.value == 0.0):
                raise SingularPoint("negative power of zero")
        elif np.any(a.value <= 0.0):
            raise SingularPoint("non-integer power of a non-positive base")
        val = a.value**q
        d1 = q * a.value ** (q - 1) if q != 0 else np.zeros_like(a.value)
        d2 = q * (q - 1) * a.value ** (q - 2) if q not in (0.0, 1.0) else np.zeros_like(a.value)
        grad = d1[:, None] * a.grad
        hess = d1[:, None] * a.hess_packed + d2[:, None] * _half_outer(a.grad, a.n)
        return BatchJet(val, d1 * a.dt, grad, hess, a.n)


def _half_outer(g: np.ndarray, n: int) -> np.ndarray:
    """Packed outer product g g^T (upper triangle)."""
    cols = [g[:, i] * g[:, j] for (i, j) in _tri_indices(n)]
    return np.stack(cols, axis=1)


class _Exp(_Node):
    def __init__(self, u):
        self.u = u

    def jet(self, x, t):
        a = self.u.jet(x, t)
        w = np.exp(a.value)
        grad = w[:, None] * a.grad
        hess = w[:, None] * (a.hess_packed + _half_outer(a.grad, a.n))
        return BatchJet(w, w * a.dt, grad, hess, a.n)


class _Log(_Node):
    def __init__(self, u):
        self.u = u

    def jet(self, x, t):
        a = self.u.jet(x, t)
        if np.any(a.value <= 0.0):
            raise SingularPoint("log of a non-positive value")
        grad = a.grad / a.value[:, None]
        hess = a.hess_packed / a.value[:, None] - _half_outer(grad, a.n)
        return BatchJet(np.log(a.value), a.dt / a.value, grad, hess, a.n)


class _Rescale(_Node):
    """u(lam * x, lam^2 * t): grad scales by lam, hess and dt by lam^2."""

    def __init__(self, u, lam: float):
        self.u = u
        self.lam = float(lam)

    def jet(self, x, t):
        lam = self.lam
        a = self.u.jet(lam * x, lam * lam * t)
        return BatchJet(a.value, lam * lam * a.dt, lam * a.grad,
                        lam * lam * a.hess_packed, a.n)


@dataclass(frozen=True, eq=False)
class Field:
    """Scalar field with exact jets, dimension-tagged expression tree."""

    node: _Node
    n: int

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Field":
        if isinstance(other, Field):
            if other.n != self.n:
                raise ValueError("mixing fields of different spatial dimension")
            return other
        return Field(_Const(float(other)), self.n)

    def __add__(self, other):
        return Field(_Add(self.node, self._coerce(other).node), self.n)

    __radd__ = __add__

    def __sub__(self, other):
        return Field(_Sub(self.node, self._coerce(other).node), self.n)

    def __rsub__(self, other):
        return Field(_Sub(self._coerce(other).node, self.node), self.n)

    def __mul__(self, other):
        return Field(_Mul(self.node, self._coerce(other).node), self.n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(_Div(self.node, self._coerce(other).node), self.n)

    def __rtruediv__(self, other):
        return Field(_Div(self._coerce(other).node, self.node), self.n)

    def __pow__(self, q: float):
        return Field(_Pow(self.node, q), self.n)

    def __neg__(self):
        return Field(_Sub(_Const(0.0), self.node), self.n)

    # -- evaluation -------------------------------------------------------
    def parabolic_rescale(self, lam: float) -> "Field":
        """The field (x, t) -> self(lam x, lam^2 t)."""
        return Field(_Rescale(self.node, lam), self.n)

    def value(self, x, t) -> np.ndarray:
        """Values only, vectorized over (N, n) x and (N,) t."""
        return self.jet_batch(x, t).value

    def jet_batch(self, x, t) -> BatchJet:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if x.shape[1] != self.n:
            raise ValueError(f"expected points with n = {self.n}")
        return self.node.jet(x, t)


def constant(c: float, n: int) -> Field:
    return Field(_Const(c), n)


def coordinate(i: int, n: int) -> Field:
    if not 0 <= i < n:
        raise ValueError("coordinate index out of range")
    return Field(_Coord(i), n)


def time_coordinate(n: int) -> Field:
    return Field(_Time(), n)


def radius(n: int) -> Field:
    """|x|, singular at x = 0; prefer radius_sq for fields smooth at 0."""
    return Field(_Radius(), n)


def radius_sq(n: int) -> Field:
    return Field(_RadiusSq(), n)


def abs_log_abs_time(n: int) -> Field:
    """|log|t|| = -log(-t), the decay clock of the barrier profiles.

    Valid for -1 < t < 0 (positive there); powers of this field build the
    profiles f(t) = |log|t||^(-a-1) and h(t) used by the barrier module.
    """
    tvar = time_coordinate(n)
    return -(log(-tvar))


def exp(f: Field) -> Field:
    return Field(_Exp(f.node), f.n)


def log(f: Field) -> Field:
    return Field(_Log(f.node), f.n)


def eval_jet_batch(field: Field, x, t) -> BatchJet:
    """Exact jets at a batch of points; raises SingularPoint off the field's domain."""
    return field.jet_batch(x, t)


def eval_jet(field: Field, xi) -> Jet2:
    """Exact jet at a single point (SpacetimePoint or (x, t) pair)."""
    if hasattr(xi, "x_array"):
        x, t = xi.x_array(), xi.t
    else:
        x, t = np.atleast_1d(np.asarray(xi[0], dtype=float)), float(xi[1])
    return field.jet_batch(x[None, :], np.array([t]))[0]
