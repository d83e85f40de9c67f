"""Named boundary-data families used by the solver, classifier and CLI."""

from __future__ import annotations

import numpy as np

__all__ = ["manufactured_data", "heat_mode_data", "constant_data", "data_by_name"]


def manufactured_data(n: int, p: float):
    """|x|^2 + 2(n + p - 2) t, an exact solution of the flow for every p."""
    c = 2.0 * (n + p - 2.0)

    def F(x, t):
        x = np.atleast_2d(x)
        return np.sum(x * x, axis=1) + c * np.atleast_1d(t)

    return F


def heat_mode_data(mode: int = 1):
    """exp(-k^2 pi^2 (t + 1)) sin(k pi x), the separated heat mode on (-1, 1)."""
    k = int(mode)

    def F(x, t):
        x = np.atleast_2d(x)
        return np.exp(-(k * np.pi) ** 2 * (np.atleast_1d(t) + 1.0)) \
            * np.sin(k * np.pi * x[:, 0])

    return F


def constant_data(c: float):
    c = float(c)

    def F(x, t):
        return np.full(np.atleast_1d(t).shape, c)

    return F


def data_by_name(name: str, n: int, p: float):
    """Resolve a CLI data spec: manufactured | heat_mode | constant:<c>."""
    if name == "manufactured":
        return manufactured_data(n, p)
    if name == "heat_mode":
        return heat_mode_data()
    if name.startswith("constant:"):
        return constant_data(float(name.split(":", 1)[1]))
    raise ValueError(f"unknown data family {name!r}")
