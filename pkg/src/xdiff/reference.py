"""Closed-form references: constants, the porous-medium source solution for the
g = 0 reduction, and manufactured solutions with their forcing terms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import solver
from .errors import BadTime, NegativeState
from .grid import Grid1D, State
from .model import ModelParams

# ---------------------------------------------------------------------------
# porous medium equation  f_t = (a/2) (f^2)_xx


def _barenblatt_constants(a_coeff: float, t: float, t0: float, mass: float):
    T = t + t0
    if not T > 0:
        raise BadTime(f"need t + t0 > 0, got t={t}, t0={t0}")
    if not (a_coeff > 0 and mass > 0):
        raise ValueError("a_coeff and mass must be positive")
    C = (3.0 * mass / (4.0 * math.sqrt(6.0 * a_coeff))) ** (2.0 / 3.0)
    k = 1.0 / (6.0 * a_coeff * T ** (2.0 / 3.0))
    return T, C, k


def barenblatt(a_coeff: float, t: float, x, t0: float, mass: float, center: float = 0.0):
    """Source solution of f_t = (a/2)(f^2)_xx with total mass ``mass``.

    f(t, x) = T^(-1/3) * max(C - (x - center)^2 / (6 a T^(2/3)), 0),  T = t + t0,
    with C fixed by the mass.
    """
    T, C, k = _barenblatt_constants(a_coeff, t, t0, mass)
    s = np.asarray(x, dtype=float) - center
    return T ** (-1.0 / 3.0) * np.maximum(C - k * s * s, 0.0)


def barenblatt_support_radius(a_coeff: float, t: float, t0: float, mass: float) -> float:
    T, C, k = _barenblatt_constants(a_coeff, t, t0, mass)
    return math.sqrt(C / k)


def barenblatt_cell_averages(
    grid: Grid1D, a_coeff: float, t: float, t0: float, mass: float, center: float | None = None
) -> np.ndarray:
    """Exact cell averages of the source solution on ``grid``."""
    if center is None:
        center = 0.5 * (grid.x_lo + grid.x_hi)
    T, C, k = _barenblatt_constants(a_coeff, t, t0, mass)
    R = math.sqrt(C / k)
    edges = np.clip(grid.faces - center, -R, R)

    def prim(s):
        return T ** (-1.0 / 3.0) * (C * s - k * s**3 / 3.0)

    return np.diff(prim(edges)) / grid.h


def constant_state(grid: Grid1D, f0: float, g0: float) -> State:
    if f0 < 0 or g0 < 0:
        raise NegativeState(f"constant state needs f0, g0 >= 0, got ({f0}, {g0})")
    n = grid.n_cells
    return State(grid, np.full(n, float(f0)), np.full(n, float(g0)), 0.0)


# ---------------------------------------------------------------------------
# manufactured solutions


Field = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ManufacturedCase:
    """Exact pair and the forcing that makes it solve the forced system."""

    name: str
    f_exact: Field
    g_exact: Field
    S_f: Field
    S_g: Field

    def sources(self, t: float, x: np.ndarray):
        return self.S_f(t, x), self.S_g(t, x)

    def initial_state(self, grid: Grid1D, t: float = 0.0) -> State:
        x = grid.cell_centers
        return State(grid, self.f_exact(t, x), self.g_exact(t, x), t)


MANUFACTURED_CHOICES = ("trig", "constant")


def _trig_case(p: ModelParams, amp: float, x_lo: float, length: float) -> ManufacturedCase:
    a, b, c, d = p.as_tuple()
    k = math.pi / length

    # f = 1 + amp cos(kx) e^-t,  g = 1 + amp sin^2(kx) e^-t; both have zero slope at the ends
    def parts(t, x):
        xi = k * (np.asarray(x, dtype=float) - x_lo)
        e = amp * math.exp(-t)
        cs, sn = np.cos(xi), np.sin(xi)
        f = 1.0 + e * cs
        f_t = -e * cs
        f_x = -e * k * sn
        f_xx = -e * k * k * cs
        g = 1.0 + e * sn * sn
        g_t = -e * sn * sn
        g_x = e * k * np.sin(2.0 * xi)
        g_xx = 2.0 * e * k * k * np.cos(2.0 * xi)
        return f, f_t, f_x, f_xx, g, g_t, g_x, g_xx

    def f_exact(t, x):
        return parts(t, x)[0]

    def g_exact(t, x):
        return parts(t, x)[4]

    # S = u_t - (u P_x)_x = u_t - u_x P_x - u P_xx
    def S_f(t, x):
        f, f_t, f_x, f_xx, g, g_t, g_x, g_xx = parts(t, x)
        return f_t - f_x * (a * f_x + b * g_x) - f * (a * f_xx + b * g_xx)

    def S_g(t, x):
        f, f_t, f_x, f_xx, g, g_t, g_x, g_xx = parts(t, x)
        return g_t - g_x * (c * f_x + d * g_x) - g * (c * f_xx + d * g_xx)

    return ManufacturedCase("trig", f_exact, g_exact, S_f, S_g)


def _constant_case(f0: float = 1.0, g0: float = 2.0) -> ManufacturedCase:
    def const(v):
        return lambda t, x: np.full(np.shape(x), v, dtype=float)

    return ManufacturedCase("constant", const(f0), const(g0), const(0.0), const(0.0))


def manufactured_case(
    p: ModelParams, choice: str = "trig", *, amp: float = 0.5, x_lo: float = 0.0, length: float = 1.0
) -> ManufacturedCase:
    if choice == "trig":
        return _trig_case(p, amp, x_lo, length)
    if choice == "constant":
        return _constant_case()
    raise ValueError(f"unknown manufactured case {choice!r}; choose from {MANUFACTURED_CHOICES}")


def solve_with_sources(
    p: ModelParams,
    s0: State,
    cfg: solver.SolverConfig,
    t_end: float,
    case: ManufacturedCase,
    observer=None,
) -> State:
    """solver.run with the case's forcing added at the new time level."""
    return solver.run(p, s0, cfg, t_end, observer=observer, sources=case.sources)
