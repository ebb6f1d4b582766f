"""Relative entropy and the diagnostics built around it.

Cell integrals use the midpoint rule; gradient integrals use the interior
faces with two-point gradients and arithmetic face means.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import xlogy

from .errors import BadArgs, BadEta, BadSeries, DegenerateReference, GridMismatch
from .grid import State, face_gradient, face_mean
from .model import ModelParams

SIGMA_MIN = 1e-10


@dataclass(frozen=True)
class SigmaCheck:
    sigma_lower: float
    grad_bound: float


@dataclass(frozen=True)
class ProductionDecomposition:
    """Instantaneous rates of the two parts of the entropy production."""

    T2_I: float
    T2_II: float
    bound_I: float
    bound_II: float

    @property
    def T2(self) -> float:
        return self.T2_I + self.T2_II


@dataclass(frozen=True)
class EntropyRecord:
    time: float
    H: float
    mass_f: float
    mass_g: float
    l2w_sq: float
    sigma_check: SigmaCheck
    H_eta: Optional[float] = None
    production: Optional[ProductionDecomposition] = field(default=None, compare=False)


def _check_same_grid(u1: State, u2: State):
    if not u1.grid.same_as(u2.grid):
        raise GridMismatch(f"states live on different grids: {u1.grid} vs {u2.grid}")


def entropy_density(x, y):
    """x ln(x/y) - (x - y), with 0 ln 0 = 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ratio = x / y
    log_part = xlogy(x, ratio)
    # x/y can underflow to 0 for subnormal x; split the logarithm there
    under = (ratio == 0) & (x > 0)
    if np.any(under):
        log_part = np.where(under, xlogy(x, x) - xlogy(x, y), log_part)
    return log_part - (x - y)


def relative_entropy(p: ModelParams, u1: State, u2: State, sigma_min: float = SIGMA_MIN) -> float:
    """Discrete relative entropy of u1 with respect to a positive reference u2."""
    _check_same_grid(u1, u2)
    lower = float(min(u2.f.min(), u2.g.min()))
    if lower < sigma_min or lower <= 0:
        raise DegenerateReference(
            f"reference minimum {lower:.3e} is below sigma_min={sigma_min:.3e}"
        )
    dens = entropy_density(u1.f, u2.f) + p.b_over_c * entropy_density(u1.g, u2.g)
    return float(u1.grid.h * np.sum(dens))


def relative_entropy_regularized(p: ModelParams, u1: State, u2: State, eta: float) -> float:
    """Entropy with ln((x + eta)/y) in place of ln(x/y)."""
    if not 0 < eta < 1:
        raise BadEta(f"eta must lie in (0, 1), got {eta}")
    _check_same_grid(u1, u2)
    if min(u2.f.min(), u2.g.min()) <= 0:
        raise DegenerateReference("regularized entropy needs a positive reference")

    def dens(x, y):
        return x * np.log((x + eta) / y) - (x - y)

    total = dens(u1.f, u2.f) + p.b_over_c * dens(u1.g, u2.g)
    return float(u1.grid.h * np.sum(total))


def pointwise_quadratic_bound(x, y):
    """Both sides of x ln(x/y) - (x-y) >= |x-y|^2 / (2 max(x, y)).

    Scalars give floats; arrays are evaluated elementwise.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if np.any(xa < 0) or np.any(ya <= 0) or not (np.all(np.isfinite(xa)) and np.all(np.isfinite(ya))):
        raise BadArgs(f"need x >= 0 and y > 0, got ({x}, {y})")
    lhs = entropy_density(xa, ya)
    rhs = (xa - ya) ** 2 / (2.0 * np.maximum(xa, ya))
    if lhs.ndim == 0:
        return float(lhs), float(rhs)
    return lhs, rhs


def mass(s: State) -> tuple[float, float]:
    h = s.grid.h
    return float(h * np.sum(s.f)), float(h * np.sum(s.g))


def weighted_l2_sq(p: ModelParams, u1: State, u2: State) -> float:
    _check_same_grid(u1, u2)
    d = (u1.f - u2.f) ** 2 + p.b_over_c * (u1.g - u2.g) ** 2
    return float(u1.grid.h * np.sum(d))


def sup_bound(u1: State, u2: State) -> float:
    return float(max(u1.f.max(), u1.g.max(), u2.f.max(), u2.g.max()))


def sigma_bounds(u2: State) -> tuple[float, float]:
    lower = float(min(u2.f.min(), u2.g.min()))
    gf = face_gradient(u2.grid, u2.f)[1:-1]
    gg = face_gradient(u2.grid, u2.g)[1:-1]
    grad_sup = float(max(np.abs(gf).max(initial=0.0), np.abs(gg).max(initial=0.0)))
    return lower, grad_sup


@dataclass
class _FaceData:
    """Face means and gradients of both pairs on the interior faces."""

    f1: np.ndarray
    f2: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    df1: np.ndarray
    df2: np.ndarray
    dg1: np.ndarray
    dg2: np.ndarray

    @classmethod
    def build(cls, u1: State, u2: State) -> "_FaceData":
        grid = u1.grid
        return cls(
            face_mean(u1.f),
            face_mean(u2.f),
            face_mean(u1.g),
            face_mean(u2.g),
            face_gradient(grid, u1.f)[1:-1],
            face_gradient(grid, u2.f)[1:-1],
            face_gradient(grid, u1.g)[1:-1],
            face_gradient(grid, u2.g)[1:-1],
        )


def production_integrands(p: ModelParams, fd: _FaceData) -> dict[str, np.ndarray]:
    """Per-face integrands of T2, T2_I and their completed-square bounds."""
    a, b, c, d = p.as_tuple()
    rf = fd.f1 / fd.f2
    rg = fd.g1 / fd.g2
    # T2 with f2 grad(f1/f2) written as grad f1 - (f1/f2) grad f2
    wf = fd.df1 - rf * fd.df2
    wg = fd.dg1 - rg * fd.dg2
    dPf = (a * fd.df1 + b * fd.dg1) - (a * fd.df2 + b * fd.dg2)
    dPg = (c * fd.df1 + d * fd.dg1) - (c * fd.df2 + d * fd.dg2)
    t2 = -(dPf * wf) - (b / c) * (dPg * wg)

    k = b * (a * d - b * c) / (a * c)
    t2_i = -k * (fd.dg1**2 - (1.0 + rg) * fd.dg1 * fd.dg2 + rg * fd.dg2**2)
    bound_i = k * ((rg - 1.0) / 2.0 * fd.dg2) ** 2
    bound_ii = 0.5 * (((rf - 1.0) * fd.df2) ** 2 + (b / a) ** 2 * ((rg - 1.0) * fd.dg2) ** 2)
    return {"T2": t2, "T2_I": t2_i, "T2_II": t2 - t2_i, "bound_I": bound_i, "bound_II": bound_ii}


def production_decomposition(p: ModelParams, u1: State, u2: State) -> ProductionDecomposition:
    """Face-quadrature rates of T2_I, T2_II and their upper bounds.

    ``bound_II`` bounds ``T2_II / a``, matching the way the inequality is stated.
    """
    _check_same_grid(u1, u2)
    if min(u2.f.min(), u2.g.min()) <= 0:
        raise DegenerateReference("production decomposition needs a positive reference")
    h = u1.grid.h
    parts = production_integrands(p, _FaceData.build(u1, u2))
    return ProductionDecomposition(
        T2_I=float(h * parts["T2_I"].sum()),
        T2_II=float(h * parts["T2_II"].sum()),
        bound_I=float(h * parts["bound_I"].sum()),
        bound_II=float(h * parts["bound_II"].sum()),
    )


# ---------------------------------------------------------------------------
# discrete chain rule


@dataclass(frozen=True)
class Phi:
    """Convex integrand for the chain-rule residual: ``square`` or ``xlogx_eta``."""

    kind: str
    eta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("square", "xlogx_eta"):
            raise BadArgs(f"unknown Phi kind {self.kind!r}")
        if self.kind == "xlogx_eta" and not self.eta > 0:
            raise BadEta("xlogx_eta needs eta > 0")

    @classmethod
    def square(cls) -> "Phi":
        return cls("square")

    @classmethod
    def xlogx_eta(cls, eta: float) -> "Phi":
        return cls("xlogx_eta", eta)

    def value(self, s):
        if self.kind == "square":
            return s * s
        return s * np.log(s + self.eta) - s

    def derivative(self, s):
        if self.kind == "square":
            return 2.0 * s
        return np.log(s + self.eta) + s / (s + self.eta) - 1.0


def chain_rule_residual(series: Sequence[State], phi: Phi, component: str = "f") -> float:
    """Largest one-step gap between the change of the integral of Phi(u) and
    the time-midpoint bracket <du/dt, Phi'(u)> over a time-ordered series."""
    if len(series) < 2:
        raise BadSeries("need at least two states")
    grid = series[0].grid
    if any(not s.grid.same_as(grid) for s in series):
        raise BadSeries("states live on different grids")
    if component not in ("f", "g"):
        raise BadArgs("component must be 'f' or 'g'")
    h = grid.h
    worst = 0.0
    for s0, s1 in zip(series[:-1], series[1:]):
        u0, u1 = getattr(s0, component), getattr(s1, component)
        d_integral = h * (np.sum(phi.value(u1)) - np.sum(phi.value(u0)))
        bracket = h * np.sum((u1 - u0) * phi.derivative(0.5 * (u0 + u1)))
        worst = max(worst, abs(d_integral - bracket))
    return float(worst)


def make_record(
    p: ModelParams,
    u1: State,
    u2: State,
    sigma_min: float = SIGMA_MIN,
    eta: Optional[float] = None,
    with_production: bool = True,
) -> EntropyRecord:
    """All diagnostics of the pair (u1, u2) at u1's time."""
    H = relative_entropy(p, u1, u2, sigma_min)
    lower, grad_sup = sigma_bounds(u2)
    mf, mg = mass(u1)
    return EntropyRecord(
        time=u1.time,
        H=H,
        mass_f=mf,
        mass_g=mg,
        l2w_sq=weighted_l2_sq(p, u1, u2),
        sigma_check=SigmaCheck(lower, grad_sup),
        H_eta=None if eta is None else relative_entropy_regularized(p, u1, u2, eta),
        production=production_decomposition(p, u1, u2) if with_production else None,
    )
