"""Uniform cell-centred 1D mesh with no-flux closure, and the State snapshot."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadDomain, IncompatibleGrids, LengthMismatch, NegativeState


@dataclass(frozen=True)
class Grid1D:
    x_lo: float
    x_hi: float
    n_cells: int

    @property
    def h(self) -> float:
        return (self.x_hi - self.x_lo) / self.n_cells

    @property
    def length(self) -> float:
        return self.x_hi - self.x_lo

    @property
    def cell_centers(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.n_cells) + 0.5) * self.h

    @property
    def faces(self) -> np.ndarray:
        return self.x_lo + np.arange(self.n_cells + 1) * self.h

    def same_as(self, other: "Grid1D") -> bool:
        return (self.x_lo, self.x_hi, self.n_cells) == (other.x_lo, other.x_hi, other.n_cells)


def make_grid(x_lo: float, x_hi: float, n_cells: int) -> Grid1D:
    x_lo, x_hi = float(x_lo), float(x_hi)
    if not (np.isfinite(x_lo) and np.isfinite(x_hi)) or x_lo >= x_hi:
        raise BadDomain(f"need x_lo < x_hi, got ({x_lo}, {x_hi})")
    if int(n_cells) != n_cells or n_cells < 2:
        raise BadDomain(f"need n_cells >= 2, got {n_cells}")
    return Grid1D(x_lo, x_hi, int(n_cells))


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class State:
    """Cell averages of (f, g) at one time instant. Treated as immutable."""

    grid: Grid1D
    f: np.ndarray
    g: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "f", _frozen(self.f))
        object.__setattr__(self, "g", _frozen(self.g))
        n = self.grid.n_cells
        if self.f.shape != (n,) or self.g.shape != (n,):
            raise LengthMismatch(
                f"state arrays must have length {n}, got {self.f.shape}, {self.g.shape}"
            )
        if np.any(self.f < 0) or np.any(self.g < 0) or not (
            np.all(np.isfinite(self.f)) and np.all(np.isfinite(self.g))
        ):
            raise NegativeState("state components must be finite and nonnegative")

    def replace(self, *, f=None, g=None, time=None) -> "State":
        return State(
            self.grid,
            self.f if f is None else f,
            self.g if g is None else g,
            self.time if time is None else time,
        )

    def swapped(self) -> "State":
        return State(self.grid, self.g, self.f, self.time)


def face_gradient(grid: Grid1D, field: np.ndarray) -> np.ndarray:
    """Two-point gradients on all n+1 faces; the boundary faces are exactly 0."""
    field = np.asarray(field, dtype=float)
    if field.shape != (grid.n_cells,):
        raise LengthMismatch(f"field must have length {grid.n_cells}, got {field.shape}")
    out = np.zeros(grid.n_cells + 1)
    out[1:-1] = np.diff(field) / grid.h
    return out


def face_mean(field: np.ndarray) -> np.ndarray:
    """Arithmetic means on the n-1 interior faces."""
    field = np.asarray(field, dtype=float)
    return 0.5 * (field[:-1] + field[1:])


def _transfer(values: np.ndarray, n_src: int, n_dst: int) -> np.ndarray:
    if n_dst == n_src:
        return values.copy()
    if n_src % n_dst == 0:
        return values.reshape(n_dst, n_src // n_dst).mean(axis=1)
    if n_dst % n_src == 0:
        return np.repeat(values, n_dst // n_src)
    raise IncompatibleGrids(f"cell counts {n_src} and {n_dst} are not nested")


def interpolate_to_grid(src: State, dst_grid: Grid1D) -> State:
    """Conservative transfer between nested grids on the same interval.

    Coarsening averages the covered cells; refining injects piecewise constants.
    """
    sg = src.grid
    if (sg.x_lo, sg.x_hi) != (dst_grid.x_lo, dst_grid.x_hi):
        raise IncompatibleGrids("grids must share endpoints")
    n_src, n_dst = sg.n_cells, dst_grid.n_cells
    return State(
        dst_grid,
        _transfer(src.f, n_src, n_dst),
        _transfer(src.g, n_src, n_dst),
        src.time,
    )


def sample(grid: Grid1D, func_f, func_g, time: float = 0.0) -> State:
    """State from point values of two callables at the cell centres."""
    x = grid.cell_centers
    f = np.broadcast_to(np.asarray(func_f(x), dtype=float), x.shape)
    g = np.broadcast_to(np.asarray(func_g(x), dtype=float), x.shape)
    return State(grid, f, g, time)
