"""Fully implicit finite-volume time stepping.

Backward Euler in time, two-point fluxes on a uniform 1D mesh, zero flux on
the boundary faces. Each step solves the nonlinear system with a damped
Newton iteration whose Jacobian is assembled analytically; the 2x2-block
tridiagonal structure is stored in LAPACK band format with the unknowns
interleaved as (f0, g0, f1, g1, ...), giving three sub- and super-diagonals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

from .errors import ContractError, NegativeState, NewtonDiverged, PositivityLost
from .grid import State
from .model import ModelParams

#: source callback: (t, x) -> (S_f, S_g), evaluated at the new time level
SourceFn = Callable[[float, np.ndarray], tuple]

MOBILITY_AVERAGES = ("arithmetic", "upwind")


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    mobility_average: str = "arithmetic"
    damping: float = 0.5

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if self.newton_max_iter < 1:
            raise ValueError("newton_max_iter must be >= 1")
        if self.mobility_average not in MOBILITY_AVERAGES:
            raise ValueError(f"mobility_average must be one of {MOBILITY_AVERAGES}")
        if not 0 < self.damping < 1:
            raise ValueError("damping must lie in (0, 1)")


@dataclass(frozen=True)
class StepReport:
    newton_iters: int
    final_residual: float
    positivity_clipped: bool = False
    continuation: bool = False


# ---------------------------------------------------------------------------
# flux assembly


def _face_mobility(u, grad, scheme):
    """Face values of a species and d(face value)/d(left), d/d(right)."""
    if scheme == "arithmetic":
        m = 0.5 * (u[:-1] + u[1:])
        half = np.full_like(m, 0.5)
        return m, half, half
    # upwind along the transport velocity -grad: a nonnegative gradient moves
    # mass leftwards, so the right cell is upstream
    right = grad >= 0
    m = np.where(right, u[1:], u[:-1])
    return m, (~right).astype(float), right.astype(float)


def _species_fluxes(u, pressure, h, scheme):
    grad = np.diff(pressure) / h
    m, dm_left, dm_right = _face_mobility(u, grad, scheme)
    return m * grad, grad, m, dm_left, dm_right


def interior_fluxes(p: ModelParams, f, g, h, scheme="arithmetic"):
    """Fluxes on the n-1 interior faces (no validation)."""
    Ff = _species_fluxes(f, p.a * f + p.b * g, h, scheme)[0]
    Fg = _species_fluxes(g, p.c * f + p.d * g, h, scheme)[0]
    return Ff, Fg


def assemble_fluxes(p: ModelParams, s: State, cfg: SolverConfig) -> tuple[np.ndarray, np.ndarray]:
    """Face fluxes f*d(af+bg)/dx and g*d(cf+dg)/dx on all n+1 faces."""
    if np.any(s.f < 0) or np.any(s.g < 0):
        raise NegativeState("fluxes need a nonnegative state")
    n = s.grid.n_cells
    Ff, Fg = np.zeros(n + 1), np.zeros(n + 1)
    Ff[1:-1], Fg[1:-1] = interior_fluxes(p, s.f, s.g, s.grid.h, cfg.mobility_average)
    return Ff, Fg


def divergence(F_interior: np.ndarray, h: float) -> np.ndarray:
    """Cell divergence of interior-face fluxes with zero boundary fluxes."""
    return np.diff(np.concatenate(([0.0], F_interior, [0.0]))) / h


# ---------------------------------------------------------------------------
# Newton machinery


class _System:
    """Residual and Jacobian of one backward-Euler step."""

    def __init__(self, p, old: State, dt, scheme, src_f, src_g):
        self.p = p
        self.f_old, self.g_old = old.f, old.g
        self.h = old.grid.h
        self.n = old.grid.n_cells
        self.dt = dt
        self.scheme = scheme
        self.src_f, self.src_g = src_f, src_g

    def residual(self, f, g):
        p, h, dt = self.p, self.h, self.dt
        Ff, Fg = interior_fluxes(p, f, g, h, self.scheme)
        rhs_f = divergence(Ff, h)
        rhs_g = divergence(Fg, h)
        if self.src_f is not None:
            rhs_f = rhs_f + self.src_f
            rhs_g = rhs_g + self.src_g
        return f - self.f_old - dt * rhs_f, g - self.g_old - dt * rhs_g

    def _blocks(self, u, pressure, coef_self, coef_other):
        """Tridiagonal blocks d(R_u)/d(u) and d(R_u)/d(other) as (lower, diag, upper)."""
        h, dt, n = self.h, self.dt, self.n
        _, grad, m, dm_l, dm_r = _species_fluxes(u, pressure, h, self.scheme)
        # face k = 1..n-1 sits between cell k-1 (left) and k (right)
        dF_self_l = dm_l * grad - m * coef_self / h
        dF_self_r = dm_r * grad + m * coef_self / h
        dF_oth_l = -m * coef_other / h
        dF_oth_r = m * coef_other / h
        out = []
        for dl, dr, ident in ((dF_self_l, dF_self_r, 1.0), (dF_oth_l, dF_oth_r, 0.0)):
            diag = np.full(n, ident)
            # cell i: R_i = ... - dt/h (F_{i+1} - F_i)
            diag[:-1] -= dt / h * dl  # face i+1, cell i is its left
            diag[1:] += dt / h * dr  # face i, cell i is its right
            upper = -dt / h * dr  # d R_i / d u_{i+1} through face i+1
            lower = dt / h * dl  # d R_i / d u_{i-1} through face i
            out.append((lower, diag, upper))
        return out

    def jacobian_blocks(self, f, g):
        p = self.p
        Jff, Jfg = self._blocks(f, p.a * f + p.b * g, p.a, p.b)
        Jgg, Jgf = self._blocks(g, p.c * f + p.d * g, p.d, p.c)
        return Jff, Jfg, Jgf, Jgg


def _band_put(ab, u_bw, rows, cols, vals):
    ab[u_bw + rows - cols, cols] = vals


def _solve_coupled(blocks, rf, rg):
    Jff, Jfg, Jgf, Jgg = blocks
    n = rf.size
    ab = np.zeros((7, 2 * n))
    idx = np.arange(n)
    for (lower, diag, upper), ro, co in (
        (Jff, 0, 0),
        (Jfg, 0, 1),
        (Jgf, 1, 0),
        (Jgg, 1, 1),
    ):
        _band_put(ab, 3, 2 * idx + ro, 2 * idx + co, diag)
        _band_put(ab, 3, 2 * idx[1:] + ro, 2 * idx[:-1] + co, lower)
        _band_put(ab, 3, 2 * idx[:-1] + ro, 2 * idx[1:] + co, upper)
    rhs = np.empty(2 * n)
    rhs[0::2], rhs[1::2] = -rf, -rg
    delta = solve_banded((3, 3), ab, rhs, overwrite_ab=True, overwrite_b=True, check_finite=False)
    return delta[0::2], delta[1::2]


def _solve_single(block, r):
    lower, diag, upper = block
    n = r.size
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1] = diag
    ab[2, :-1] = lower
    return solve_banded((1, 1), ab, -r, check_finite=False)


def _tri_matvec(block, v):
    lower, diag, upper = block
    out = diag * v
    out[1:] += lower * v[:-1]
    out[:-1] += upper * v[1:]
    return out


def _refine(blocks, rf, rg, df, dg):
    """One block Gauss-Seidel sweep on the coupled Newton correction.

    The interleaved solve leaves rounding of the size of the larger species
    in both increments. When one species is many orders of magnitude
    smaller, that noise alone can point it negative. Re-solving each
    species' own block against the other's increment restores accuracy
    relative to its own scale; in exact arithmetic nothing changes.
    """
    Jff, Jfg, Jgf, Jgg = blocks
    try:
        df_new = _solve_single(Jff, rf + _tri_matvec(Jfg, dg))
        dg_new = _solve_single(Jgg, rg + _tri_matvec(Jgf, df_new))
    except np.linalg.LinAlgError:
        # a single block can be singular where the coupled system is not
        return df, dg
    if np.all(np.isfinite(df_new)) and np.all(np.isfinite(dg_new)):
        return df_new, dg_new
    return df, dg


def _pin(block, cross, r, mask, u):
    """Copies with the rows in ``mask`` replaced by the identity, so that the
    solved increment there is ``-u`` (the cell lands exactly on zero)."""
    lower, diag, upper = (x.copy() for x in block)
    diag[mask] = 1.0
    lower[mask[1:]] = 0.0
    upper[mask[:-1]] = 0.0
    cross = tuple(x.copy() for x in cross)
    cross[1][mask] = 0.0
    cross[0][mask[1:]] = 0.0
    cross[2][mask[:-1]] = 0.0
    return (lower, diag, upper), cross, np.where(mask, u, r)


def _direction(blocks, rf, rg, f, g, active_f, active_g, pin=False):
    """Newton correction; with ``pin``, overshooting cells are sent exactly to zero.

    Near vacuum the linearized correction can push cells below zero by far
    more than their value (or carry tiny negative values into cells that are
    exactly zero). Global damping then stalls every other unknown. Such cells
    are pinned: their increment is fixed at minus their value and the system
    is re-solved for the rest, until the pinned set stops growing. A pinned
    cell is released as soon as a later correction points upward.
    Convergence is still judged on the full residual, so the accepted state
    solves the unmodified scheme.
    """
    pf = np.zeros(f.size, dtype=bool)
    pg = np.zeros(g.size, dtype=bool)
    for _ in range(f.size + g.size + 1):
        Jff, Jfg, Jgf, Jgg = blocks
        Jff, Jfg, rf_p = _pin(Jff, Jfg, rf, pf, f)
        Jgg, Jgf, rg_p = _pin(Jgg, Jgf, rg, pg, g)
        pinned = (Jff, Jfg, Jgf, Jgg)
        if active_f and active_g:
            df, dg = _refine(pinned, rf_p, rg_p, *_solve_coupled(pinned, rf_p, rg_p))
        elif active_f:
            df, dg = _solve_single(Jff, rf_p), np.zeros_like(g)
        else:
            df, dg = np.zeros_like(f), _solve_single(Jgg, rg_p)
        if not pin:
            break
        new_f = (f + df < 0) & ~pf
        new_g = (g + dg < 0) & ~pg
        if not (new_f.any() or new_g.any()):
            break
        pf |= new_f
        pg |= new_g
    # pinned cells land on exactly zero rather than a rounding residue
    df = np.where(pf, -f, df)
    dg = np.where(pg, -g, dg)
    return df, dg, bool(pf.any() or pg.any())


def _backtrack(f, g, df, dg, cfg):
    """Largest damping power keeping the iterate nonnegative, or None."""
    lam = 1.0
    for _ in range(cfg.newton_max_iter):
        f_try, g_try = f + lam * df, g + lam * dg
        if np.all(f_try >= 0) and np.all(g_try >= 0):
            return lam, f_try, g_try
        lam *= cfg.damping
    return None


def _as_source(sources, t, grid):
    if sources is None:
        return None, None
    sf, sg = sources(t, grid.cell_centers)
    shape = (grid.n_cells,)
    return (
        np.broadcast_to(np.asarray(sf, dtype=float), shape),
        np.broadcast_to(np.asarray(sg, dtype=float), shape),
    )


# number of backtracking halvings after which the pinned direction is tried
_PIN_AFTER = 10


def _pinned_trial(sys, blocks, rf, rg, f, g, cfg, active_f, active_g, plain):
    try:
        df, dg, pinned = _direction(blocks, rf, rg, f, g, active_f, active_g, pin=True)
    except np.linalg.LinAlgError:
        return plain, False
    if not (np.all(np.isfinite(df)) and np.all(np.isfinite(dg))):
        return plain, False
    trial = _backtrack(f, g, df, dg, cfg)
    if trial is None:
        return plain, False
    if plain is None:
        return trial, pinned

    def size(t):
        r1, r2 = sys.residual(t[1], t[2])
        return max(np.max(np.abs(r1)), np.max(np.abs(r2)))

    return (trial, pinned) if size(trial) < size(plain) else (plain, False)


class _NewtonFailure(Exception):
    def __init__(self, kind, residual):
        self.kind, self.residual = kind, residual


def _newton(sys, f, g, cfg, active_f, active_g):
    """Damped Newton from (f, g); backtracks until the iterate is nonnegative."""
    rf, rg = sys.residual(f, g)
    res = max(np.max(np.abs(rf)), np.max(np.abs(rg)))
    iters = 0
    pinned = False
    while res > cfg.newton_tol:
        if iters >= cfg.newton_max_iter:
            # still held at zero: the nonnegativity constraint is what binds
            raise _NewtonFailure("positivity" if pinned else "diverged", res)
        blocks = sys.jacobian_blocks(f, g)
        try:
            df, dg, pinned = _direction(blocks, rf, rg, f, g, active_f, active_g)
        except np.linalg.LinAlgError:
            raise _NewtonFailure("diverged", res) from None
        iters += 1
        if not (np.all(np.isfinite(df)) and np.all(np.isfinite(dg))):
            raise _NewtonFailure("diverged", res)
        trial = _backtrack(f, g, df, dg, cfg)
        if trial is None or trial[0] < cfg.damping**_PIN_AFTER:
            # heavy damping stalls every unknown; try holding overshooting
            # cells at zero and keep whichever candidate has the smaller residual
            trial, pinned = _pinned_trial(sys, blocks, rf, rg, f, g, cfg, active_f, active_g, trial)
        if trial is None:
            raise _NewtonFailure("positivity", res)
        _, f_try, g_try = trial
        f, g = f_try, g_try
        rf, rg = sys.residual(f, g)
        res = max(np.max(np.abs(rf)), np.max(np.abs(rg)))
        if not math.isfinite(res):
            raise _NewtonFailure("diverged", res)
    return f, g, iters, float(res)


def _continuation(p, s, cfg, dt, src, active, max_stages=200):
    """Solve the dt-system by marching the step-length parameter from 0 to dt.

    Every stage restarts from the old state's equation with a larger step
    parameter, using the previous stage's solution as the Newton guess; only
    the final stage (parameter = dt) is returned, so the result solves the
    same discrete system as a direct Newton solve would.
    """
    f, g = s.f.copy(), s.g.copy()
    theta, factor = 0.0, 1e-3
    total_iters = 0
    last = None
    for _ in range(max_stages):
        trial = 1.0 if theta > 0 and theta * (1 + factor) >= 1.0 else (
            min(1.0, theta * (1 + factor)) if theta > 0 else factor
        )
        sys = _System(p, s, trial * dt, cfg.mobility_average, *src)
        try:
            f_new, g_new, it, res = _newton(sys, f, g, cfg, *active)
        except _NewtonFailure as exc:
            last = exc
            factor *= 0.25
            if factor < 1e-12:
                break
            continue
        total_iters += it
        f, g, theta = f_new, g_new, trial
        if theta == 1.0:
            return f, g, total_iters, res
        factor = min(factor * 4.0, 1e6)
    raise last or _NewtonFailure("diverged", float("inf"))


def step(
    p: ModelParams,
    s: State,
    cfg: SolverConfig,
    sources: Optional[SourceFn] = None,
    dt: Optional[float] = None,
) -> tuple[State, StepReport]:
    """Advance ``s`` by one backward-Euler step of length ``dt`` (default cfg.dt).

    Newton starts from ``s``. If it cannot reach the tolerance through
    nonnegative iterates, the same system is re-solved by continuation in
    the step parameter (see ``StepReport.continuation``).

    A species that vanishes identically (and has no source) has a zero row
    in the mobility; it is an exact solution of its own equations and is
    held out of the Newton system, which keeps it bit-exactly zero.
    """
    dt = cfg.dt if dt is None else float(dt)
    grid = s.grid
    t_new = s.time + dt
    src = _as_source(sources, t_new, grid)
    src_f, src_g = src

    active_f = bool(np.any(s.f != 0) or (src_f is not None and np.any(src_f != 0)))
    active_g = bool(np.any(s.g != 0) or (src_g is not None and np.any(src_g != 0)))
    if not (active_f or active_g):
        return State(grid, s.f, s.g, t_new), StepReport(0, 0.0)

    sys = _System(p, s, dt, cfg.mobility_average, src_f, src_g)
    try:
        f, g, iters, res = _newton(sys, s.f.copy(), s.g.copy(), cfg, active_f, active_g)
        used_continuation = False
    except _NewtonFailure:
        try:
            f, g, iters, res = _continuation(p, s, cfg, dt, src, (active_f, active_g))
        except _NewtonFailure as exc:
            if exc.kind == "positivity":
                raise PositivityLost(
                    f"no nonnegative iterate after {cfg.newton_max_iter} backtracks",
                    time=s.time,
                ) from None
            raise NewtonDiverged(exc.residual, time=s.time) from None
        used_continuation = True
    return State(grid, f, g, t_new), StepReport(iters, res, False, used_continuation)


def _step_plan(t0: float, t_end: float, dt: float) -> list[float]:
    """Step lengths covering [t0, t_end]; the last one may be shorter."""
    span = t_end - t0
    if span <= 0:
        return []
    ratio = span / dt
    n_full = round(ratio)
    if abs(ratio - n_full) <= 1e-9 * max(1.0, ratio):
        return [dt] * int(n_full)
    n_full = int(math.floor(ratio))
    tail = span - n_full * dt
    return [dt] * n_full + [tail]


def run(
    p: ModelParams,
    s0: State,
    cfg: SolverConfig,
    t_end: float,
    observer: Optional[Callable[[State], None]] = None,
    sources: Optional[SourceFn] = None,
) -> State:
    """Step from ``s0.time`` to ``t_end``, calling ``observer`` after each step."""
    if t_end < s0.time:
        raise ValueError(f"t_end={t_end} precedes the initial time {s0.time}")
    plan = _step_plan(s0.time, t_end, cfg.dt)
    s = s0
    t = s0.time
    for k, dt_k in enumerate(plan):
        try:
            s, _ = step(p, s, cfg, sources=sources, dt=dt_k)
        except ContractError as exc:
            exc.time = t
            exc.args = (f"{exc.args[0] if exc.args else ''} (at t={t!r})",)
            raise
        # land on exact times: t0 + k*dt, and exactly t_end at the end
        t = t_end if k == len(plan) - 1 else s0.time + (k + 1) * cfg.dt
        s = State(s.grid, s.f, s.g, t)
        if observer is not None:
            observer(s)
    return s
