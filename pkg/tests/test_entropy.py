import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from xdiff import entropy
from xdiff.entropy import Phi
from xdiff.errors import BadArgs, BadEta, BadSeries, DegenerateReference, GridMismatch
from xdiff.grid import State, make_grid
from xdiff.model import new_model

from .strategies import admissible_params, state_pairs


def const(n, f, g, lo=0.0, hi=1.0):
    return State(make_grid(lo, hi, n), np.full(n, float(f)), np.full(n, float(g)))


P = new_model(1, 1, 1, 2)


def test_entropy_examples():
    assert entropy.relative_entropy(P, const(8, 1.5, 2), const(8, 1.5, 2)) == 0.0
    assert entropy.relative_entropy(P, const(8, 2, 1), const(8, 1, 1)) == pytest.approx(2 * math.log(2) - 1, rel=1e-14)
    assert entropy.relative_entropy(P, const(8, 0, 1), const(8, 1, 1)) == pytest.approx(1.0, rel=1e-14)


def test_entropy_weights_g_by_b_over_c():
    q = new_model(1, 2, 1, 3)
    H = entropy.relative_entropy(q, const(4, 1, 2), const(4, 1, 1))
    assert H == pytest.approx(2 * (2 * math.log(2) - 1), rel=1e-14)


def test_entropy_errors():
    with pytest.raises(DegenerateReference):
        entropy.relative_entropy(P, const(4, 1, 1), const(4, 1e-12, 1))
    with pytest.raises(DegenerateReference):
        entropy.relative_entropy(P, const(4, 1, 1), const(4, 0, 1), sigma_min=0.0)
    with pytest.raises(GridMismatch):
        entropy.relative_entropy(P, const(4, 1, 1), const(8, 1, 1))


def test_regularized_constant_case():
    u = const(10, 1, 1)
    assert entropy.relative_entropy_regularized(P, u, u, 0.5) == pytest.approx(2 * math.log(1.5), rel=1e-14)


@pytest.mark.parametrize("eta", [0.0, 1.0, -0.1, 2.0])
def test_regularized_bad_eta(eta):
    with pytest.raises(BadEta):
        entropy.relative_entropy_regularized(P, const(4, 1, 1), const(4, 1, 1), eta)


def test_density_survives_underflowing_ratio():
    d = entropy.entropy_density(5e-324, 2.0)
    assert np.isfinite(d) and d == pytest.approx(2.0)


def test_pointwise_examples():
    assert entropy.pointwise_quadratic_bound(1, 1) == (0.0, 0.0)
    lhs, rhs = entropy.pointwise_quadratic_bound(2, 1)
    assert lhs == pytest.approx(2 * math.log(2) - 1) and rhs == 0.25
    assert entropy.pointwise_quadratic_bound(0, 1) == (1.0, 0.5)
    for bad in ((-1, 1), (1, 0), (1, -2)):
        with pytest.raises(BadArgs):
            entropy.pointwise_quadratic_bound(*bad)


@given(st.floats(0, 10), st.floats(1e-6, 10))
def test_pointwise_bound_holds(x, y):
    lhs, rhs = entropy.pointwise_quadratic_bound(x, y)
    assert lhs - rhs >= -1e-12


def test_mass_examples():
    assert entropy.mass(const(10, 1, 0))[0] == pytest.approx(1.0)
    grid = make_grid(0, 1, 10)
    f = np.where(np.arange(10) < 5, 2.0, 0.0)
    assert entropy.mass(State(grid, f, f))[0] == pytest.approx(1.0)


def test_weighted_l2_examples():
    assert entropy.weighted_l2_sq(P, const(6, 2, 1), const(6, 2, 1)) == 0.0
    assert entropy.weighted_l2_sq(P, const(6, 2, 1), const(6, 1, 1)) == pytest.approx(1.0)
    with pytest.raises(GridMismatch):
        entropy.weighted_l2_sq(P, const(6, 2, 1), const(4, 1, 1))


def test_sigma_bounds_examples():
    assert entropy.sigma_bounds(const(5, 2, 3)) == (2.0, 0.0)
    grid = make_grid(0, 1, 4)
    lower, grad = entropy.sigma_bounds(State(grid, grid.cell_centers, np.ones(4)))
    assert lower == 0.125 and grad == pytest.approx(1.0)


@given(state_pairs())
def test_entropy_nonnegative_and_quadratic_control(pair):
    u1, u2 = pair
    H = entropy.relative_entropy(P, u1, u2, 0.1)
    assert H >= 0
    bound = entropy.weighted_l2_sq(P, u1, u2) / (2 * entropy.sup_bound(u1, u2))
    assert H - bound >= -1e-10


@given(state_pairs(lo1=0.1))
def test_zero_entropy_only_for_equal_states(pair):
    u1, u2 = pair
    H = entropy.relative_entropy(P, u1, u2, 0.1)
    if np.array_equal(u1.f, u2.f) and np.array_equal(u1.g, u2.g):
        assert H == 0
    else:
        # strictly positive up to rounding of nearly equal cells
        assert H > 0 or (np.allclose(u1.f, u2.f) and np.allclose(u1.g, u2.g))


@given(state_pairs())
def test_regularization_limit_is_monotone(pair):
    u1, u2 = pair
    H = entropy.relative_entropy(P, u1, u2, 0.1)
    gaps = [abs(entropy.relative_entropy_regularized(P, u1, u2, e) - H) for e in (1e-2, 1e-4, 1e-6)]
    assert gaps[2] <= 1e-4 * (1 + H)
    assert gaps[0] >= gaps[1] >= gaps[2]


@given(state_pairs(), st.integers(1, 3))
def test_entropy_additive_over_subintervals(pair, k):
    u1, u2 = pair
    n = u1.grid.n_cells
    cut = max(2, min(n - 2, n * k // 4))
    h = u1.grid.h
    left = make_grid(0, cut * h, cut)
    right = make_grid(cut * h, 1.0, n - cut)

    def part(s, g, sl):
        return State(g, s.f[sl], s.g[sl])

    HL = entropy.relative_entropy(P, part(u1, left, slice(None, cut)), part(u2, left, slice(None, cut)), 0.1)
    HR = entropy.relative_entropy(P, part(u1, right, slice(cut, None)), part(u2, right, slice(cut, None)), 0.1)
    assert HL + HR == pytest.approx(entropy.relative_entropy(P, u1, u2, 0.1), rel=1e-12, abs=1e-14)


# ---------------------------------------------------------------------------
# production decomposition


def test_decomposition_identical_pair(smooth_state, muskat):
    dec = entropy.production_decomposition(muskat, smooth_state, smooth_state)
    assert dec.bound_I == 0.0 and dec.T2_I <= 0 and dec.bound_II == 0.0


def test_decomposition_constants():
    dec = entropy.production_decomposition(P, const(6, 2, 3), const(6, 1, 1))
    assert (dec.T2_I, dec.T2_II, dec.bound_I, dec.bound_II) == (0.0, 0.0, 0.0, 0.0)


def test_decomposition_errors():
    with pytest.raises(DegenerateReference):
        entropy.production_decomposition(P, const(4, 1, 1), const(4, 0, 1))
    with pytest.raises(GridMismatch):
        entropy.production_decomposition(P, const(4, 1, 1), const(6, 1, 1))


@given(admissible_params(), state_pairs(lo1=0.0))
def test_decomposition_inequalities(p, pair):
    u1, u2 = pair
    dec = entropy.production_decomposition(p, u1, u2)
    assert dec.T2_I <= dec.bound_I + 1e-10
    assert dec.T2_II / p.a <= dec.bound_II + 1e-10


def test_completed_squares_symbolically():
    a, b, c, d, rf, rg = sp.symbols("a b c d r_f r_g", positive=True)
    df1, df2, dg1, dg2 = sp.symbols("df1 df2 dg1 dg2", real=True)
    dPf = a * (df1 - df2) + b * (dg1 - dg2)
    dPg = c * (df1 - df2) + d * (dg1 - dg2)
    T2 = -dPf * (df1 - rf * df2) - (b / c) * dPg * (dg1 - rg * dg2)
    k = b * (a * d - b * c) / (a * c)
    T2_I = -k * (dg1**2 - (1 + rg) * dg1 * dg2 + rg * dg2**2)
    bound_I = k * ((rg - 1) / 2 * dg2) ** 2
    bound_II = sp.Rational(1, 2) * (((rf - 1) * df2) ** 2 + (b / a) ** 2 * ((rg - 1) * dg2) ** 2)

    # bound_I - T2_I = k (dg1 - (1 + rg)/2 dg2)^2
    assert sp.simplify(bound_I - T2_I - k * (dg1 - (1 + rg) / 2 * dg2) ** 2) == 0
    # bound_II - T2_II/a is a sum of two squares over a^2
    u = a * df1 + b * dg1
    v = (a * (rf + 1) * df2 + b * (rg + 1) * dg2) / 2
    w = a * (rf - 1) * df2 - b * (rg - 1) * dg2
    gap = bound_II - (T2 - T2_I) / a
    assert sp.simplify(gap - ((u - v) ** 2 + w**2 / 4) / a**2) == 0

    # the implemented integrands agree with the symbolic forms
    vals = {a: 1.3, b: 0.6, c: 0.9, d: 2.1, rf: 1.7, rg: 0.4, df1: 0.3, df2: -1.1, dg1: 2.0, dg2: 0.5}
    fd = entropy._FaceData(
        f1=np.array([1.7]), f2=np.array([1.0]), g1=np.array([0.4]), g2=np.array([1.0]),
        df1=np.array([0.3]), df2=np.array([-1.1]), dg1=np.array([2.0]), dg2=np.array([0.5]),
    )
    parts = entropy.production_integrands(new_model(1.3, 0.6, 0.9, 2.1), fd)
    for name, expr in (("T2", T2), ("T2_I", T2_I), ("bound_I", bound_I), ("bound_II", bound_II)):
        assert parts[name][0] == pytest.approx(float(expr.subs(vals)), rel=1e-12)


# ---------------------------------------------------------------------------
# chain rule


def _series(values, grid):
    return [State(grid, v, v, t) for t, v in enumerate(values)]


def test_chain_rule_constant_series():
    grid = make_grid(0, 1, 8)
    v = np.linspace(0.5, 2, 8)
    for phi in (Phi.square(), Phi.xlogx_eta(1e-2)):
        assert entropy.chain_rule_residual(_series([v, v, v], grid), phi) == 0.0


def test_chain_rule_square_exact_for_linear_in_time():
    grid = make_grid(0, 1, 16)
    base = np.linspace(0.2, 3, 16)
    slope = np.cos(np.arange(16))
    series = _series([base + 0.1 * k * slope for k in range(6)], grid)
    assert entropy.chain_rule_residual(series, Phi.square()) <= 1e-14


def test_chain_rule_errors():
    grid = make_grid(0, 1, 4)
    with pytest.raises(BadSeries):
        entropy.chain_rule_residual(_series([np.ones(4)], grid), Phi.square())
    mixed = [State(grid, np.ones(4), np.ones(4)), State(make_grid(0, 1, 8), np.ones(8), np.ones(8))]
    with pytest.raises(BadSeries):
        entropy.chain_rule_residual(mixed, Phi.square())
    with pytest.raises(BadEta):
        Phi.xlogx_eta(0.0)
    with pytest.raises(BadArgs):
        Phi("cube")


def test_phi_derivative_matches_value():
    s = np.linspace(0.05, 3.0, 7)
    for phi in (Phi.square(), Phi.xlogx_eta(1e-2)):
        fd = (phi.value(s + 1e-6) - phi.value(s - 1e-6)) / 2e-6
        np.testing.assert_allclose(phi.derivative(s), fd, rtol=1e-7, atol=1e-7)


def test_make_record(smooth_state, muskat):
    u2 = smooth_state
    u1 = u2.replace(f=u2.f * 1.1)
    rec = entropy.make_record(muskat, u1, u2, eta=1e-6)
    assert rec.H > 0 and rec.H_eta == pytest.approx(rec.H, abs=1e-4)
    assert rec.mass_f == pytest.approx(1.1 * entropy.mass(u2)[0])
    assert rec.production is not None and rec.sigma_check.sigma_lower == min(u2.f.min(), u2.g.min())
