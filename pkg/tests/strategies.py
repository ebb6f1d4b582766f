"""Hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from xdiff.grid import State, make_grid
from xdiff.model import ModelParams


@st.composite
def admissible_params(draw) -> ModelParams:
    a = draw(st.floats(0.1, 5.0))
    b = draw(st.floats(0.1, 5.0))
    c = draw(st.floats(0.1, 5.0))
    # keep ad - bc bounded away from zero
    d = b * c / a + draw(st.floats(0.05, 5.0))
    return ModelParams(a, b, c, d)


def cell_values(n, lo=0.0, hi=5.0, floor=None):
    """Cell arrays in [lo, hi]; with ``floor`` a cell is exactly 0 or at least floor."""
    elems = st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    if floor is not None:
        elems = st.one_of(st.just(0.0), st.floats(max(lo, floor), hi))
    return arrays(np.float64, n, elements=elems)


@st.composite
def states(draw, n_min=4, n_max=24, lo=0.0, hi=5.0, n=None, floor=None):
    n = draw(st.integers(n_min, n_max)) if n is None else n
    grid = make_grid(0.0, 1.0, n)
    return State(grid, draw(cell_values(n, lo, hi, floor)), draw(cell_values(n, lo, hi, floor)))


@st.composite
def state_pairs(draw, lo1=0.0, lo2=0.1, hi=5.0):
    n = draw(st.integers(4, 24))
    return draw(states(n=n, lo=lo1, hi=hi)), draw(states(n=n, lo=lo2, hi=hi))
