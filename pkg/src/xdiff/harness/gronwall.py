"""Empirical Gronwall constant of an entropy time series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..errors import EmptySeries, NonFinite


@dataclass(frozen=True)
class GronwallFit:
    C_fit: float
    residual_max: float
    exp_bound_ok: bool

    def to_dict(self) -> dict:
        return {"C_fit": self.C_fit, "residual_max": self.residual_max, "exp_bound_ok": self.exp_bound_ok}


def _series_arrays(series) -> tuple[np.ndarray, np.ndarray]:
    if len(series) == 0:
        raise EmptySeries("Gronwall fit needs at least one record")
    first = series[0]
    if hasattr(first, "H"):
        t = np.array([r.time for r in series], dtype=float)
        H = np.array([r.H for r in series], dtype=float)
    else:
        t = np.array([r[0] for r in series], dtype=float)
        H = np.array([r[1] for r in series], dtype=float)
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(H))):
        raise NonFinite("series contains non-finite times or entropy values")
    if np.any(H < 0):
        raise NonFinite("entropy values must be nonnegative")
    if np.any(np.diff(t) < 0):
        raise NonFinite("series must be time-sorted")
    return t, H


def gronwall_fit(series: Sequence, exp_tol: float = 1e-6) -> GronwallFit:
    """Smallest C with H(t_k) <= H(0) + C * int_0^{t_k} H for every sample.

    ``series`` holds EntropyRecord objects or (time, H) pairs. The integral
    is the cumulative trapezoid rule over the sample times. ``exp_bound_ok``
    reports whether H(t_k) <= H(0) exp(C t_k) (1 + exp_tol) everywhere.
    """
    t, H = _series_arrays(series)
    integral = cumulative_trapezoid(H, t, initial=0.0)
    excess = H - H[0]
    pos = integral > 0
    C = 0.0
    if np.any(pos):
        C = max(0.0, float(np.max(excess[pos] / integral[pos])))
    if np.any(~pos & (excess > 0)):
        # growth with no accumulated entropy (repeated sample times): no finite C
        C = math.inf
        return GronwallFit(C, float(np.max(excess[~pos])), False)
    residual = float(np.max(excess - C * integral))
    # the ratio can come back a few ulps short after the multiply-back
    for _ in range(100):
        if residual <= 0:
            break
        C = C * (1.0 + 4.0 * np.finfo(float).eps)
        residual = float(np.max(excess - C * integral))
    exp_ok = bool(np.all(H <= H[0] * np.exp(C * (t - t[0])) * (1.0 + exp_tol)))
    return GronwallFit(C, residual, exp_ok)
