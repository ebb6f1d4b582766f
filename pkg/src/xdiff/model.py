"""Coefficients of the two-species cross-diffusion system and its mobility."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameters, NegativeState

#: identifier of the parameter constraint, used in error messages
CONSTRAINT = "condabcd"


@dataclass(frozen=True)
class ModelParams:
    """Validated coefficients (a, b, c, d).

    Build through :func:`new_model`; instances are always admissible, so
    downstream code never re-checks the constraint.
    """

    a: float
    b: float
    c: float
    d: float

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def b_over_c(self) -> float:
        return self.b / self.c

    def swapped(self) -> "ModelParams":
        """Coefficients after exchanging the roles of f and g."""
        return ModelParams(self.d, self.c, self.b, self.a)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class MobilityMatrix:
    m11: float
    m12: float
    m21: float
    m22: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21


def check_params(a: float, b: float, c: float, d: float) -> str | None:
    """Return the failure reason for (a, b, c, d), or None if admissible."""
    vals = (a, b, c, d)
    if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in vals):
        return "nonpositive"
    if min(vals) <= 0:
        return "nonpositive"
    if a * d <= b * c:
        return "ad<=bc"
    return None


def new_model(a: float, b: float, c: float, d: float) -> ModelParams:
    """Validate and freeze the coefficients.

    Raises InvalidParameters with reason ``"nonpositive"`` or ``"ad<=bc"``.
    """
    a, b, c, d = (float(v) for v in (a, b, c, d))
    reason = check_params(a, b, c, d)
    if reason == "nonpositive":
        raise InvalidParameters(
            reason, f"{CONSTRAINT}: coefficients must be positive, got {(a, b, c, d)}"
        )
    if reason == "ad<=bc":
        raise InvalidParameters(
            reason, f"{CONSTRAINT}: need a*d > b*c, got a*d={a * d!r} <= b*c={b * c!r}"
        )
    return ModelParams(a, b, c, d)


def mobility(p: ModelParams, X: tuple[float, float]) -> MobilityMatrix:
    x1, x2 = (float(v) for v in X)
    if x1 < 0 or x2 < 0:
        raise NegativeState(f"mobility needs X >= 0, got {(x1, x2)}")
    return MobilityMatrix(p.a * x1, p.b * x1, p.c * x2, p.d * x2)


def pressure_gradients_coeffs(p: ModelParams) -> tuple[tuple[float, float], tuple[float, float]]:
    """Linear forms of the two pressures: f-pressure a*f + b*g, g-pressure c*f + d*g."""
    return (p.a, p.b), (p.c, p.d)


def pressures(p: ModelParams, f: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return p.a * f + p.b * g, p.c * f + p.d * g
