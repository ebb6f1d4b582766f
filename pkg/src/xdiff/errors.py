"""Exception hierarchy.

Every error raised by the package derives from :class:`ContractError` and
carries the name of the module whose contract was violated, so the CLI can
report it uniformly.
"""

from __future__ import annotations


class ContractError(Exception):
    module = "xdiff"

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details

    def __str__(self) -> str:
        msg = super().__str__()
        return f"[{self.module}] {type(self).__name__}: {msg}"


# model
class InvalidParameters(ContractError):
    module = "model"

    def __init__(self, reason: str, message: str = ""):
        super().__init__(message or reason, reason=reason)
        self.reason = reason


class NegativeState(ContractError):
    module = "model"


# grid
class BadDomain(ContractError):
    module = "grid"


class LengthMismatch(ContractError):
    module = "grid"


class IncompatibleGrids(ContractError):
    module = "grid"


# solver
class NewtonDiverged(ContractError):
    module = "solver"

    def __init__(self, final_residual: float, time: float | None = None, message: str = ""):
        super().__init__(
            message or f"Newton did not converge (residual {final_residual:.3e})",
            final_residual=final_residual,
            time=time,
        )
        self.final_residual = final_residual
        self.time = time


class PositivityLost(ContractError):
    module = "solver"

    def __init__(self, message: str = "", time: float | None = None):
        super().__init__(message or "no nonnegative damped Newton step", time=time)
        self.time = time


# entropy
class DegenerateReference(ContractError):
    module = "entropy"


class GridMismatch(ContractError):
    module = "entropy"


class BadEta(ContractError):
    module = "entropy"


class BadArgs(ContractError):
    module = "entropy"


class BadSeries(ContractError):
    module = "entropy"


# reference
class BadTime(ContractError):
    module = "reference"


# harness
class EmptySeries(ContractError):
    module = "harness"


class NonFinite(ContractError):
    module = "harness"


class SupportTouchedBoundary(ContractError):
    module = "harness"


class ConfigError(ContractError):
    module = "harness"
