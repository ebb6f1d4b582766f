"""Experiment configuration: flat ``key = value`` files (a TOML subset).

A config may name a ``preset``; the preset's values are applied first and
the file's own keys override them. :func:`resolve` fills every
kind-dependent default so the written-back config is fully explicit.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from ..errors import ConfigError

KINDS = ("run", "weak_strong", "gronwall", "pme_validation", "convergence", "invariants")
INITIAL_CONDITIONS = ("smooth", "bump", "barenblatt", "random", "constant", "tabulated")

PRESETS: dict[str, dict[str, Any]] = {
    "muskat": {"a": 1.0, "b": 1.0, "c": 1.0, "d": 2.0, "initial": "smooth"},
    "near_degenerate": {"a": 1.0, "b": 1.0, "c": 1.0, "d": 1.01, "initial": "smooth"},
    "pme": {
        "a": 1.0,
        "b": 1.0,
        "c": 1.0,
        "d": 2.0,
        "initial": "barenblatt",
        "x_lo": -1.0,
        "x_hi": 1.0,
        "kind": "pme_validation",
    },
}

# per-kind defaults filled in by resolve() when the field is left as None
_KIND_DEFAULTS: dict[str, dict[str, Any]] = {
    "weak_strong": {"levels": [64, 128, 256], "reference_cells": 1024},
    "pme_validation": {"levels": [128, 256, 512]},
    "convergence": {"levels": [32, 64, 128], "temporal_cells": 256, "temporal_dt": 0.02},
}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "run"
    preset: str = ""
    a: float = 1.0
    b: float = 1.0
    c: float = 1.0
    d: float = 2.0
    x_lo: float = 0.0
    x_hi: float = 1.0
    n_cells: int = 128
    dt: Optional[float] = None
    t_end: float = 0.1
    output_stride: Optional[float] = None
    n_records: int = 50
    initial: str = "smooth"
    f_values: list = field(default_factory=list)
    g_values: list = field(default_factory=list)
    f0: float = 1.0
    g0: float = 1.0
    perturbation: float = 0.0
    mobility_average: str = "arithmetic"
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    damping: float = 0.5
    sigma_min: float = 1e-10
    eta: list = field(default_factory=lambda: [1e-2, 1e-4, 1e-6])
    seed: int = 0
    levels: Optional[list] = None
    reference_cells: Optional[int] = None
    pme_mass: float = 0.5
    pme_t0: float = 0.01
    conv_dt_factor: float = 1.0
    temporal_cells: Optional[int] = None
    temporal_dt: Optional[float] = None
    invariant_points: int = 100_000
    invariant_pairs: int = 1000
    invariant_runs: int = 8
    output: str = "out"

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _coerce(key: str, value: Any) -> Any:
    ftype = str(FIELD_TYPES[key])
    if value is None:
        return None
    if "int" in ftype and "float" not in ftype:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(value)
    if "float" in ftype:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        return float(value)
    if ftype == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        return value
    if "list" in ftype:
        if not isinstance(value, list):
            raise ConfigError(f"{key} must be a list, got {value!r}")
        return list(value)
    return value  # pragma: no cover


def from_mapping(data: dict[str, Any]) -> ExperimentConfig:
    data = dict(data)
    unknown = sorted(set(data) - set(FIELD_TYPES))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    preset = data.get("preset", "")
    merged: dict[str, Any] = {}
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        merged.update(PRESETS[preset])
    merged.update(data)
    return ExperimentConfig(**{k: _coerce(k, v) for k, v in merged.items()})


def read_mapping(text: str) -> dict[str, Any]:
    """Raw key/value pairs of a flat config text."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ConfigError(f"tables are not supported (found {nested})")
    return data


def parse_text(text: str) -> ExperimentConfig:
    return from_mapping(read_mapping(text))


def load(path: str | os.PathLike) -> ExperimentConfig:
    return parse_text(Path(path).read_text())


def apply_env(cfg: ExperimentConfig, environ=os.environ) -> ExperimentConfig:
    """Honour the optional XDIFF_SEED override."""
    seed = environ.get("XDIFF_SEED")
    if seed is None or seed == "":
        return cfg
    try:
        return cfg.replace(seed=int(seed))
    except ValueError:
        raise ConfigError(f"XDIFF_SEED must be an integer, got {seed!r}") from None


def resolve(cfg: ExperimentConfig) -> ExperimentConfig:
    """Fill kind-dependent defaults and check the numeric fields."""
    if cfg.kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {cfg.kind!r}")
    if cfg.initial not in INITIAL_CONDITIONS:
        raise ConfigError(f"initial must be one of {INITIAL_CONDITIONS}, got {cfg.initial!r}")
    changes: dict[str, Any] = {}
    for key, default in _KIND_DEFAULTS.get(cfg.kind, {}).items():
        if getattr(cfg, key) is None:
            changes[key] = default
    cfg = cfg.replace(**changes)
    if cfg.kind == "pme_validation" and cfg.dt is None:
        # dt proportional to the coarsest mesh width
        n0 = min(cfg.levels)
        cfg = cfg.replace(dt=0.5 * (cfg.x_hi - cfg.x_lo) / n0)
    if cfg.dt is None:
        cfg = cfg.replace(dt=1e-3)
    if cfg.output_stride is None:
        if cfg.n_records < 1:
            raise ConfigError("n_records must be >= 1")
        cfg = cfg.replace(output_stride=cfg.t_end / cfg.n_records if cfg.t_end > 0 else 1.0)

    checks = [
        (cfg.dt > 0 and math.isfinite(cfg.dt), "dt must be positive"),
        (cfg.t_end >= 0, "t_end must be nonnegative"),
        (cfg.output_stride > 0, "output_stride must be positive"),
        (cfg.n_cells >= 2, "n_cells must be >= 2"),
        (cfg.sigma_min >= 0, "sigma_min must be nonnegative"),
        (all(0 < e < 1 for e in cfg.eta), "eta values must lie in (0, 1)"),
        (cfg.perturbation >= 0, "perturbation must be nonnegative"),
        (cfg.levels is None or all(int(n) >= 2 for n in cfg.levels), "levels must be >= 2"),
    ]
    for ok, msg in checks:
        if not ok:
            raise ConfigError(msg)
    if cfg.initial == "tabulated":
        if len(cfg.f_values) != cfg.n_cells or len(cfg.g_values) != cfg.n_cells:
            raise ConfigError("tabulated initial data needs n_cells values for f and g")
    return cfg


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot format {value!r}")


def dumps(cfg: ExperimentConfig) -> str:
    """Exact text form; None-valued fields are omitted."""
    lines = []
    for key, value in cfg.to_dict().items():
        if value is None:
            continue
        lines.append(f"{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"
