"""Serialized outputs: series.csv, report.json and the resolved config."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, dumps

SERIES_HEADER = (
    "time",
    "H",
    "H_eta",
    "mass_f",
    "mass_g",
    "l2w_sq",
    "sigma_lower",
    "grad_sup",
    "T2_I",
    "bound_I",
    "T2_II",
    "bound_II",
)


def fmt_float(x) -> str:
    # repr gives the shortest string that round-trips
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def series_text(rows: list[dict]) -> str:
    lines = [",".join(SERIES_HEADER)]
    for row in rows:
        lines.append(",".join(fmt_float(row[k]) for k in SERIES_HEADER))
    return "\n".join(lines) + "\n"


def read_series(path) -> list[dict]:
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, map(float, line.split(",")))) for line in lines[1:] if line]


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _clean(obj):
    # JSON has no inf/nan; write them as strings
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        return str(float(obj))
    return obj


def report_text(report) -> str:
    return json.dumps(_clean(report.to_dict()), indent=2, sort_keys=True, default=_json_default) + "\n"


def write_outputs(out_dir, cfg: ExperimentConfig, report) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "series.csv").write_text(series_text(report.series))
    for name, rows in report.extra_series.items():
        (out / f"{name}.csv").write_text(series_text(rows))
    (out / "report.json").write_text(report_text(report))
    (out / "config.toml").write_text(dumps(cfg))
    return out
