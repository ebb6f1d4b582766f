import math

import numpy as np
import pytest

from xdiff.errors import DegenerateReference, SupportTouchedBoundary
from xdiff.grid import make_grid
from xdiff.harness import experiments as ex
from xdiff.harness.config import ExperimentConfig, resolve
from xdiff.harness.output import SERIES_HEADER, read_series, series_text, write_outputs


def cfg(**kw):
    return resolve(ExperimentConfig(**kw))


def test_output_times():
    assert ex.output_times(0.0, 0.1, 0.05) == [0.0, 0.05, 0.1]
    ts = ex.output_times(0.0, 0.1, 0.03)
    assert ts[-1] == 0.1 and len(ts) == 5
    assert ex.output_times(0.0, 0.0, 0.1) == [0.0]


@pytest.mark.parametrize("initial", ["smooth", "bump", "random", "constant"])
def test_initial_conditions_positive(initial):
    s = ex.initial_state(cfg(initial=initial), make_grid(0, 1, 64))
    assert min(s.f.min(), s.g.min()) >= 0.1


def test_tabulated_initial():
    c = cfg(initial="tabulated", n_cells=4, f_values=[1, 2, 3, 4], g_values=[4, 3, 2, 1])
    s = ex.initial_state(c, make_grid(0, 1, 4))
    assert s.f.tolist() == [1, 2, 3, 4]
    coarse = ex.initial_state(c, make_grid(0, 1, 2))
    assert coarse.f.tolist() == [1.5, 3.5]


def test_run_experiment():
    rep = ex.run_experiment(cfg(t_end=0.02, output_stride=0.005))
    assert rep.passed and len(rep.series) == 5
    H = [r["H"] for r in rep.series]
    assert all(b <= a for a, b in zip(H, H[1:]))


def test_weak_strong_small():
    c = cfg(kind="weak_strong", levels=[16, 32, 64], reference_cells=256, dt=4e-3, t_end=0.04, output_stride=0.02)
    rep = ex.weak_strong_experiment(c)
    assert rep.passed, rep.failed_checks()
    H_end = [row["H_t_end"] for row in rep.data["levels"]]
    assert H_end[0] > H_end[1] > H_end[2]
    assert rep.data["identical_inputs_H_max"] <= 1e-14
    assert set(rep.extra_series) == {"series_n16", "series_n32", "series_n64"}


def test_weak_strong_perturbed():
    c = cfg(kind="weak_strong", levels=[16, 32], reference_cells=64, dt=4e-3, t_end=0.04,
            output_stride=0.01, perturbation=0.1)
    rep = ex.weak_strong_experiment(c)
    assert all(row["H_initial"] > 0 for row in rep.data["levels"])
    assert all(row["gronwall"]["exp_bound_ok"] for row in rep.data["levels"])


def test_weak_strong_degenerate_reference():
    c = cfg(kind="weak_strong", initial="constant", f0=0.0, levels=[16, 32], reference_cells=64,
            t_end=0.01, output_stride=0.01)
    with pytest.raises(DegenerateReference):
        ex.weak_strong_experiment(c)


def test_gronwall_experiment():
    rep = ex.gronwall_experiment(cfg(kind="gronwall", perturbation=0.2, n_cells=64, t_end=0.05, output_stride=0.005))
    assert rep.passed, rep.failed_checks()
    assert rep.data["H_initial"] > 0 and math.isfinite(rep.data["gronwall"]["C_fit"])


def test_pme_small():
    c = cfg(kind="pme_validation", initial="barenblatt", x_lo=-1.0, x_hi=1.0, levels=[32, 64, 128],
            t_end=0.05, output_stride=0.025)
    rep = ex.pme_validation(c)
    assert rep.checks["g_identically_zero"] and rep.checks["mass_drift_le_1e-12"]
    assert all(r["L1_error"] > 0 for r in rep.data["levels"])
    assert math.isnan(rep.series[0]["H"])


def test_pme_support_check():
    c = cfg(kind="pme_validation", initial="barenblatt", x_lo=-1.0, x_hi=1.0, levels=[16, 32, 64], t_end=10.0)
    with pytest.raises(SupportTouchedBoundary):
        ex.pme_validation(c)


def test_convergence_small():
    c = cfg(kind="convergence", levels=[8, 16, 32], temporal_cells=256, temporal_dt=0.02, t_end=0.08,
            output_stride=0.02)
    rep = ex.convergence_experiment(c)
    assert min(rep.data["spatial"]["orders"]) > 1.5
    assert min(rep.data["temporal"]["orders"]) > 0.8


def test_invariants_small_is_deterministic():
    c = cfg(kind="invariants", invariant_points=2000, invariant_pairs=20, invariant_runs=2,
            t_end=0.01, output_stride=0.005, seed=11)
    a = ex.invariants_suite(c)
    b = ex.invariants_suite(c)
    assert a.passed, a.failed_checks()
    assert a.data["hash"] == b.data["hash"]
    assert ex.invariants_suite(c.replace(seed=12)).data["hash"] != a.data["hash"]


def test_series_text_round_trip(tmp_path):
    row = {k: 0.1 * i for i, k in enumerate(SERIES_HEADER)}
    row["H_eta"] = float("nan")
    text = series_text([row])
    assert text.splitlines()[0] == ",".join(SERIES_HEADER)
    (tmp_path / "s.csv").write_text(text)
    back = read_series(tmp_path / "s.csv")[0]
    assert back["bound_II"] == row["bound_II"] and math.isnan(back["H_eta"])


def test_write_outputs(tmp_path):
    c = cfg(t_end=0.01, output_stride=0.005)
    rep = ex.run_experiment(c)
    out = write_outputs(tmp_path / "o", c, rep)
    assert {p.name for p in out.iterdir()} == {"series.csv", "report.json", "config.toml"}
