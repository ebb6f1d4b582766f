import pytest
from hypothesis import given, strategies as st

from xdiff.errors import ConfigError
from xdiff.harness import config
from xdiff.harness.config import ExperimentConfig, dumps, parse_text, resolve


def test_defaults_resolve():
    cfg = resolve(ExperimentConfig())
    assert cfg.dt == 1e-3 and cfg.output_stride == pytest.approx(0.1 / 50)


def test_preset_then_overrides():
    cfg = parse_text('preset = "near_degenerate"\nd = 1.5\n')
    assert (cfg.a, cfg.b, cfg.c, cfg.d) == (1.0, 1.0, 1.0, 1.5)
    assert parse_text('preset = "near_degenerate"\n').d == 1.01


def test_kind_defaults():
    ws = resolve(ExperimentConfig(kind="weak_strong"))
    assert ws.levels == [64, 128, 256] and ws.reference_cells == 1024
    pme = resolve(parse_text('preset = "pme"'))
    assert pme.kind == "pme_validation" and pme.dt == pytest.approx(0.5 * 2.0 / 128)


@pytest.mark.parametrize(
    "text",
    [
        "unknown_key = 1",
        'preset = "nope"',
        "n_cells = 12.5",
        'a = "one"',
        "[section]\nx = 1",
        "a = ",
        'kind = "plot"',
        "dt = -1.0",
        "eta = [0.5, 2.0]",
    ],
)
def test_rejects(text):
    with pytest.raises(ConfigError):
        resolve(parse_text(text))


def test_tabulated_needs_lengths():
    with pytest.raises(ConfigError):
        resolve(parse_text('initial = "tabulated"\nn_cells = 2\nf_values = [1.0]\ng_values = [1.0, 2.0]'))


def test_env_seed():
    assert config.apply_env(ExperimentConfig(), {"XDIFF_SEED": "17"}).seed == 17
    assert config.apply_env(ExperimentConfig(seed=3), {}).seed == 3
    with pytest.raises(ConfigError):
        config.apply_env(ExperimentConfig(), {"XDIFF_SEED": "x"})


@given(
    st.floats(0.1, 10),
    st.floats(1e-6, 0.1),
    st.integers(2, 4096),
    st.lists(st.floats(1e-9, 0.99), min_size=1, max_size=4),
    st.sampled_from(config.KINDS),
)
def test_dump_round_trip(a, dt, n, eta, kind):
    cfg = resolve(ExperimentConfig(a=a, d=a + 1.0, dt=dt, n_cells=n, eta=eta, kind=kind))
    assert parse_text(dumps(cfg)) == cfg
