import pytest

from kik.config import KINDS, SEED_ENV, ScenarioConfig, resolve_seed
from kik.errors import ConfigError


@pytest.mark.parametrize("kind", KINDS)
def test_default_config_round_trip(kind):
    config = ScenarioConfig.defaults(kind)
    parsed = ScenarioConfig.parse(config.to_ini())
    assert parsed == config
    assert parsed.hash == config.hash


def test_file_values_merge_over_defaults():
    config = ScenarioConfig.parse("""
[scenario]
kind = "saturation"
n_qubits = 2

[mitigation]
orders = [0, 1]
""")
    assert config.kind == "saturation"
    assert config.scenario["n_qubits"] == 2
    assert config.scenario["total_time"] == 1.0
    assert config.mitigation["orders"] == [0, 1]
    assert config.output["format"] == "csv"


def test_hash_tracks_content():
    base = ScenarioConfig.defaults("drift")
    assert base.hash == ScenarioConfig.defaults("drift").hash
    assert base.with_seed(5).hash != base.hash
    assert len(base.hash) == 64


@pytest.mark.parametrize("text, message", [
    ('[scenario]\nkind = "ising"\nn_qbits = 3\n', "unknown keys"),
    ('[scenario]\nkind = "ising"\n[plots]\nstyle = "dark"\n', "unknown config sections"),
    ('[scenario]\nkind = "teleport"\n', "unknown scenario kind"),
    ('[scenario]\nn_qubits = 3\n', "kind is required"),
    ('[scenario]\nkind = ising\n', "not a JSON literal"),
    ('kind = "ising"\n', "cannot parse"),
])
def test_invalid_configs(text, message):
    with pytest.raises(ConfigError, match=message):
        ScenarioConfig.parse(text)


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        ScenarioConfig.load(str(tmp_path / "missing.ini"))


def test_load_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text('[scenario]\nkind = "bounds_sweep"\nseed = 9\n')
    assert ScenarioConfig.load(str(path)).seed == 9


def test_with_output():
    config = ScenarioConfig.defaults("ising").with_output(format="json")
    assert config.output["format"] == "json"
    with pytest.raises(ConfigError):
        config.with_output(colour="red")


def test_seed_precedence():
    config = ScenarioConfig.defaults("swap_chain").with_seed(3)
    assert resolve_seed(None, config, env={}) == 3
    assert resolve_seed(None, config, env={SEED_ENV: "11"}) == 11
    assert resolve_seed(7, config, env={SEED_ENV: "11"}) == 7
    assert resolve_seed(None, config.with_seed(None), env={}) is None


@pytest.mark.parametrize("flag", [-1, 2 ** 64])
def test_seed_range(flag):
    with pytest.raises(ConfigError):
        resolve_seed(flag, ScenarioConfig.defaults("drift"), env={})


def test_seed_from_env_must_be_integer():
    with pytest.raises(ConfigError):
        resolve_seed(None, ScenarioConfig.defaults("drift"), env={SEED_ENV: "abc"})
