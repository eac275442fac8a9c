"""
INI scenario configs.

Four sections, ``[scenario]``, ``[noise]``, ``[mitigation]`` and
``[output]``; every value is a JSON literal::

    [scenario]
    kind = "saturation"
    n_qubits = 4

    [mitigation]
    orders = [0, 1, 2, 3]

A file is merged over the defaults of its kind. Unknown sections and keys
are errors.
"""
import configparser
import hashlib
import json
import os
from copy import deepcopy
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from kik.errors import ConfigError

SECTIONS = ("scenario", "noise", "mitigation", "output")
SEED_ENV = "KIK_SEED"

_OUTPUT = {"format": "csv", "path": "", "log_level": "WARNING"}

_DEFAULTS = {
    "ising": {
        "scenario": {"n_qubits": 5, "trotter_steps": 10, "total_time": 10.0, "field": 0.2, "coupling": 0.1,
                     "seed": 0},
        "noise": {"xi": [0.00223, 0.00106], "jump_weights": [0.5, 1.7, 0.3, 2.0, 1.0]},
        "mitigation": {"orders": [0, 1, 2, 3], "g_choices": ["1", "mu", "mu^2", "mu^2.5"], "coefficients": "auto"},
    },
    "cnot_calib": {
        "scenario": {"n_cnots": 11, "amplitudes": [0.98, 0.9866, 0.9933, 1.0, 1.0066, 1.0133, 1.02],
                     "rc_realizations": 16, "seed": 0},
        "noise": {"xi": [0.02, 0.01], "dephasing_rate": 1.0, "decay_rate": 0.1},
        "mitigation": {"orders": [0, 1, 2, 3, 4]},
    },
    "swap_chain": {
        "scenario": {"n_swaps": 10, "alternate": True, "initial_states": ["00", "01", "10", "11"],
                     "overrotation": 0.0, "mode": "exact", "shots": 10000, "rc": False, "rc_realizations": 16,
                     "readout_p01": 0.0, "readout_p10": 0.0, "compare_circuit_inverse": True, "seed": 0},
        "noise": {"xi": [1.0], "alphas": [0.015, 0.0, 0.015]},
        "mitigation": {"orders": [0, 1, 2, 3], "g_choices": ["1", "mu", "mu^2"], "coefficients": "auto"},
    },
    "drift": {
        "scenario": {"shots": 1000, "sets": list(range(1, 21)), "drift": True, "drift_time": 1000.0,
                     "sampled": False, "seed": 0},
        "noise": {"xi": [0.05]},
        "mitigation": {"orders": [1, 2], "g_choices": ["1"], "coefficients": "auto"},
    },
    "saturation": {
        "scenario": {"n_qubits": 4, "total_time": 1.0, "halving": True, "seed": 0},
        "noise": {"xi": [0.02], "decay_rate": 1.0},
        "mitigation": {"orders": [0, 1, 2, 3, 4, 5, 6, 7, 8]},
    },
    "bounds_sweep": {
        "scenario": {"dephasing_alpha": 0.1, "seed": 0},
        "noise": {"xi": [0.0, 0.01, 0.02, 0.05, 0.1], "alphas": [1.0, 0.5, 0.8]},
        "mitigation": {"orders": [1, 2, 3], "g_choices": ["1", "mu", "mu^2"]},
    },
}

KINDS = tuple(_DEFAULTS)


def _check_kind(kind):
    if kind not in _DEFAULTS:
        raise ConfigError("unknown scenario kind {!r}, expected one of {}".format(kind, KINDS))


def _loads(section, key, text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("[{}] {} = {!r} is not a JSON literal: {}".format(section, key, text, e))


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    scenario: Mapping = field(default_factory=dict)
    noise: Mapping = field(default_factory=dict)
    mitigation: Mapping = field(default_factory=dict)
    output: Mapping = field(default_factory=dict)

    def __post_init__(self):
        _check_kind(self.kind)

    @classmethod
    def defaults(cls, kind: str) -> "ScenarioConfig":
        _check_kind(kind)
        sections = deepcopy(_DEFAULTS[kind])
        return cls(kind, output=dict(_OUTPUT), **sections)

    @classmethod
    def from_dict(cls, data: Mapping) -> "ScenarioConfig":
        """Merge ``{section: {key: value}}`` over the defaults of ``data['scenario']['kind']``."""
        unknown = set(data) - set(SECTIONS)
        if unknown:
            raise ConfigError("unknown config sections {}".format(sorted(unknown)))
        scenario = dict(data.get("scenario", {}))
        if "kind" not in scenario:
            raise ConfigError("[scenario] kind is required")
        kind = scenario.pop("kind")
        merged = cls.defaults(kind).as_sections()
        for section in SECTIONS:
            values = scenario if section == "scenario" else data.get(section, {})
            extra = set(values) - set(merged[section])
            if extra:
                raise ConfigError("unknown keys in [{}] for {}: {}".format(section, kind, sorted(extra)))
            merged[section].update(values)
        return cls(kind, **merged)

    @classmethod
    def parse(cls, text: str) -> "ScenarioConfig":
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as e:
            raise ConfigError("cannot parse config: {}".format(e))
        data = {section: {key: _loads(section, key, value) for key, value in parser.items(section)}
                for section in parser.sections()}
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str) -> "ScenarioConfig":
        try:
            with open(path, encoding="utf-8") as f:
                return cls.parse(f.read())
        except OSError as e:
            raise ConfigError("cannot read config {}: {}".format(path, e))

    def as_sections(self) -> dict:
        return {section: deepcopy(dict(getattr(self, section))) for section in SECTIONS}

    def as_dict(self) -> dict:
        data = self.as_sections()
        data["scenario"] = {"kind": self.kind, **data["scenario"]}
        return data

    def to_ini(self) -> str:
        lines = []
        for section, values in self.as_dict().items():
            lines.append("[{}]".format(section))
            lines.extend("{} = {}".format(key, json.dumps(value)) for key, value in values.items())
            lines.append("")
        return "\n".join(lines)

    @property
    def hash(self) -> str:
        canonical = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @property
    def seed(self) -> Optional[int]:
        return self.scenario.get("seed")

    def with_seed(self, seed: Optional[int]) -> "ScenarioConfig":
        return replace(self, scenario={**self.scenario, "seed": seed})

    def with_output(self, **values) -> "ScenarioConfig":
        unknown = set(values) - set(_OUTPUT)
        if unknown:
            raise ConfigError("unknown output keys {}".format(sorted(unknown)))
        return replace(self, output={**self.output, **values})


def _as_seed(value, source):
    try:
        seed = int(value)
    except (TypeError, ValueError):
        raise ConfigError("{} seed {!r} is not an integer".format(source, value))
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("{} seed {} outside the unsigned 64-bit range".format(source, seed))
    return seed


def resolve_seed(flag: Optional[int], config: ScenarioConfig, env: Optional[Mapping] = None) -> Optional[int]:
    """``--seed`` wins over ``KIK_SEED``, which wins over the config value."""
    env = os.environ if env is None else env
    if flag is not None:
        return _as_seed(flag, "--seed")
    if env.get(SEED_ENV):
        return _as_seed(env[SEED_ENV], SEED_ENV)
    if config.seed is None:
        return None
    return _as_seed(config.seed, "config")
