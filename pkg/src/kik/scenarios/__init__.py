from .base import BaseScenario, point_seed
from .bounds_sweep import BoundsSweepScenario
from .cnot_calibration import CnotCalibrationScenario
from .drift import DriftScenario
from .ising import IsingScenario
from .saturation import SaturationScenario
from .swap_chain import SwapChainScenario

from kik.errors import ConfigError

SCENARIOS = {
    cls.kind: cls for cls in (
        IsingScenario, CnotCalibrationScenario, SwapChainScenario, DriftScenario, SaturationScenario,
        BoundsSweepScenario,
    )
}


def get_scenario(kind):
    if kind not in SCENARIOS:
        raise ConfigError("unknown scenario kind {!r}".format(kind))
    return SCENARIOS[kind]


def run_scenario(config, logger=None, threads=1, progress=False):
    return get_scenario(config.kind)(config, logger, threads, progress).run()


def run_ising(config, **kwargs):
    return IsingScenario(config, **kwargs).run()


def run_cnot_calibration(config, **kwargs):
    return CnotCalibrationScenario(config, **kwargs).run()


def run_swap_chain(config, **kwargs):
    return SwapChainScenario(config, **kwargs).run()


def run_drift(config, **kwargs):
    return DriftScenario(config, **kwargs).run()


def run_saturation(config, **kwargs):
    return SaturationScenario(config, **kwargs).run()


def run_bounds_sweep(config, **kwargs):
    return BoundsSweepScenario(config, **kwargs).run()


__all__ = [
    'BaseScenario', 'point_seed', 'SCENARIOS', 'get_scenario', 'run_scenario', 'IsingScenario',
    'CnotCalibrationScenario', 'SwapChainScenario', 'DriftScenario', 'SaturationScenario', 'BoundsSweepScenario',
    'run_ising', 'run_cnot_calibration', 'run_swap_chain', 'run_drift', 'run_saturation', 'run_bounds_sweep',
]
