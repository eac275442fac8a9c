"""
Mitigation of a two-qubit gate whose decay and dephasing rates drift during
the run, estimated with an increasing number of independently mitigated
shot sets.
"""
import logging
from typing import List

import numpy as np

from kik import liouville
from kik.coefficients import GChoice
from kik.dynamics import PulseSchedule, Segment, noiseless_superop
from kik.engine.drift import set_averaged_mitigate
from kik.noise import DriftProfile, Waveform, fluctuating_profile, fluctuating_two_qubit_noise
from kik.records import ScenarioResult
from .base import BaseScenario, point_seed

logger = logging.getLogger(__name__)


def drift_gate() -> PulseSchedule:
    """3 X X + I X for unit time; its noise comes from the drift profile."""
    X = liouville.pauli_matrix("X")
    H = 3.0 * np.kron(X, X) + np.kron(np.eye(2), X)
    return PulseSchedule([Segment(1.0, H, None, "drift_gate")])


def drift_state() -> np.ndarray:
    return np.kron(0.5 * np.eye(2), liouville.basis_state("0"))


def frozen_profile(profile: DriftProfile) -> DriftProfile:
    """Each waveform held at its mean level."""
    return DriftProfile(tuple(Waveform("constant", offset=w.offset) for w in profile.waveforms))


class DriftScenario(BaseScenario):
    kind = "drift"

    def points(self) -> List[dict]:
        return [{"xi": float(xi), "sets": int(S)} for xi in self.config.noise["xi"]
                for S in self.config.scenario["sets"]]

    def _evaluate_point(self, point: dict) -> List[ScenarioResult]:
        s, mit = self.config.scenario, self.config.mitigation
        sched = drift_gate()
        rho = drift_state()
        A = rho
        ideal = liouville.expectation(A, noiseless_superop(sched), rho)
        noise = fluctuating_two_qubit_noise(point["xi"])
        profile = fluctuating_profile(s["drift_time"])
        if not s["drift"]:
            profile = frozen_profile(profile)

        records = []
        for M in self.orders:
            for g in mit["g_choices"]:
                seed = point_seed(self.seed, {**point, "order": M, "g": g}) if s["sampled"] else None
                result = set_averaged_mitigate(sched, A, rho, M, g, point["sets"], profile, noise, s["shots"],
                                               seed=seed, kind=mit["coefficients"])
                records.append(self._result(point, M, GChoice.parse(g).label, result.estimate,
                                            ideal, variance=result.variance,
                                            extra={"set_estimates": result.extra["set_estimates"],
                                                   "mu": result.mu}))
        logger.info("drift S=%d: %s", point["sets"], [round(r.estimate, 6) for r in records])
        return records
