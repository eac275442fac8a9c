"""
Taylor mitigation of an XX chain under spontaneous emission at growing
order. The relative error falls until the part of the cycle the first Magnus
term misses dominates, then levels off; halving the noise lowers that level
roughly fourfold.
"""
import logging
from typing import List

import numpy as np

from kik import liouville
from kik.dynamics import PulseSchedule, Segment, noiseless_superop
from kik.engine.folding import FoldedPropagators, mitigate_exact
from kik.noise import build_generator, spontaneous_emission
from kik.records import ScenarioResult
from .base import BaseScenario

logger = logging.getLogger(__name__)


def xx_chain_hamiltonian(n_qubits: int) -> np.ndarray:
    X = liouville.pauli_matrix("X")
    return sum(liouville.embed(X, q, n_qubits) @ liouville.embed(X, q + 1, n_qubits) for q in range(n_qubits - 1))


def saturation_schedule(n_qubits: int = 4, total_time: float = 1.0, xi: float = 0.02,
                        decay_rate: float = 1.0) -> PulseSchedule:
    dissipator = build_generator(spontaneous_emission(n_qubits, decay_rate, xi)) if xi else None
    return PulseSchedule([Segment(total_time, xx_chain_hamiltonian(n_qubits), dissipator, "xx")])


def relative_error(estimate: float, ideal: float) -> float:
    return abs(ideal - estimate) / abs(ideal)


class SaturationScenario(BaseScenario):
    kind = "saturation"

    def points(self) -> List[dict]:
        return [{"xi": float(xi)} for xi in self.config.noise["xi"]]

    def _errors(self, xi: float):
        s = self.config.scenario
        sched = saturation_schedule(s["n_qubits"], s["total_time"], xi, self.config.noise["decay_rate"])
        rho = liouville.basis_state("0" * s["n_qubits"])
        ideal = liouville.expectation(rho, noiseless_superop(sched), rho)
        props = FoldedPropagators(sched)
        estimates = {M: mitigate_exact(props, rho, rho, M, "1").estimate for M in self.orders}
        return ideal, estimates

    def _evaluate_point(self, point: dict) -> List[ScenarioResult]:
        ideal, estimates = self._errors(point["xi"])
        errors = {M: relative_error(e, ideal) for M, e in estimates.items()}
        plateau = None
        if self.config.scenario["halving"]:
            ideal_half, estimates_half = self._errors(0.5 * point["xi"])
            top = max(self.orders)
            plateau = errors[top] / relative_error(estimates_half[top], ideal_half)
        logger.info("saturation xi=%g: relative errors %s", point["xi"], errors)

        records = []
        for M in self.orders:
            extra = {"relative_error": errors[M]}
            if plateau is not None and M == max(self.orders):
                extra["plateau_ratio"] = plateau
            records.append(self._result(point, M, "1", estimates[M], ideal, extra=extra))
        return records
