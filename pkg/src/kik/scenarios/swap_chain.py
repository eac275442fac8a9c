"""
Chain of SWAP gates built from cross-resonance CNOTs.

The chain is the logical identity, so the survival probability of each
computational basis state measures the mitigation bias directly. Variants:

* ``alternate`` (default) makes every second SWAP the pulse inverse of the
  one before it; without it the same SWAP is simply repeated,
* ``inverse='circuit'`` folds with the chain itself instead of its pulse inverse,
* ``overrotation`` scales every cross-resonance angle by ``1 + overrotation``,
* ``rc`` Pauli-twirls every SWAP exactly (``mode='exact'``) or samples random
  dressings of the chain (``mode='sampled'``),
* ``mode='sampled'`` draws finite shots, optionally through a readout matrix.

The bias is measured against the intended identity, not the overrotated gate.
"""
import logging
from typing import List

import numpy as np

from kik import liouville
from kik.bounds import accuracy_bounds
from kik.coefficients import GChoice, sampling_overhead
from kik.dynamics import PulseSchedule, noiseless_unitary, propagate, pulse_inverse
from kik.engine.folding import FoldedPropagators, mitigate_exact
from kik.engine.sampling import MeasurementMatrix, mitigate_sampled
from kik.engine.twirling import rc_propagators, rc_realizations, twirled_propagators
from kik.errors import ConfigError
from kik.records import ScenarioResult
from .base import BaseScenario, point_seed
from .gates import swap_schedule, target_pauli_noise

logger = logging.getLogger(__name__)

EXACT = "exact"
SAMPLED = "sampled"


def swap_chain(n_swaps: int, alphas, xi: float, overrotation: float = 0.0,
               alternate: bool = True) -> List[PulseSchedule]:
    """
    The chain as a list of SWAP blocks.

    With ``alternate`` every second SWAP is the pulse inverse of the first,
    which cancels overrotations pairwise while keeping the logical identity.
    """
    block = swap_schedule(target_pauli_noise(alphas, xi), 1.0 + overrotation)
    if not alternate:
        return [block] * n_swaps
    inverse = pulse_inverse(block)
    return [inverse if i % 2 else block for i in range(n_swaps)]


def intended_swaps(n_swaps: int, alternate: bool = True) -> List[np.ndarray]:
    """Logical unitaries of the chain's blocks at the calibrated amplitude."""
    swap = noiseless_unitary(swap_schedule(lambda control, target: None))
    return [swap.conj().T if alternate and i % 2 else swap for i in range(n_swaps)]


def _concat(blocks: List[PulseSchedule]) -> PulseSchedule:
    sched = blocks[0]
    for block in blocks[1:]:
        sched = sched + block
    return sched


class SwapChainScenario(BaseScenario):
    kind = "swap_chain"

    def points(self) -> List[dict]:
        s = self.config.scenario
        if s["mode"] not in (EXACT, SAMPLED):
            raise ConfigError("swap chain mode must be 'exact' or 'sampled', got {!r}".format(s["mode"]))
        if s["n_swaps"] < 2 or s["n_swaps"] % 2:
            raise ConfigError("the chain is the identity only for an even number of SWAPs, got {}".format(
                s["n_swaps"]))
        inverses = ["pulse", "circuit"] if s["compare_circuit_inverse"] else ["pulse"]
        points = []
        for xi in self.config.noise["xi"]:
            for state in s["initial_states"]:
                for inverse in inverses:
                    points.append({"xi": float(xi), "state": state, "inverse": inverse, "rc": False})
                if s["rc"]:
                    points.append({"xi": float(xi), "state": state, "inverse": "pulse", "rc": True})
        return points

    def _propagators(self, blocks: List[PulseSchedule], point: dict):
        """FoldedPropagators of the chain, or a list of them for sampled RC."""
        s = self.config.scenario
        sched = _concat(blocks)
        if point["inverse"] == "circuit":
            # the chain rerun as its own inverse; overrotation makes this inexact
            K = propagate(sched).value
            return FoldedPropagators.from_superops(K, K), sched
        if not point["rc"]:
            return FoldedPropagators(sched), sched
        # dressings follow the intended SWAPs, not the overrotated pulses
        logical = intended_swaps(len(blocks), s["alternate"])
        if s["mode"] == EXACT:
            return twirled_propagators(blocks, logical=logical), sched
        realizations = rc_realizations(sched, s["rc_realizations"], point_seed(self.seed, point),
                                       logical=np.linalg.multi_dot(logical[::-1]))
        return rc_propagators(sched, realizations), sched

    def _readout(self):
        s = self.config.scenario
        if not s["readout_p01"] and not s["readout_p10"]:
            return None
        return MeasurementMatrix.from_flip_probabilities(s["readout_p01"], s["readout_p10"], 2)

    def _evaluate_point(self, point: dict) -> List[ScenarioResult]:
        s, n, mit = self.config.scenario, self.config.noise, self.config.mitigation
        blocks = swap_chain(s["n_swaps"], n["alphas"], point["xi"], s["overrotation"], s["alternate"])
        props, sched = self._propagators(blocks, point)
        rho = liouville.basis_state(point["state"])
        A = rho
        ideal = liouville.expectation(A, None, rho)
        primary = props[0] if isinstance(props, list) else props
        mu = primary.survival(rho)

        records = []
        for M in self.orders:
            for g in mit["g_choices"]:
                g = GChoice.parse(g)
                if s["mode"] == SAMPLED:
                    seed = point_seed(self.seed, {**point, "order": M, "g": g.label})
                    rc = props if isinstance(props, list) else None
                    result = mitigate_sampled(primary, A, rho, M, g, s["shots"], seed, rc=rc,
                                              readout=self._readout(), kind=mit["coefficients"])
                else:
                    result = mitigate_exact(props, A, rho, M, g, mit["coefficients"])
                bounds = {}
                if point["inverse"] == "pulse" and not point["rc"] and M in (1, 2, 3) and s["overrotation"] == 0:
                    report = accuracy_bounds(A, sched, min(max(mu, 0.0), 1.0), M)
                    bounds = {"bound_adaptive": report.adaptive, "bound_taylor": report.taylor,
                              "bound_loose": report.loose}
                records.append(self._result(point, M, g.label, result.estimate, ideal, variance=result.variance,
                                            extra={"mu": mu, "g": result.g,
                                                   "overhead": sampling_overhead(result.coefficients)},
                                            **bounds))
        logger.info("swap chain %s: survival %.4f", point, mu)
        return records
