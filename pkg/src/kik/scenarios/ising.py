"""
Trotterized transverse-field Ising chain under a collective decay jump.

Each Trotter step runs the ZZ coupling segment and then the X field segment,
both under the same dissipator. The fidelity of the mitigated state is taken
against the noiseless Trotterized state.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np

from kik import liouville
from kik.coefficients import GChoice, select_coefficients
from kik.dynamics import PulseSchedule, Segment, noiseless_unitary
from kik.engine.folding import FoldedPropagators
from kik.errors import ConfigError
from kik.noise import NoiseSpec, build_generator
from kik.records import ScenarioResult
from .base import BaseScenario

logger = logging.getLogger(__name__)

X = liouville.pauli_matrix("X")
Z = liouville.pauli_matrix("Z")


def field_hamiltonian(n_qubits: int) -> np.ndarray:
    return sum(liouville.embed(X, q, n_qubits) for q in range(n_qubits))


def coupling_hamiltonian(n_qubits: int) -> np.ndarray:
    """Nearest-neighbour ZZ on an open chain."""
    return sum(liouville.embed(Z, q, n_qubits) @ liouville.embed(Z, q + 1, n_qubits) for q in range(n_qubits - 1))


def collective_decay(weights: Sequence[float], xi: float = 1.0) -> NoiseSpec:
    """A single jump sum_j w_j |0><1|_j acting on the whole chain."""
    n = len(weights)
    jump = sum(w * liouville.embed(liouville.lowering(), q, n) for q, w in enumerate(weights))
    return NoiseSpec.jump_operators([(jump, 1.0)], xi)


def ising_schedule(n_qubits: int = 5, steps: int = 10, total_time: float = 10.0, field: float = 0.2,
                   coupling: float = 0.1, dissipator: Optional[np.ndarray] = None) -> PulseSchedule:
    dt = total_time / steps
    step = PulseSchedule([Segment(dt, coupling * coupling_hamiltonian(n_qubits), dissipator, "zz"),
                          Segment(dt, field * field_hamiltonian(n_qubits), dissipator, "x")])
    return step * steps


def enhancement_ratio(fidelity_0: float, fidelity_m: float) -> float:
    """(1 - F_0) / (1 - F_M); infinite when the mitigated fidelity is exactly one."""
    if fidelity_m == 1.0:
        return np.inf
    return (1.0 - fidelity_0) / (1.0 - fidelity_m)


class IsingScenario(BaseScenario):
    kind = "ising"

    def points(self) -> List[dict]:
        return [{"xi": float(xi)} for xi in self.config.noise["xi"]]

    def _schedule(self, xi: float) -> PulseSchedule:
        s, n = self.config.scenario, self.config.noise
        weights = n["jump_weights"]
        if len(weights) != s["n_qubits"]:
            raise ConfigError("need one jump weight per qubit, got {} for {}".format(len(weights), s["n_qubits"]))
        dissipator = build_generator(collective_decay(weights, xi)) if xi else None
        return ising_schedule(s["n_qubits"], s["trotter_steps"], s["total_time"], s["field"], s["coupling"],
                              dissipator)

    def _evaluate_point(self, point: dict) -> List[ScenarioResult]:
        sched = self._schedule(point["xi"])
        n = self.config.scenario["n_qubits"]
        psi0 = np.zeros(2 ** n, dtype=complex)
        psi0[0] = 1.0
        rho = liouville.pure_state(psi0)
        ideal = liouville.pure_state(noiseless_unitary(sched) @ psi0)

        props = FoldedPropagators(sched)
        mu = props.survival(rho)
        kind = self.config.mitigation["coefficients"]
        logger.info("ising xi=%g: survival %.6f", point["xi"], mu)

        def fidelity(coeffs):
            state = liouville.unvectorize(props.mitigated_state(rho, coeffs))
            return liouville.state_fidelity(ideal, state, validate=False)

        fidelity_0 = fidelity(select_coefficients(0, 1.0))
        records = []
        for M in self.orders:
            choices = [GChoice.parse("1")] if M == 0 else [GChoice.parse(g) for g in self.config.mitigation["g_choices"]]
            for g in choices:
                g_value = g.evaluate(mu)
                coeffs = select_coefficients(M, g_value, "taylor" if kind == "auto" and not g.needs_mu else kind)
                f = fidelity_0 if M == 0 else fidelity(coeffs)
                records.append(self._result(point, M, g.label, f, 1.0, extra={
                    "fidelity": f, "enhancement": 1.0 if M == 0 else enhancement_ratio(fidelity_0, f),
                    "mu": mu, "g": g_value, "coefficients": coeffs.values,
                }))
        return records
