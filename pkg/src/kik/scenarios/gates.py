"""
Gate library shared by the scenarios.

A CNOT is built from a cross-resonance pulse dressed by ideal single-qubit
rotations: R_X(-pi/2) on the target, then ``exp(-i theta/2 Z_c X_t)``, then
R_Z(-pi/2) on the control. ``theta = amplitude * pi/2``; amplitude 1 is an
exact CNOT up to a global phase.
"""
from typing import Callable, Optional

import numpy as np
from scipy.linalg import expm

from kik import liouville
from kik.dynamics import PulseSchedule, Segment
from kik.noise import NoiseSpec, build_generator, local_jumps, local_pauli_noise

X = liouville.pauli_matrix("X")
Z = liouville.pauli_matrix("Z")

# maps the target qubit of a cross-resonance pulse to its dissipator
DissipatorFactory = Callable[[int, int], Optional[np.ndarray]]


def cross_resonance_hamiltonian(control: int, target: int, n_qubits: int = 2) -> np.ndarray:
    return liouville.embed(Z, control, n_qubits) @ liouville.embed(X, target, n_qubits)


def cnot_schedule(control: int = 0, target: int = 1, n_qubits: int = 2, amplitude: float = 1.0,
                  dissipator: Optional[np.ndarray] = None) -> PulseSchedule:
    theta = amplitude * 0.5 * np.pi
    rx = Segment(1.0, -0.25 * np.pi * liouville.embed(X, target, n_qubits), None,
                 "rx{}".format(target))
    cr = Segment(1.0, 0.5 * theta * cross_resonance_hamiltonian(control, target, n_qubits), dissipator,
                 "cr{}{}".format(control, target))
    rz = Segment(1.0, -0.25 * np.pi * liouville.embed(Z, control, n_qubits), None,
                 "rz{}".format(control))
    return PulseSchedule([rx, cr, rz])


def cross_resonance_schedule(amplitude: float = 1.0, dissipator: Optional[np.ndarray] = None,
                             control: int = 0, target: int = 1, n_qubits: int = 2) -> PulseSchedule:
    """The bare cross-resonance pulse, without the single-qubit dressing."""
    theta = amplitude * 0.5 * np.pi
    return PulseSchedule([Segment(1.0, 0.5 * theta * cross_resonance_hamiltonian(control, target, n_qubits),
                                  dissipator, "cr{}{}".format(control, target))])


def cross_resonance_unitary(amplitude: float = 1.0, control: int = 0, target: int = 1,
                            n_qubits: int = 2) -> np.ndarray:
    theta = amplitude * 0.5 * np.pi
    return expm(-0.5j * theta * cross_resonance_hamiltonian(control, target, n_qubits))


def cross_resonance_chain(n_pulses: int, amplitude: float = 1.0,
                          dissipator: Optional[np.ndarray] = None) -> PulseSchedule:
    """Bare cross-resonance pulses back to back, the two-qubit core of a CNOT chain."""
    return cross_resonance_schedule(amplitude, dissipator) * n_pulses


def swap_schedule(dissipators: DissipatorFactory, amplitude: float = 1.0) -> PulseSchedule:
    """SWAP as CNOT(0->1) CNOT(1->0) CNOT(0->1); ``dissipators(control, target)`` gives each pulse's noise."""
    return (cnot_schedule(0, 1, 2, amplitude, dissipators(0, 1))
            + cnot_schedule(1, 0, 2, amplitude, dissipators(1, 0))
            + cnot_schedule(0, 1, 2, amplitude, dissipators(0, 1)))


def pauli_segment(label: str) -> Segment:
    """Ideal Pauli gate, exp(-i pi/2 P) = -i P."""
    return Segment(1.0, 0.5 * np.pi * liouville.pauli_matrix(label), None, "pauli_" + label)


def calibration_noise(xi: float, gamma_dephasing: float = 1.0, gamma_decay: float = 0.1,
                      n_qubits: int = 2) -> NoiseSpec:
    """Dephasing and decay on every qubit during cross-resonance pulses."""
    return local_jumps([(Z, gamma_dephasing), (liouville.lowering(), gamma_decay)], range(n_qubits), n_qubits, xi)


def target_pauli_noise(alphas, xi: float = 1.0) -> DissipatorFactory:
    """Pauli noise on the target qubit of each cross-resonance pulse."""
    cache = {}

    def factory(control: int, target: int):
        if target not in cache:
            cache[target] = build_generator(local_pauli_noise(2, alphas, [target], xi)) if xi else None
        return cache[target]
    return factory
