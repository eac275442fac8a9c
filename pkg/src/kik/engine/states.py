from functools import reduce
from typing import Sequence, Union

import numpy as np

from kik import liouville


def _imperfect_qubit(delta_theta: float, phi: float) -> np.ndarray:
    return liouville.pure_state([np.cos(0.5 * delta_theta), np.exp(1j * phi) * np.sin(0.5 * delta_theta)])


def rotation_averaged_state(delta_theta: Union[float, Sequence[float]], phi: Sequence[float]) -> np.ndarray:
    """
    Product of imperfectly prepared |0> states, each averaged over R_Z(+pi/2)
    and R_Z(-pi/2) conjugation; returns the vectorized state.

    ``phi`` fixes the qubit count; ``delta_theta`` is shared or per qubit.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    thetas = np.broadcast_to(np.asarray(delta_theta, dtype=float), phi.shape)
    rotations = [np.diag(np.exp([-0.25j * np.pi * s, 0.25j * np.pi * s])) for s in (1.0, -1.0)]
    qubits = []
    for theta, p in zip(thetas, phi):
        rho = _imperfect_qubit(theta, p)
        qubits.append(sum(R @ rho @ R.conj().T for R in rotations) / 2.0)
    return liouville.vectorize(reduce(np.kron, qubits))
