import numpy as np
import pytest

from kik import liouville
from kik.dynamics import PulseSchedule, Segment
from kik.noise import build_generator, local_pauli_noise


def random_hermitian(rng, dim, scale=1.0):
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (A + A.conj().T)


def random_state(rng, dim):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return liouville.pure_state(psi)


def random_pauli_schedule(rng, xi, n_segments=2, n_qubits=2):
    """Random Hamiltonians under local Pauli noise of strength xi."""
    alphas = rng.uniform(0.2, 1.0, size=3)
    L = build_generator(local_pauli_noise(n_qubits, alphas, xi=xi)) if xi else None
    dim = 2 ** n_qubits
    return PulseSchedule(Segment(float(rng.uniform(0.3, 1.0)), random_hermitian(rng, dim, 0.5), L, "s{}".format(k))
                         for k in range(n_segments))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def noiseless_schedule(rng):
    return random_pauli_schedule(rng, 0.0)


@pytest.fixture
def pauli_schedule(rng):
    return random_pauli_schedule(rng, 0.01)


@pytest.fixture
def ground_state():
    return liouville.basis_state("00")
