import numpy as np
import pytest
from scipy.linalg import expm

from kik import liouville
from kik.dynamics import (
    PulseSchedule, Segment, conjugated_cycle, exact_kik_reference, inverse_propagator_first_order,
    inverse_sqrt, kik_cycle, magnus1, noiseless_superop, noiseless_unitary, propagate, pulse_inverse,
    schedule_from_hamiltonians,
)
from kik.errors import BranchCutViolation, DimensionMismatch, InvalidSchedule, NonHermitianInput
from kik.noise import NoiseSpec, build_generator

from conftest import random_hermitian, random_pauli_schedule


def test_segment_validation():
    with pytest.raises(InvalidSchedule):
        Segment(0.0, np.eye(2))
    with pytest.raises(NonHermitianInput):
        Segment(1.0, np.array([[0, 1], [0, 0]]))
    with pytest.raises(DimensionMismatch):
        Segment(1.0, np.eye(2), np.eye(16))


def test_schedule_validation():
    with pytest.raises(InvalidSchedule):
        PulseSchedule([])
    with pytest.raises(InvalidSchedule):
        PulseSchedule([Segment(1.0, np.eye(2)), Segment(1.0, np.eye(4))])
    with pytest.raises(InvalidSchedule):
        PulseSchedule([Segment(1.0, np.eye(2))]) * 0


def test_propagators_compose_new_on_the_left(rng):
    s1 = Segment(0.5, random_hermitian(rng, 2))
    s2 = Segment(0.7, random_hermitian(rng, 2))
    P = propagate(PulseSchedule([s1, s2])).value
    np.testing.assert_allclose(P, s2.propagator @ s1.propagator, atol=1e-12)


def test_pulse_inverse_undoes_noiseless_schedule(noiseless_schedule):
    cycle = kik_cycle(noiseless_schedule)
    np.testing.assert_allclose(cycle, np.eye(16), atol=1e-10)
    assert pulse_inverse(pulse_inverse(noiseless_schedule)) is noiseless_schedule


def test_pulse_inverse_keeps_dissipator(pauli_schedule):
    inverse = pulse_inverse(pauli_schedule)
    assert len(inverse) == len(pauli_schedule)
    np.testing.assert_allclose(inverse[0].hamiltonian, -pauli_schedule[-1].hamiltonian)
    assert inverse[0].dissipator is pauli_schedule[-1].dissipator


def test_noiseless_superop_is_unitary_superop(pauli_schedule):
    U = noiseless_unitary(pauli_schedule)
    assert liouville.is_unitary(U, 1e-10)
    np.testing.assert_allclose(noiseless_superop(pauli_schedule), propagate(pauli_schedule.noiseless()).value,
                               atol=1e-10)


def test_magnus1_vanishes_without_noise(noiseless_schedule):
    np.testing.assert_allclose(magnus1(noiseless_schedule), 0.0)


def test_magnus1_of_idle_is_generator():
    L = build_generator(NoiseSpec.pauli_channel([("Z", 0.3)]))
    sched = PulseSchedule([Segment(2.0, np.zeros((2, 2)), L)])
    np.testing.assert_allclose(magnus1(sched), 2.0 * L, atol=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_magnus1_doubles_over_kik_cycle(seed):
    sched = random_pauli_schedule(np.random.default_rng(seed), 0.05)
    np.testing.assert_allclose(magnus1(sched + pulse_inverse(sched)), 2.0 * magnus1(sched), atol=1e-9)


def _slope(xis, errors):
    return np.polyfit(np.log(xis), np.log(errors), 1)[0]


def test_first_order_inverse_error_is_second_order():
    xis = [1e-2, 5e-3, 2.5e-3]
    errors_inverse, errors_swap = [], []
    for xi in xis:
        sched = random_pauli_schedule(np.random.default_rng(7), xi)
        K = propagate(sched).value
        K_I = propagate(pulse_inverse(sched)).value
        errors_inverse.append(np.linalg.norm(K_I - inverse_propagator_first_order(sched), 2))
        errors_swap.append(np.linalg.norm(K @ K_I - conjugated_cycle(sched), 2))
    assert _slope(xis, errors_inverse) >= 1.9
    assert _slope(xis, errors_swap) >= 1.9


def test_exact_reference_recovers_unitary_under_global_depolarizing(rng):
    L = build_generator(NoiseSpec.global_depolarizing(4, 0.05))
    sched = schedule_from_hamiltonians([random_hermitian(rng, 4), random_hermitian(rng, 4)], L, [0.4, 0.8])
    np.testing.assert_allclose(exact_kik_reference(sched), noiseless_superop(sched), atol=1e-10)


def test_inverse_sqrt_of_hermitian_cycle():
    cycle = np.diag([0.25, 1.0, 4.0])
    np.testing.assert_allclose(inverse_sqrt(cycle), np.diag([2.0, 1.0, 0.5]), atol=1e-12)


def test_inverse_sqrt_branch_cut():
    with pytest.raises(BranchCutViolation):
        inverse_sqrt(np.diag([-0.5, 1.0]))


def test_schedule_fingerprint_tracks_content(rng):
    H = random_hermitian(rng, 2)
    a = PulseSchedule([Segment(1.0, H)])
    b = PulseSchedule([Segment(1.0, H)])
    c = PulseSchedule([Segment(1.0, 2.0 * H)])
    assert a.fingerprint == b.fingerprint != c.fingerprint
    assert propagate(a).schedule_hash == a.fingerprint


def test_segment_propagator_matches_expm(rng):
    H = random_hermitian(rng, 2)
    L = build_generator(NoiseSpec.pauli_channel([("X", 0.1)]))
    seg = Segment(0.6, H, L)
    expected = expm(0.6 * (-1j * liouville.hamiltonian_superop(H) + L))
    np.testing.assert_allclose(seg.propagator, expected, atol=1e-12)
