import numpy as np
import pytest

from kik import liouville
from kik.coefficients import taylor_coefficients
from kik.dynamics import noiseless_superop, propagate
from kik.engine import (
    FoldedPropagators, MeasurementMatrix, allocate_shots, circuit_inverse_residual, folded_schedule,
    mitigate_exact, mitigate_sampled, mitigated_state, mitigated_superop, mitigation_bias, rc_propagators,
    rc_realizations, rotation_averaged_state, set_averaged_mitigate, shot_layout, survival_probability,
    twirl_average, twirled_propagators,
)
from kik.engine.twirling import conjugate_pauli
from kik.errors import (
    BudgetTooSmall, InvalidSpec, NotDensityMatrix, NotDiagonalObservable, UnsupportedLogicalUnitary,
)
from kik.noise import DriftProfile, build_generator, fluctuating_profile, fluctuating_two_qubit_noise
from kik.scenarios.drift import drift_gate, drift_state
from kik.scenarios.gates import cnot_schedule, swap_schedule, target_pauli_noise

from conftest import random_pauli_schedule

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


# folding

def test_folded_schedule_length(pauli_schedule):
    assert len(folded_schedule(pauli_schedule, 0)) == len(pauli_schedule)
    assert len(folded_schedule(pauli_schedule, 3)) == 7 * len(pauli_schedule)
    with pytest.raises(InvalidSpec):
        folded_schedule(pauli_schedule, -1)


def test_fold_expectations_match_long_schedule(pauli_schedule, ground_state):
    A = liouville.pauli_matrix("ZZ")
    props = FoldedPropagators(pauli_schedule)
    values = props.fold_expectations(A, ground_state, 3)
    for m in range(4):
        K = propagate(folded_schedule(pauli_schedule, m)).value
        assert values[m] == pytest.approx(liouville.expectation(A, K, ground_state), abs=1e-10)


def test_noiseless_schedule_has_no_bias(noiseless_schedule, ground_state):
    A = liouville.pauli_matrix("ZI")
    bias = mitigation_bias(noiseless_schedule, A, ground_state, [0, 1, 2, 3])
    np.testing.assert_allclose(bias, 0.0, atol=1e-10)
    assert survival_probability(noiseless_schedule, ground_state) == pytest.approx(1.0, abs=1e-10)


def test_survival_rejects_unphysical_state(pauli_schedule):
    with pytest.raises(NotDensityMatrix):
        survival_probability(pauli_schedule, 2.0 * liouville.basis_state("00"))


def test_first_order_mitigation_improves(ground_state):
    sched = random_pauli_schedule(np.random.default_rng(3), 0.02)
    bias = sum(np.abs(mitigation_bias(sched, liouville.pauli_matrix(label), ground_state, [0, 1, 2]))
               for label in ("ZI", "IZ", "ZZ"))
    assert bias[1] < bias[0]
    assert bias[2] < bias[1]


def test_adaptive_g_uses_survival(pauli_schedule, ground_state):
    A = liouville.pauli_matrix("ZZ")
    result = mitigate_exact(pauli_schedule, A, ground_state, 2, "mu")
    assert result.mu == pytest.approx(survival_probability(pauli_schedule, ground_state))
    assert result.g == pytest.approx(result.mu)
    assert result.coefficients.g == pytest.approx(result.mu)


def test_mitigated_state_has_unit_trace(pauli_schedule, ground_state):
    rho = mitigated_state(pauli_schedule, ground_state, 2)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)


def test_circuit_inverse_needs_self_inverse_gate(pauli_schedule):
    with pytest.raises(UnsupportedLogicalUnitary):
        FoldedPropagators(pauli_schedule, inverse="circuit")
    with pytest.raises(InvalidSpec):
        FoldedPropagators(pauli_schedule, inverse="mirror")


def test_fold_ordering_variants(pauli_schedule, ground_state):
    kik = FoldedPropagators(pauli_schedule)
    kki = FoldedPropagators(pauli_schedule, ordering="kki")
    np.testing.assert_allclose(kki.fold_superop(1), kik.K @ kik.K @ kik.K_I, atol=1e-12)
    np.testing.assert_allclose(kik.fold_superop(1), kik.K @ kik.K_I @ kik.K, atol=1e-12)
    with pytest.raises(InvalidSpec):
        FoldedPropagators(pauli_schedule, ordering="ikk")


def test_circuit_inverse_leaves_commutator_residual():
    sched = swap_schedule(target_pauli_noise([0.1, 0.0, 0.1], 0.005))
    U = noiseless_superop(sched)
    residual = circuit_inverse_residual(sched)
    coeffs = taylor_coefficients(1)
    circuit = mitigated_superop(sched, coeffs, inverse="circuit")
    pulse = mitigated_superop(sched, coeffs, inverse="pulse")
    assert np.linalg.norm(residual) > 0
    assert np.linalg.norm(circuit - U - residual) <= 0.2 * np.linalg.norm(residual)
    assert np.linalg.norm(pulse - U) <= 0.2 * np.linalg.norm(residual)


# sampling

def test_allocate_shots():
    np.testing.assert_array_equal(allocate_shots(taylor_coefficients(1), 200), [150, 50])
    shots = allocate_shots(taylor_coefficients(4), 5)
    assert shots.sum() == 5 and np.all(shots >= 1)
    with pytest.raises(BudgetTooSmall):
        allocate_shots(taylor_coefficients(3), 3)


def test_readout_correction_round_trip():
    readout = MeasurementMatrix.from_flip_probabilities([0.02, 0.05], [0.03, 0.01])
    p = np.array([0.4, 0.3, 0.2, 0.1])
    np.testing.assert_allclose(readout.correct(readout.distort(p)), p, atol=1e-12)
    np.testing.assert_allclose(readout.matrix.sum(axis=0), 1.0)
    with pytest.raises(InvalidSpec):
        MeasurementMatrix(1, [[0.5, 0.5], [0.4, 0.5]])


def test_sampled_estimate_is_deterministic(pauli_schedule, ground_state):
    A = liouville.pauli_matrix("ZZ")
    a = mitigate_sampled(pauli_schedule, A, ground_state, 2, N=1000, seed=42)
    b = mitigate_sampled(pauli_schedule, A, ground_state, 2, N=1000, seed=42)
    c = mitigate_sampled(pauli_schedule, A, ground_state, 2, N=1000, seed=43)
    assert a.estimate == b.estimate
    assert a.estimate != c.estimate


def test_sampled_variance_matches_spread(pauli_schedule, ground_state):
    A = liouville.pauli_matrix("ZI")
    results = [mitigate_sampled(pauli_schedule, A, ground_state, 1, N=400, seed=s) for s in range(1000)]
    spread = np.var([r.estimate for r in results], ddof=1)
    predicted = np.mean([r.variance for r in results])
    assert predicted == pytest.approx(spread, rel=0.15)


def test_sampled_estimate_converges(pauli_schedule, ground_state):
    A = liouville.pauli_matrix("ZZ")
    exact = mitigate_exact(pauli_schedule, A, ground_state, 2).estimate
    sampled = mitigate_sampled(pauli_schedule, A, ground_state, 2, N=2_000_000, seed=7)
    assert sampled.estimate == pytest.approx(exact, abs=5 * np.sqrt(sampled.variance) + 1e-3)


def test_readout_corrected_sampling_is_unbiased(pauli_schedule, ground_state):
    A = liouville.pauli_matrix("ZZ")
    readout = MeasurementMatrix.from_flip_probabilities(0.03, 0.05, n_qubits=2)
    exact = mitigate_exact(pauli_schedule, A, ground_state, 1).estimate
    sampled = mitigate_sampled(pauli_schedule, A, ground_state, 1, N=2_000_000, seed=3, readout=readout)
    assert sampled.estimate == pytest.approx(exact, abs=5 * np.sqrt(sampled.variance) + 1e-3)


def test_sampling_needs_diagonal_observable(pauli_schedule, ground_state):
    with pytest.raises(NotDiagonalObservable):
        mitigate_sampled(pauli_schedule, liouville.pauli_matrix("XI"), ground_state, 1, N=100, seed=0)


def test_sampled_rc_reads_mu_from_twirled_cycle(ground_state):
    sched = cnot_schedule(dissipator=build_generator(fluctuating_two_qubit_noise(0.05)))
    rc = rc_propagators(sched, rc_realizations(sched, policy="enumerate", seed=0))
    A = liouville.pauli_matrix("ZZ")
    result = mitigate_sampled(sched, A, ground_state, 1, "mu", N=1600, seed=5, rc=rc)
    twirled = np.mean([props.survival(ground_state) for props in rc])
    assert result.mu == pytest.approx(twirled, abs=1e-12)
    assert result.mu != pytest.approx(survival_probability(sched, ground_state), abs=1e-6)


# twirling

def test_conjugate_pauli_through_cnot():
    assert conjugate_pauli(CNOT, "XI") == ("XX", 1)
    assert conjugate_pauli(CNOT, "IZ") == ("ZZ", 1)
    T = np.kron(np.diag([1.0, np.exp(0.25j * np.pi)]), np.eye(2))
    with pytest.raises(UnsupportedLogicalUnitary):
        conjugate_pauli(T, "XI")


def test_rc_realizations_preserve_logical_gate():
    sched = cnot_schedule()
    realizations = rc_realizations(sched, policy="enumerate", seed=0)
    assert len(realizations) == 16
    U_sup = noiseless_superop(sched)
    for props in rc_propagators(sched.noiseless(), realizations):
        np.testing.assert_allclose(props.K, U_sup, atol=1e-9)
        np.testing.assert_allclose(props.cycle, np.eye(16), atol=1e-9)


def test_random_policy_needs_count():
    with pytest.raises(InvalidSpec):
        rc_realizations(cnot_schedule(), policy="random")
    assert len(rc_realizations(cnot_schedule(), count=5, seed=1)) == 5


def test_full_twirl_gives_pauli_channel():
    sched = cnot_schedule(dissipator=build_generator(fluctuating_two_qubit_noise(0.05)))
    twirled = twirl_average(sched, None)
    error = noiseless_superop(sched).conj().T @ twirled
    R = liouville.ptm_of(error)
    np.testing.assert_allclose(R - np.diag(np.diag(R)), 0.0, atol=1e-10)


def test_twirled_propagators_of_noiseless_chain():
    blocks = [cnot_schedule(), cnot_schedule(control=1, target=0)]
    props = twirled_propagators(blocks)
    np.testing.assert_allclose(props.cycle, np.eye(16), atol=1e-9)
    with pytest.raises(InvalidSpec):
        twirled_propagators([])


# state preparation

def test_rotation_averaged_state():
    rho = liouville.unvectorize(rotation_averaged_state(0.0, [0.3]))
    np.testing.assert_allclose(rho, liouville.basis_state("0"), atol=1e-12)
    theta = 0.2
    rho = liouville.unvectorize(rotation_averaged_state(theta, [0.7]))
    assert rho[0, 0].real == pytest.approx(np.cos(theta / 2) ** 2)
    assert abs(rho[0, 1]) < abs(np.sin(theta) / 2)
    assert rotation_averaged_state([0.1, 0.2], [0.0, 0.5]).shape == (16,)


# drift

def test_shot_layout():
    layout = shot_layout(10, 2, 1)
    assert layout[:5] == [(0, 0), (0, 0), (0, 0), (0, 1), (0, 1)]
    assert layout[5:] == [(1, 0), (1, 0), (1, 0), (1, 1), (1, 1)]
    with pytest.raises(BudgetTooSmall):
        shot_layout(10, 5, 2)
    with pytest.raises(InvalidSpec):
        shot_layout(10, 0, 1)


def test_constant_drift_does_not_depend_on_sets():
    noise = fluctuating_two_qubit_noise(0.05)
    profile = DriftProfile.constant(noise.n_terms)
    gate, rho = drift_gate(), drift_state()
    A = liouville.pauli_matrix("IZ")
    static = gate.with_dissipator(build_generator(noise))
    exact = mitigate_exact(static, A, rho, 2).estimate
    for S in (1, 4):
        result = set_averaged_mitigate(gate, A, rho, 2, "1", S, profile, noise, N=120)
        assert result.estimate == pytest.approx(exact, abs=1e-10)


def test_drifting_noise_changes_set_estimates():
    noise = fluctuating_two_qubit_noise(0.05)
    gate, rho = drift_gate(), drift_state()
    A = liouville.pauli_matrix("IZ")
    result = set_averaged_mitigate(gate, A, rho, 1, "1", 4, fluctuating_profile(50.0), noise, N=400)
    assert np.ptp(result.extra["set_estimates"]) > 0
    assert result.extra["n_sets"] == 4
