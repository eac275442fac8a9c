import numpy as np
import pytest

from kik import liouville
from kik.dynamics import PulseSchedule, Segment
from kik.errors import InvalidSpec, NegativeRate
from kik.noise import (
    DriftProfile, NoiseSpec, Waveform, accumulated_noise, build_generator, drift_sampled_generator,
    fluctuating_profile, fluctuating_two_qubit_noise, local_pauli_noise, spontaneous_emission, term_generators,
)


def _trace_leak(G):
    d = int(round(np.sqrt(G.shape[0])))
    return np.max(np.abs(liouville.observable_vector(np.eye(d)) @ G))


@pytest.mark.parametrize("spec", [
    spontaneous_emission(2, 0.7),
    local_pauli_noise(2, [0.1, 0.2, 0.3]),
    NoiseSpec.global_depolarizing(4, 0.1),
    fluctuating_two_qubit_noise(),
])
def test_generators_preserve_trace(spec):
    assert _trace_leak(build_generator(spec)) < 1e-12


def test_pauli_generator_matches_channel():
    spec = NoiseSpec.pauli_channel([("XI", 0.2), ("ZZ", 0.05)], xi=0.5)
    expected = 0.5 * liouville.pauli_channel_superop([("XI", 0.2), ("ZZ", 0.05)])
    np.testing.assert_allclose(build_generator(spec), expected, atol=1e-12)


def test_strength_scales_linearly():
    spec = spontaneous_emission(1, 1.0)
    np.testing.assert_allclose(build_generator(spec.with_strength(0.3)), 0.3 * build_generator(spec), atol=1e-12)
    assert spec.with_strength(0.3).n_terms == spec.n_terms == 1


def test_invalid_specs():
    with pytest.raises(NegativeRate):
        NoiseSpec.jump_operators([(liouville.lowering(), -1.0)])
    with pytest.raises(InvalidSpec):
        NoiseSpec.pauli_channel([("X", -0.1)])
    with pytest.raises(InvalidSpec):
        NoiseSpec.pauli_channel([])
    with pytest.raises(InvalidSpec):
        NoiseSpec.global_depolarizing(2, 1.0)
    with pytest.raises(InvalidSpec):
        spontaneous_emission(1, xi=-0.1)
    with pytest.raises(InvalidSpec):
        NoiseSpec.custom(np.eye(4))


def test_non_trace_preserving_custom_generator_is_flagged():
    spec = NoiseSpec.custom(-np.eye(4), non_trace_preserving=True)
    np.testing.assert_allclose(build_generator(spec), -np.eye(4))


def test_depolarizing_map_at_unit_time():
    from scipy.linalg import expm

    p = 0.2
    channel = expm(build_generator(NoiseSpec.global_depolarizing(2, p)))
    rho = liouville.basis_state("0")
    out = liouville.unvectorize(channel @ liouville.vectorize(rho))
    np.testing.assert_allclose(out, (1 - p) * rho + p * np.eye(2) / 2, atol=1e-12)


def test_fluctuating_profile_values():
    profile = fluctuating_profile(100.0)
    np.testing.assert_allclose(profile.amplitudes(0), [6.0, 1.0, 4.0, 3.0], atol=1e-12)
    x = 2 * 37 / 100.0
    expected = [3 * (1 + np.cos(x)), 1 + np.sin(x), 2 * (1 + np.cos(x)), 3 * (1 + np.sin(x))]
    np.testing.assert_allclose(profile.amplitudes(37), expected, atol=1e-12)
    assert not profile.is_constant


def test_drift_sampled_generator_weights_terms():
    spec = fluctuating_two_qubit_noise(xi=0.05)
    profile = fluctuating_profile(100.0)
    terms = term_generators(spec)
    expected = 0.05 * sum(f * L for f, L in zip(profile.amplitudes(5), terms))
    np.testing.assert_allclose(drift_sampled_generator(spec, profile, 5), expected, atol=1e-14)


def test_constant_profile_reproduces_static_generator():
    spec = fluctuating_two_qubit_noise(xi=0.05)
    profile = DriftProfile.constant(spec.n_terms)
    assert profile.is_constant
    np.testing.assert_allclose(drift_sampled_generator(spec, profile, 12), build_generator(spec), atol=1e-14)


def test_drift_profile_errors():
    spec = fluctuating_two_qubit_noise()
    with pytest.raises(InvalidSpec):
        drift_sampled_generator(spec, DriftProfile.constant(2), 0)
    with pytest.raises(InvalidSpec):
        drift_sampled_generator(spec, DriftProfile.constant(4), -1)
    negative = DriftProfile((Waveform("cosine", offset=0.0, amplitude=1.0, period=4.0),))
    with pytest.raises(InvalidSpec):
        negative.amplitudes(2)
    with pytest.raises(InvalidSpec):
        DriftProfile.oscillating([("cosine", 1.0, 1.0)], drift_time=0.0)
    with pytest.raises(InvalidSpec):
        Waveform("square")


def test_accumulated_noise():
    L = build_generator(NoiseSpec.pauli_channel([("Z", 0.5)]))
    sched = PulseSchedule([Segment(2.0, np.zeros((2, 2)), L), Segment(1.0, np.eye(2))])
    assert accumulated_noise(sched) == pytest.approx(2.0 * np.linalg.norm(L, 2))


def test_local_pauli_noise_labels():
    spec = local_pauli_noise(2, [0.1, 0.0, 0.3], qubits=[1], xi=0.5)
    assert [label for label, _ in spec.pauli_terms] == ["IX", "IY", "IZ"]
    assert spec.xi == 0.5
