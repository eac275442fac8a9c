import numpy as np
import pytest

from kik import liouville
from kik.bounds import (
    WEAK_NOISE_LIMIT, accuracy_bounds, accuracy_bounds_from_noise, bias_bound_check, f_m_monotonicity,
    min_eigenvalue_bound_check, observable_norm_factor, remainder_prefactor, sweep_points, taylor_remainder,
    taylor_remainder_bound, weak_noise_condition,
)
from kik.errors import NonHermitianInput, OutOfRange, UnsupportedOrder
from kik.noise import accumulated_noise
from kik.scenarios.bounds_sweep import dephasing_idle, pauli_noise_gate

from conftest import random_pauli_schedule


def test_remainder_prefactor():
    assert remainder_prefactor(0) == pytest.approx(0.5)
    assert remainder_prefactor(1) == pytest.approx(3 / 8)
    assert remainder_prefactor(2) == pytest.approx(15 / 48)


def test_observable_norm_factor():
    assert observable_norm_factor(liouville.pauli_matrix("Z")) == pytest.approx(np.sqrt(2))
    assert observable_norm_factor(np.eye(4)) == pytest.approx(0.0)
    assert observable_norm_factor(liouville.pauli_matrix("Z") + 3 * np.eye(2)) == pytest.approx(np.sqrt(2))
    with pytest.raises(NonHermitianInput):
        observable_norm_factor(np.array([[0, 1], [0, 0]]))


@pytest.mark.parametrize("M", [1, 2, 3])
def test_bounds_are_ordered_on_consistent_grid(M):
    points = sweep_points(np.linspace(0.3, 1.0, 15), np.linspace(0.01, 0.5, 15))
    assert points
    for mu, eta in points:
        report = accuracy_bounds_from_noise(1.0, eta, mu, M)
        assert report.consistent
        assert report.ordered, (mu, eta, report)


def test_sweep_points_drop_unreachable_survival():
    points = sweep_points([0.1, 0.9], [0.1])
    assert points == [(0.9, 0.1)]


def test_zero_noise_bounds_vanish():
    report = accuracy_bounds_from_noise(np.sqrt(2), 0.0, 1.0, 2)
    assert report.adaptive == pytest.approx(0.0, abs=1e-12)
    assert report.taylor == pytest.approx(0.0, abs=1e-12)
    assert report.loose == 0.0


def test_bound_input_errors():
    with pytest.raises(UnsupportedOrder):
        accuracy_bounds_from_noise(1.0, 0.1, 0.9, 4)
    with pytest.raises(OutOfRange):
        accuracy_bounds_from_noise(1.0, 0.1, 1.2, 1)
    with pytest.raises(OutOfRange):
        accuracy_bounds_from_noise(1.0, -0.1, 0.9, 1)
    with pytest.raises(OutOfRange):
        taylor_remainder_bound(1, [0.0, 0.5])


@pytest.mark.parametrize("M", [1, 2, 3])
def test_taylor_remainder_within_lagrange_bound(M):
    lam = np.linspace(0.2, 1.0, 41)
    assert np.all(taylor_remainder(M, lam) <= taylor_remainder_bound(M, lam) + 1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_cycle_eigenvalues_above_noise_bound(seed):
    sched = random_pauli_schedule(np.random.default_rng(seed), 0.1)
    smallest, bound, holds = min_eigenvalue_bound_check(sched)
    assert holds, (smallest, bound)


def test_dephasing_meets_eigenvalue_bound():
    alpha = 0.1
    smallest, bound, holds = min_eigenvalue_bound_check(dephasing_idle(alpha))
    assert holds
    assert smallest == pytest.approx(np.exp(-4 * alpha), abs=1e-9)
    assert bound == pytest.approx(smallest, abs=1e-9)


def test_weak_noise_condition():
    assert weak_noise_condition(0.3)
    assert not weak_noise_condition(0.4)
    assert WEAK_NOISE_LIMIT == pytest.approx(0.5 * np.log(2))
    assert weak_noise_condition(dephasing_idle(0.1))


def test_accuracy_bounds_read_schedule_noise():
    sched = pauli_noise_gate(0.05, [1.0, 0.5, 0.8])
    A = np.kron(liouville.pauli_matrix("Z"), np.eye(2))
    report = accuracy_bounds(A, sched, 0.9, 1)
    assert report.accumulated == pytest.approx(accumulated_noise(sched))
    assert report.norm_factor == pytest.approx(2.0)


@pytest.mark.parametrize("M", [1, 2, 3])
def test_measured_bias_within_loose_bound(M):
    sched = pauli_noise_gate(0.01, [1.0, 0.5, 0.8])
    A = np.kron(liouville.pauli_matrix("Z"), np.eye(2))
    report = bias_bound_check(sched, A, liouville.basis_state("00"), M)
    assert report.bias is not None and report.magnus_residual is not None
    assert report.consistent and report.ordered
    if report.magnus_gate:
        assert abs(report.bias) <= report.loose


def test_dephasing_bias_meets_adaptive_bound():
    sched = dephasing_idle(0.1)
    plus = liouville.pure_state([1.0, 1.0])
    report = bias_bound_check(sched, liouville.pauli_matrix("X"), plus, 1)
    assert abs(report.bias) <= report.adaptive + 1e-12
    assert abs(report.bias) / report.adaptive == pytest.approx(1 / np.sqrt(2), rel=1e-6)


def test_adaptive_residual_monotonicity():
    worst_decreasing, worst_bounded = f_m_monotonicity(1, np.linspace(0.05, 1.0, 40))
    assert worst_decreasing <= 1e-12
    assert worst_bounded <= 1e-12
