"""
Accuracy bounds of KIK mitigation in terms of the accumulated noise
``eta = int ||L(t)|| dt``:

* adaptive: ``F_A |1 - sum_m a_m(mu) e^(-2 (m + 1/2) eta)|``,
* Taylor: the same with the g = 1 coefficients,
* loose: ``c_M F_A (e^(2 eta) - 1)^(M+1)`` with ``c_M = (2M+1)!! / (2^(M+1) (M+1)!)``.

For physically consistent points (mu >= e^(-2 eta)) they are ordered
adaptive <= Taylor <= loose.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
import sympy
from scipy.linalg import expm

from kik import liouville
from kik.coefficients import adaptive_coefficients, polynomial_residual, taylor_coefficients
from kik.dynamics import PulseSchedule, kik_cycle, magnus1, noiseless_superop
from kik.engine.folding import FoldedPropagators, mitigate_exact
from kik.errors import NonHermitianInput, OutOfRange, UnsupportedOrder
from kik.noise import accumulated_noise

logger = logging.getLogger(__name__)

WEAK_NOISE_LIMIT = 0.5 * np.log(2.0)


@lru_cache(maxsize=None)
def remainder_prefactor(M: int) -> float:
    return float(sympy.factorial2(2 * M + 1) / (sympy.Integer(2) ** (M + 1) * sympy.factorial(M + 1)))


def observable_norm_factor(A: np.ndarray) -> float:
    """sqrt(Tr A^2 - (Tr A)^2 / d), the norm of A's traceless part."""
    A = np.asarray(A)
    if not liouville.is_hermitian(A):
        raise NonHermitianInput("observable is not Hermitian")
    d = A.shape[0]
    value = np.trace(A @ A).real - np.trace(A).real ** 2 / d
    return float(np.sqrt(max(value, 0.0)))


@dataclass(frozen=True)
class BoundReport:
    order: int
    norm_factor: float
    accumulated: float
    mu: float
    adaptive: float
    taylor: float
    loose: float
    bias: Optional[float] = None
    magnus_residual: Optional[float] = None

    @property
    def ordered(self) -> bool:
        return self.adaptive <= self.taylor + 1e-12 and self.taylor <= self.loose + 1e-12

    @property
    def consistent(self) -> bool:
        """mu is reachable with this much noise."""
        return self.mu >= np.exp(-2.0 * self.accumulated) - 1e-12

    @property
    def magnus_gate(self) -> Optional[bool]:
        """Whether the first-order Magnus picture is accurate enough to test the loose bound."""
        if self.magnus_residual is None:
            return None
        return self.magnus_residual < 0.1 * self.loose

    def as_dict(self) -> dict:
        return {
            "bound_adaptive": self.adaptive, "bound_taylor": self.taylor, "bound_loose": self.loose,
            "accumulated_noise": self.accumulated, "norm_factor": self.norm_factor,
        }


def accuracy_bounds_from_noise(norm_factor: float, accumulated: float, mu: float, M: int) -> BoundReport:
    if M not in (1, 2, 3):
        raise UnsupportedOrder("bounds are evaluated for M = 1, 2, 3, not {}".format(M))
    if not 0.0 <= mu <= 1.0:
        raise OutOfRange("survival probability {} outside [0, 1]".format(mu))
    if not accumulated >= 0 or not np.isfinite(accumulated):
        raise OutOfRange("accumulated noise must be finite and non-negative, got {}".format(accumulated))
    lam = np.exp(-2.0 * accumulated)
    adaptive = norm_factor * float(polynomial_residual(adaptive_coefficients(M, mu), lam))
    taylor = norm_factor * float(polynomial_residual(taylor_coefficients(M), lam))
    loose = remainder_prefactor(M) * norm_factor * np.expm1(2.0 * accumulated) ** (M + 1)
    return BoundReport(M, norm_factor, accumulated, mu, adaptive, taylor, float(loose))


def accuracy_bounds(A: np.ndarray, sched: PulseSchedule, mu: float, M: int) -> BoundReport:
    return accuracy_bounds_from_noise(observable_norm_factor(A), accumulated_noise(sched), mu, M)


def _eta(sched_or_eta) -> float:
    if isinstance(sched_or_eta, PulseSchedule):
        return accumulated_noise(sched_or_eta)
    return float(sched_or_eta)


def weak_noise_condition(sched) -> bool:
    """e^(2 eta) < 2: the regime where higher orders keep improving the estimate."""
    return _eta(sched) < WEAK_NOISE_LIMIT


def min_eigenvalue_bound_check(sched: PulseSchedule) -> Tuple[float, float, bool]:
    """
    Smallest eigenvalue of the KIK cycle against e^(-2 eta).

    Non-Hermitian cycles are judged by their smallest singular value.
    """
    cycle = kik_cycle(sched)
    if liouville.is_hermitian(cycle, 1e-9):
        smallest = float(np.linalg.eigvalsh(0.5 * (cycle + cycle.conj().T))[0])
    else:
        smallest = float(np.linalg.svd(cycle, compute_uv=False)[-1])
    bound = float(np.exp(-2.0 * accumulated_noise(sched)))
    return smallest, bound, smallest >= bound - 1e-12


def taylor_remainder_bound(M: int, lam) -> np.ndarray:
    """Bound on |lambda^(-1/2) - sum_m a_Tay,m lambda^m| for lambda in (0, 1]."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0) or np.any(lam > 1):
        raise OutOfRange("lambda must lie in (0, 1]")
    return remainder_prefactor(M) * lam ** (-M - 1.5) * (1.0 - lam) ** (M + 1)


def taylor_remainder(M: int, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    values = taylor_coefficients(M).values
    return np.abs(lam ** -0.5 - np.power.outer(lam, np.arange(M + 1)) @ values)


def magnus_residual(sched: PulseSchedule) -> float:
    """||K_I K - e^(2 Omega_1)||, the part of the cycle the first Magnus term misses."""
    return float(np.linalg.norm(kik_cycle(sched) - expm(2.0 * magnus1(sched)), 2))


def bias_bound_check(sched: PulseSchedule, A: np.ndarray, rho, M: int, g="mu") -> BoundReport:
    """Measured bias next to the three bounds, with the Magnus residual that conditions the comparison."""
    props = FoldedPropagators(sched)
    mu = props.survival(rho)
    ideal = liouville.expectation(A, noiseless_superop(sched), rho)
    bias = mitigate_exact(props, A, rho, M, g).estimate - ideal
    report = accuracy_bounds(A, sched, min(max(mu, 0.0), 1.0), M)
    return BoundReport(**{**report.__dict__, "bias": float(bias), "magnus_residual": magnus_residual(sched)})


def f_m_monotonicity(M: int, grid: Sequence[float]) -> Tuple[float, float]:
    """
    Largest violations of the two facts the adaptive bound rests on:
    f_M(mu, .) decreases on (0, mu], and f_M(mu, lambda) <= f_M(mu, mu) for lambda >= mu.
    Both are zero when the facts hold on ``grid``.
    """
    grid = np.sort(np.asarray(grid, dtype=float))
    worst_decreasing, worst_bounded = 0.0, 0.0
    for mu in grid:
        if mu <= 0:
            continue
        coeffs = adaptive_coefficients(M, mu)
        below = grid[(grid > 0) & (grid <= mu)]
        if below.size > 1:
            f = polynomial_residual(coeffs, below)
            worst_decreasing = max(worst_decreasing, float(np.max(np.diff(f), initial=0.0)))
        above = grid[grid >= mu]
        if above.size:
            f_mu = float(polynomial_residual(coeffs, mu))
            worst_bounded = max(worst_bounded, float(np.max(polynomial_residual(coeffs, above) - f_mu)))
    return worst_decreasing, worst_bounded


def sweep_points(mu_values: Sequence[float], eta_values: Sequence[float]):
    """(mu, eta) pairs with mu >= e^(-2 eta)."""
    return [(mu, eta) for eta in eta_values for mu in mu_values if mu >= np.exp(-2.0 * eta) - 1e-12]
