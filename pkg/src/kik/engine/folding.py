"""
Folded circuits ``K (K_I K)^m`` and the exact mitigated estimator.

Folds are never propagated as long schedules: ``FoldedPropagators`` builds
``K`` and ``K_I`` once and applies the cycle repeatedly to the state.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from kik import liouville
from kik.coefficients import CoefficientSet, GChoice, select_coefficients
from kik.dynamics import PulseSchedule, magnus1, noiseless_superop, propagate, pulse_inverse
from kik.errors import InvalidSpec, UnsupportedLogicalUnitary

logger = logging.getLogger(__name__)

EXACT = "exact"
SAMPLED = "sampled"


@dataclass(frozen=True, eq=False)
class FoldedEstimates:
    order: int
    values: np.ndarray
    variances: np.ndarray
    shots: np.ndarray
    mode: str = EXACT
    seed: Optional[int] = None


@dataclass(frozen=True, eq=False)
class MitigatedResult:
    estimate: float
    variance: float
    coefficients: CoefficientSet
    mu: Optional[float]
    g: float
    folds: Optional[FoldedEstimates] = None
    extra: dict = field(default_factory=dict)


class FoldedPropagators:
    """
    Noisy block ``K``, its inverse realization ``K_I`` and the KIK cycle.

    ``inverse='pulse'`` propagates the pulse inverse; ``inverse='circuit'``
    reuses ``K`` for self-inverse logical gates. ``ordering='kik'`` folds as
    ``K (K_I K)^m``, ``ordering='kki'`` as ``K (K K_I)^m``.
    """
    def __init__(self, sched: PulseSchedule, inverse: str = "pulse", ordering: str = "kik"):
        K = propagate(sched).value
        if inverse == "pulse":
            K_I = propagate(pulse_inverse(sched)).value
        elif inverse == "circuit":
            U = noiseless_superop(sched)
            if not np.allclose(U @ U, np.eye(U.shape[0]), atol=1e-9):
                raise UnsupportedLogicalUnitary("circuit inverse needs a self-inverse logical gate")
            K_I = K
        else:
            raise InvalidSpec("unknown inverse construction {!r}".format(inverse))
        self._init(K, K_I, ordering)
        self._schedule = sched

    @classmethod
    def from_superops(cls, K: np.ndarray, K_I: np.ndarray, ordering: str = "kik") -> "FoldedPropagators":
        obj = cls.__new__(cls)
        obj._init(np.asarray(K, dtype=complex), np.asarray(K_I, dtype=complex), ordering)
        obj._schedule = None
        return obj

    def _init(self, K, K_I, ordering):
        if K.shape != K_I.shape:
            raise InvalidSpec("K and K_I shapes differ: {} vs {}".format(K.shape, K_I.shape))
        if ordering == "kik":
            cycle = K_I @ K
        elif ordering == "kki":
            cycle = K @ K_I
        else:
            raise InvalidSpec("unknown fold ordering {!r}".format(ordering))
        self._K = K
        self._K_I = K_I
        self._cycle = cycle
        self._ordering = ordering

    @property
    def K(self):
        return self._K

    @property
    def K_I(self):
        return self._K_I

    @property
    def cycle(self):
        return self._cycle

    @property
    def ordering(self):
        return self._ordering

    @property
    def schedule(self):
        return self._schedule

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self._K.shape[0])))

    def survival(self, rho) -> float:
        return self.survival_moment(rho, 1)

    def survival_moment(self, rho, k: int = 1) -> float:
        """<rho| cycle^k |rho>, with rho read as an observable on the left."""
        r = liouville.as_state_vector(rho)
        dual = liouville.observable_vector(liouville.unvectorize(r))
        v = r
        for _ in range(k):
            v = self._cycle @ v
        return float((dual @ v).real)

    def fold_states(self, rho, M: int):
        """Vectorized K cycle^m |rho> for m = 0..M."""
        v = liouville.as_state_vector(rho)
        out = []
        for m in range(M + 1):
            if m:
                v = self._cycle @ v
            out.append(self._K @ v)
        return out

    def fold_superop(self, m: int) -> np.ndarray:
        return self._K @ np.linalg.matrix_power(self._cycle, m)

    def fold_expectations(self, A, rho, M: int) -> np.ndarray:
        a = liouville.as_observable_vector(A)
        return np.array([(a @ state).real for state in self.fold_states(rho, M)])

    def mitigated_state(self, rho, coeffs: CoefficientSet) -> np.ndarray:
        states = self.fold_states(rho, coeffs.order)
        return sum(a * s for a, s in zip(coeffs.values, states))

    def mitigated_superop(self, coeffs: CoefficientSet) -> np.ndarray:
        total = np.zeros_like(self._K)
        power = np.eye(self._K.shape[0], dtype=complex)
        for m, a in enumerate(coeffs.values):
            if m:
                power = self._cycle @ power
            total += a * (self._K @ power)
        return total


def _as_propagators(sched: Union[PulseSchedule, FoldedPropagators], **kwargs) -> FoldedPropagators:
    if isinstance(sched, FoldedPropagators):
        return sched
    return FoldedPropagators(sched, **kwargs)


def folded_schedule(sched: PulseSchedule, m: int) -> PulseSchedule:
    """sched followed by m copies of (pulse inverse, sched)."""
    if m < 0:
        raise InvalidSpec("fold index must be non-negative, got {}".format(m))
    if m == 0:
        return sched
    return sched + (pulse_inverse(sched) + sched) * m


def survival_probability(sched, rho) -> float:
    if np.ndim(rho) == 2:
        liouville.vectorize(rho, physical=True)
    return _as_propagators(sched).survival(rho)


def survival_moment(sched, rho, k: int) -> float:
    return _as_propagators(sched).survival_moment(rho, k)


def resolve_coefficients(props: FoldedPropagators, rho, M: int, g, kind: str = "auto"):
    """Evaluate g (measuring mu once from the cycle if needed) and pick the coefficients."""
    g = GChoice.parse(g)
    mu = props.survival(rho) if g.needs_mu else None
    g_value = g.evaluate(mu)
    if kind == "auto" and not g.needs_mu:
        kind = "taylor"
    return select_coefficients(M, g_value, kind), mu, g_value


def mitigate_exact(sched, A, rho, M: int, g="1", kind: str = "auto", inverse: str = "pulse",
                   ordering: str = "kik", coeffs: Optional[CoefficientSet] = None) -> MitigatedResult:
    """sum_m a_m <A>_m with every fold evaluated exactly."""
    if M < 0:
        raise InvalidSpec("order must be non-negative, got {}".format(M))
    props = _as_propagators(sched, inverse=inverse, ordering=ordering)
    if coeffs is None:
        coeffs, mu, g_value = resolve_coefficients(props, rho, M, g, kind)
    else:
        mu, g_value = None, coeffs.g
    values = props.fold_expectations(A, rho, M)
    estimate = float(coeffs.values @ values)
    folds = FoldedEstimates(M, values, np.zeros(M + 1), np.zeros(M + 1, dtype=int), EXACT)
    logger.debug("exact mitigation M=%d g=%.4g: folds %s -> %.10g", M, g_value, values, estimate)
    return MitigatedResult(estimate, 0.0, coeffs, mu, g_value, folds)


def mitigated_state(sched, rho, M: int, g="1", kind: str = "auto", inverse: str = "pulse",
                    ordering: str = "kik") -> np.ndarray:
    """Mitigated density matrix sum_m a_m K (K_I K)^m rho; not necessarily positive."""
    props = _as_propagators(sched, inverse=inverse, ordering=ordering)
    coeffs, _, _ = resolve_coefficients(props, rho, M, g, kind)
    return liouville.unvectorize(props.mitigated_state(rho, coeffs))


def mitigated_superop(sched, coeffs: CoefficientSet, inverse: str = "pulse", ordering: str = "kik") -> np.ndarray:
    return _as_propagators(sched, inverse=inverse, ordering=ordering).mitigated_superop(coeffs)


def circuit_inverse_residual(sched: PulseSchedule) -> np.ndarray:
    """1/2 [U, Omega_1]: what circuit-inverse folding leaves behind at first order."""
    U = noiseless_superop(sched)
    omega = magnus1(sched)
    return 0.5 * (U @ omega - omega @ U)


def mitigation_bias(sched: PulseSchedule, A, rho, orders: Sequence[int], g="1", kind: str = "auto",
                    inverse: str = "pulse", ordering: str = "kik") -> np.ndarray:
    """Mitigated minus ideal expectation for each order."""
    props = FoldedPropagators(sched, inverse=inverse, ordering=ordering)
    ideal = liouville.expectation(A, noiseless_superop(sched), rho)
    return np.array([mitigate_exact(props, A, rho, M, g, kind).estimate - ideal for M in orders])
