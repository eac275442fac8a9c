"""
Shot-noise simulation of the mitigated estimator.

Every independent work unit (fold, RC realization) draws from its own
generator ``SeedSequence(seed, spawn_key=key)``, so results do not depend on
evaluation order.
"""
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from kik import liouville
from kik.coefficients import CoefficientSet, GChoice, select_coefficients
from kik.engine.folding import SAMPLED, FoldedEstimates, MitigatedResult, _as_propagators
from kik.errors import BudgetTooSmall, InvalidSpec, NotDiagonalObservable, SingularMeasurementMatrix
from kik.settings import settings

logger = logging.getLogger(__name__)

# spawn key reserved for the survival-probability draw
_MU_KEY = 2 ** 31 - 1


def unit_rng(seed: Optional[int], *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """Column-stochastic p(l | k): column k is the readout distribution of basis state k."""
    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        dim = 2 ** self.n_qubits
        if mat.shape != (dim, dim):
            raise InvalidSpec("measurement matrix must be {0}x{0}, got {1}".format(dim, mat.shape))
        if np.any(mat < -1e-12) or np.any(mat > 1 + 1e-12):
            raise InvalidSpec("measurement matrix entries must lie in [0, 1]")
        if np.max(np.abs(mat.sum(axis=0) - 1.0)) > 1e-9:
            raise InvalidSpec("measurement matrix columns must sum to 1")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, n_qubits: int) -> "MeasurementMatrix":
        return cls(n_qubits, np.eye(2 ** n_qubits))

    @classmethod
    def from_flip_probabilities(cls, p01, p10, n_qubits: Optional[int] = None) -> "MeasurementMatrix":
        """
        Independent per-qubit readout: ``p01`` is P(read 1 | prepared 0),
        ``p10`` is P(read 0 | prepared 1); scalars apply to every qubit.
        """
        p01, p10 = np.atleast_1d(p01).astype(float), np.atleast_1d(p10).astype(float)
        n = n_qubits or max(len(p01), len(p10))
        p01 = np.broadcast_to(p01, (n,))
        p10 = np.broadcast_to(p10, (n,))
        singles = [np.array([[1.0 - a, b], [a, 1.0 - b]]) for a, b in zip(p01, p10)]
        return cls(n, reduce(np.kron, singles))

    @property
    def condition_number(self) -> float:
        return float(np.linalg.cond(self.matrix))

    def _checked(self):
        cond = self.condition_number
        if cond > settings.readout_cond_limit:
            raise SingularMeasurementMatrix("measurement matrix condition number {:.3e}".format(cond))

    def distort(self, probabilities: np.ndarray) -> np.ndarray:
        return self.matrix @ probabilities

    def correct(self, distribution: np.ndarray) -> np.ndarray:
        self._checked()
        return np.linalg.solve(self.matrix, distribution)

    def corrected_values(self, values: np.ndarray) -> np.ndarray:
        """Outcome values (M^-1)^T a whose mean under the distorted distribution is unbiased."""
        self._checked()
        return np.linalg.solve(self.matrix.T, values)


def allocate_shots(coeffs: CoefficientSet, N: int) -> np.ndarray:
    """N_m proportional to |a_m| by largest remainder, every fold getting at least one shot."""
    M = coeffs.order
    if N < M + 1:
        raise BudgetTooSmall("{} shots cannot cover {} folds".format(N, M + 1))
    weights = np.abs(coeffs.values)
    ideal = weights * N / weights.sum()
    shots = np.floor(ideal).astype(int)
    remainder = N - shots.sum()
    order = np.argsort(-(ideal - shots), kind="stable")
    shots[order[:remainder]] += 1
    for m in np.flatnonzero(shots == 0):
        shots[np.argmax(shots)] -= 1
        shots[m] = 1
    return shots


def diagonal_values(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim == 1:
        A = liouville.unvectorize(A).conj()
    off = A - np.diag(np.diag(A))
    if np.max(np.abs(off), initial=0.0) > 1e-12:
        raise NotDiagonalObservable("sampled observables must be diagonal in the measured basis")
    values = np.diag(A)
    if np.max(np.abs(values.imag), initial=0.0) > 1e-12:
        raise NotDiagonalObservable("observable has complex diagonal")
    return values.real


def outcome_distribution(state_vec: np.ndarray) -> np.ndarray:
    p = np.clip(np.diag(liouville.unvectorize(state_vec)).real, 0.0, None)
    return p / p.sum()


def sample_mean(rng: np.random.Generator, n_shots: int, distribution: np.ndarray, values: np.ndarray):
    """Empirical mean and single-shot variance of ``values`` over ``n_shots`` draws."""
    counts = rng.multinomial(n_shots, distribution)
    mean = counts @ values / n_shots
    second = counts @ values ** 2 / n_shots
    return mean, max(second - mean ** 2, 0.0)


def sampled_survival(mu: float, mu_shots: int, seed: Optional[int]) -> float:
    """Binomial estimate of the survival probability from ``mu_shots`` KIK-cycle runs."""
    rng = unit_rng(seed, _MU_KEY)
    return rng.binomial(mu_shots, float(np.clip(mu, 0.0, 1.0))) / mu_shots


def _split(total: int, parts: int) -> np.ndarray:
    base = np.full(parts, total // parts)
    base[: total % parts] += 1
    return base


def mitigate_sampled(sched, A, rho, M: int, g="1", N: int = 10000, seed: Optional[int] = None,
                     rc: Optional[Sequence] = None, readout: Optional[MeasurementMatrix] = None,
                     kind: str = "auto", mu_shots: Optional[int] = None, inverse: str = "pulse",
                     ordering: str = "kik") -> MitigatedResult:
    """
    Finite-shot mitigated estimate.

    ``rc`` is a sequence of ``FoldedPropagators``, one per randomized-compiling
    realization; each fold budget is split evenly across them and mu is read
    from the twirled cycle, the mean of the per-realization survivals.
    """
    props = _as_propagators(sched, inverse=inverse, ordering=ordering)
    realizations = [props] if not rc else list(rc)
    values = diagonal_values(A)
    if readout is not None:
        values = readout.corrected_values(values)

    g = GChoice.parse(g)
    mu = None
    if g.needs_mu:
        mu = float(np.mean([r.survival(rho) for r in realizations]))
        if mu_shots:
            mu = sampled_survival(mu, mu_shots, seed)
    g_value = g.evaluate(mu)
    coeffs = select_coefficients(M, g_value, "taylor" if kind == "auto" and not g.needs_mu else kind)
    shots = allocate_shots(coeffs, N)

    fold_states = [r.fold_states(rho, M) for r in realizations]
    means = np.zeros(M + 1)
    variances = np.zeros(M + 1)
    for m in range(M + 1):
        budgets = _split(int(shots[m]), len(realizations))
        used = [(i, n) for i, n in enumerate(budgets) if n > 0]
        mean_acc, var_acc = 0.0, 0.0
        for i, n in used:
            rng = unit_rng(seed, m) if not rc else unit_rng(seed, m, i)
            distribution = outcome_distribution(fold_states[i][m])
            if readout is not None:
                distribution = readout.distort(distribution)
            mean, var = sample_mean(rng, n, distribution, values)
            mean_acc += mean
            var_acc += var / n
        R = len(used)
        means[m] = mean_acc / R
        # per-shot variance equivalent of the fold mean's variance
        variances[m] = var_acc / R ** 2 * shots[m]
    estimate = float(coeffs.values @ means)
    variance = float(np.sum(coeffs.values ** 2 * variances / shots))
    folds = FoldedEstimates(M, means, variances, shots, SAMPLED, seed)
    return MitigatedResult(estimate, variance, coeffs, mu, g_value, folds)
