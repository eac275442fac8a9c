"""
Set-averaged mitigation under drifting noise.

The shot budget is cut into S consecutive sets; within a set the shots run
fold-major (all m=0 shots, then m=1, ...). Shot n is executed under the
generator sampled at n, so each set sees the noise of its own time window.
Each set is mitigated on its own and the S estimates are averaged.
"""
import logging
from typing import Optional

import numpy as np

from kik import liouville
from kik.coefficients import GChoice, select_coefficients
from kik.dynamics import PulseSchedule
from kik.engine.folding import EXACT, SAMPLED, FoldedEstimates, FoldedPropagators, MitigatedResult
from kik.engine.sampling import _split, diagonal_values, outcome_distribution, unit_rng
from kik.errors import BudgetTooSmall, InvalidSpec
from kik.noise import DriftProfile, NoiseSpec, drift_sampled_generator, term_generators

logger = logging.getLogger(__name__)


def shot_layout(N: int, S: int, M: int):
    """(set, fold) of every shot in execution order."""
    if S < 1:
        raise InvalidSpec("number of sets must be positive, got {}".format(S))
    if N // S < M + 1:
        raise BudgetTooSmall("{} shots in {} sets cannot cover {} folds per set".format(N, S, M + 1))
    layout = []
    for s, size in enumerate(_split(N, S)):
        for m, n_m in enumerate(_split(int(size), M + 1)):
            layout.extend([(s, m)] * int(n_m))
    return layout


class _ShotPropagators:
    """Per-shot ``FoldedPropagators`` keyed by the sampled drift amplitudes."""
    def __init__(self, sched: PulseSchedule, noise: NoiseSpec, drift: DriftProfile):
        self._sched = sched
        self._noise = noise
        self._drift = drift
        self._terms = term_generators(noise)
        self._cache = {}

    def __call__(self, n: int) -> FoldedPropagators:
        key = self._drift.amplitudes(n).tobytes()
        if key not in self._cache:
            G = drift_sampled_generator(self._noise, self._drift, n, self._terms)
            self._cache[key] = FoldedPropagators(self._sched.with_dissipator(G))
        return self._cache[key]

    @property
    def cache_size(self) -> int:
        return len(self._cache)


def set_averaged_mitigate(sched: PulseSchedule, A, rho, M: int, g, S: int, drift: DriftProfile,
                          noise: NoiseSpec, N: int, seed: Optional[int] = None,
                          kind: str = "auto") -> MitigatedResult:
    """
    Average of S independently mitigated estimates.

    Without ``seed`` every shot contributes its exact expectation value;
    with a seed it contributes one sampled measurement outcome (``A`` must
    then be diagonal).
    """
    g = GChoice.parse(g)
    layout = shot_layout(N, S, M)
    shot_props = _ShotPropagators(sched, noise, drift)
    a = liouville.as_observable_vector(A)
    r = liouville.as_state_vector(rho)
    values = diagonal_values(A) if seed is not None else None

    sums = np.zeros((S, M + 1))
    counts = np.zeros((S, M + 1), dtype=int)
    mu_sums = np.zeros(S)
    rngs = [unit_rng(seed, s) for s in range(S)] if seed is not None else None
    for n, (s, m) in enumerate(layout):
        props = shot_props(n)
        state = props.fold_superop(m) @ r
        if seed is None:
            sums[s, m] += (a @ state).real
        else:
            outcome = rngs[s].choice(len(values), p=outcome_distribution(state))
            sums[s, m] += values[outcome]
        counts[s, m] += 1
        if g.needs_mu:
            mu_sums[s] += props.survival(rho)
    logger.debug("drift run: %d shots, %d distinct generators", N, shot_props.cache_size)

    fold_means = sums / counts
    set_mu = mu_sums / counts.sum(axis=1) if g.needs_mu else np.full(S, np.nan)
    estimates = np.empty(S)
    coeff_sets = []
    for s in range(S):
        g_value = g.evaluate(set_mu[s] if g.needs_mu else None)
        coeffs = select_coefficients(M, g_value, "taylor" if kind == "auto" and not g.needs_mu else kind)
        coeff_sets.append(coeffs)
        estimates[s] = coeffs.values @ fold_means[s]

    estimate = float(estimates.mean())
    variance = float(estimates.var(ddof=1) / S) if seed is not None and S > 1 else 0.0
    mu = float(set_mu.mean()) if g.needs_mu else None
    folds = FoldedEstimates(M, fold_means.mean(axis=0), np.zeros(M + 1), counts.sum(axis=0),
                            EXACT if seed is None else SAMPLED, seed)
    return MitigatedResult(estimate, variance, coeff_sets[0], mu, coeff_sets[0].g, folds,
                           extra={"set_estimates": estimates, "set_mu": set_mu, "n_sets": S})
