"""
Randomized compiling over Pauli dressings.

A block with logical unitary U is executed as ``post . U . pre`` where pre is
a Pauli and post = U pre U^dag is again (up to sign) a Pauli. ``K`` and
``K_I`` are dressed independently; dressing gates are ideal and never merged
into the block.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from kik import liouville
from kik.dynamics import PulseSchedule, noiseless_unitary, propagate, pulse_inverse
from kik.engine.folding import FoldedPropagators
from kik.errors import InvalidSpec, UnsupportedLogicalUnitary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RCRealization:
    k_pre: str
    k_post: str
    ki_pre: str
    ki_post: str


def conjugate_pauli(U: np.ndarray, label: str, tol: float = 1e-9) -> Tuple[str, int]:
    """Pauli Q and sign s with U P U^dag = s Q."""
    n = liouville.n_qubits_of(U.shape[0])
    image = U @ liouville.pauli_matrix(label) @ U.conj().T
    dim = 2 ** n
    for candidate in liouville.pauli_labels(n):
        overlap = np.trace(liouville.pauli_matrix(candidate) @ image) / dim
        if abs(abs(overlap) - 1.0) < tol:
            if abs(overlap.imag) > tol:
                break
            return candidate, int(np.sign(overlap.real))
    raise UnsupportedLogicalUnitary("logical gate does not map Pauli {} to a Pauli".format(label))


def pauli_superop(label: str) -> np.ndarray:
    return liouville.unitary_superop(liouville.pauli_matrix(label))


def rc_realizations(sched: PulseSchedule, count: Optional[int] = None, seed: Optional[int] = None,
                    policy: str = "random", logical: Optional[np.ndarray] = None) -> List[RCRealization]:
    """
    Pauli dressings for ``K`` and ``K_I``.

    ``policy='enumerate'`` walks the K pre-layers in lexicographic order
    (``count`` defaults to the full group) and pairs them with a seeded
    permutation for ``K_I``; ``policy='random'`` draws both uniformly.
    ``logical`` is the intended gate when the pulses only approximate it.
    """
    U = noiseless_unitary(sched) if logical is None else np.asarray(logical)
    n = liouville.n_qubits_of(sched.dim)
    labels = liouville.pauli_labels(n)
    rng = np.random.default_rng(seed)
    if policy == "enumerate":
        count = len(labels) if count is None else count
        permutation = rng.permutation(len(labels))
        k_pre = [labels[i % len(labels)] for i in range(count)]
        ki_pre = [labels[permutation[i % len(labels)]] for i in range(count)]
    elif policy == "random":
        if not count:
            raise InvalidSpec("random RC needs a positive realization count")
        k_pre = [labels[i] for i in rng.integers(len(labels), size=count)]
        ki_pre = [labels[i] for i in rng.integers(len(labels), size=count)]
    else:
        raise InvalidSpec("unknown RC policy {!r}".format(policy))

    U_dag = U.conj().T
    realizations = []
    for kp, kip in zip(k_pre, ki_pre):
        realizations.append(RCRealization(kp, conjugate_pauli(U, kp)[0], kip, conjugate_pauli(U_dag, kip)[0]))
    _verify(U, realizations)
    return realizations


def _verify(U, realizations, tol=1e-9):
    U_sup = liouville.unitary_superop(U)
    U_dag = U_sup.conj().T
    for r in realizations:
        k = pauli_superop(r.k_post) @ U_sup @ pauli_superop(r.k_pre)
        ki = pauli_superop(r.ki_post) @ U_dag @ pauli_superop(r.ki_pre)
        if not (np.allclose(k, U_sup, atol=tol) and np.allclose(ki, U_dag, atol=tol)):
            raise UnsupportedLogicalUnitary("RC realization {} changes the logical gate".format(r))


def dress(superop: np.ndarray, pre: str, post: str) -> np.ndarray:
    return pauli_superop(post) @ superop @ pauli_superop(pre)


def dressed_propagators(sched: PulseSchedule, realization: RCRealization, ordering: str = "kik",
                        K: Optional[np.ndarray] = None, K_I: Optional[np.ndarray] = None) -> FoldedPropagators:
    K = propagate(sched).value if K is None else K
    K_I = propagate(pulse_inverse(sched)).value if K_I is None else K_I
    return FoldedPropagators.from_superops(dress(K, realization.k_pre, realization.k_post),
                                           dress(K_I, realization.ki_pre, realization.ki_post), ordering)


def rc_propagators(sched: PulseSchedule, realizations: Sequence[RCRealization],
                   ordering: str = "kik") -> List[FoldedPropagators]:
    """One ``FoldedPropagators`` per realization, sharing a single propagation of K and K_I."""
    K = propagate(sched).value
    K_I = propagate(pulse_inverse(sched)).value
    return [dressed_propagators(sched, r, ordering, K, K_I) for r in realizations]


def twirl_average(block, pairs: Sequence[Tuple[str, str]], U: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Uniform average of ``post . block . pre`` over (pre, post) Pauli pairs.

    ``block`` is a schedule or a superoperator; with ``pairs=None`` the full
    Pauli group is used and ``U`` (or the schedule's logical gate) sets the
    post-layers.
    """
    if isinstance(block, PulseSchedule):
        U = noiseless_unitary(block) if U is None else U
        block = propagate(block).value
    block = np.asarray(block)
    if pairs is None:
        if U is None:
            raise InvalidSpec("full twirl of a bare superoperator needs its logical unitary")
        n = liouville.n_qubits_of(U.shape[0])
        pairs = [(p, conjugate_pauli(U, p)[0]) for p in liouville.pauli_labels(n)]
    if not pairs:
        raise InvalidSpec("twirl needs at least one Pauli pair")
    return sum(dress(block, pre, post) for pre, post in pairs) / len(pairs)


def twirled_propagators(blocks: Sequence[PulseSchedule], ordering: str = "kik",
                        logical: Optional[Sequence[np.ndarray]] = None) -> FoldedPropagators:
    """
    K and K_I of a block sequence with every block Pauli-twirled exactly.

    K_I runs the blocks' pulse inverses in reverse order, each twirled on its own.
    ``logical`` gives each block's intended gate; by default its noiseless unitary.
    """
    if not blocks:
        raise InvalidSpec("need at least one block")
    dim = blocks[0].dim
    K = np.eye(dim * dim, dtype=complex)
    K_I = np.eye(dim * dim, dtype=complex)
    logical = [noiseless_unitary(b) for b in blocks] if logical is None else list(logical)
    if len(logical) != len(blocks):
        raise InvalidSpec("{} logical gates for {} blocks".format(len(logical), len(blocks)))
    for block, U in zip(blocks, logical):
        K = twirl_average(block, None, U) @ K
    for block, U in zip(reversed(blocks), reversed(logical)):
        K_I = twirl_average(pulse_inverse(block), None, U.conj().T) @ K_I
    logger.debug("twirled %d blocks exactly", len(blocks))
    return FoldedPropagators.from_superops(K, K_I, ordering)
