"""
Piecewise-constant pulse schedules and their noisy propagators.

A segment evolves under ``-i H_sup + L`` for its duration. Propagators
compose new-on-the-left: a schedule ``[s1, s2]`` gives ``P(s2) @ P(s1)``.
"""
import hashlib
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import expm, sqrtm

from kik import liouville
from kik.errors import (
    BranchCutViolation, DimensionMismatch, ExponentialDidNotConverge,
    InvalidSchedule, NonHermitianInput, QuadratureNotConverged,
)
from kik.settings import resolve, settings

logger = logging.getLogger(__name__)


def _checked_expm(generator: np.ndarray) -> np.ndarray:
    value = expm(generator)
    if not np.all(np.isfinite(value)):
        raise ExponentialDidNotConverge("matrix exponential produced non-finite entries")
    return value


@dataclass(frozen=True, eq=False)
class Segment:
    """Constant Hamiltonian and dissipator acting for ``duration``."""
    duration: float
    hamiltonian: np.ndarray
    dissipator: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        if not self.duration > 0:
            raise InvalidSchedule("segment duration must be positive, got {}".format(self.duration))
        H = np.asarray(self.hamiltonian, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise InvalidSchedule("Hamiltonian must be square, got shape {}".format(H.shape))
        if not liouville.is_hermitian(H):
            raise NonHermitianInput("Hamiltonian of segment {!r} is not Hermitian".format(self.label))
        object.__setattr__(self, "hamiltonian", H)
        if self.dissipator is not None:
            L = np.asarray(self.dissipator, dtype=complex)
            if L.shape != (H.shape[0] ** 2, H.shape[0] ** 2):
                raise DimensionMismatch("dissipator shape {} does not match d={}".format(L.shape, H.shape[0]))
            object.__setattr__(self, "dissipator", L)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def is_noisy(self) -> bool:
        return self.dissipator is not None and bool(np.any(self.dissipator))

    @cached_property
    def generator(self) -> np.ndarray:
        g = -1j * liouville.hamiltonian_superop(self.hamiltonian)
        if self.dissipator is not None:
            g = g + self.dissipator
        return g

    @cached_property
    def propagator(self) -> np.ndarray:
        return _checked_expm(self.generator * self.duration)

    @cached_property
    def unitary(self) -> np.ndarray:
        return _checked_expm(-1j * self.hamiltonian * self.duration)

    @cached_property
    def dissipator_norm(self) -> float:
        if not self.is_noisy:
            return 0.0
        return float(np.linalg.norm(self.dissipator, 2))

    @cached_property
    def inverse(self) -> "Segment":
        # Hamiltonian flips sign, dissipator does not
        label = self.label[:-3] if self.label.endswith("^-1") else self.label + "^-1"
        inv = Segment(self.duration, -self.hamiltonian, self.dissipator, label)
        inv.__dict__["inverse"] = self
        return inv

    def with_dissipator(self, dissipator: Optional[np.ndarray]) -> "Segment":
        return Segment(self.duration, self.hamiltonian, dissipator, self.label)


class PulseSchedule:
    """Ordered, non-empty sequence of segments on one Hilbert space."""
    def __init__(self, segments: Iterable[Segment]):
        segments = tuple(segments)
        if not segments:
            raise InvalidSchedule("schedule must contain at least one segment")
        dims = {s.dim for s in segments}
        if len(dims) != 1:
            raise InvalidSchedule("segments act on different dimensions {}".format(sorted(dims)))
        self._segments = segments

    @property
    def segments(self):
        return self._segments

    @property
    def dim(self) -> int:
        return self._segments[0].dim

    @property
    def total_time(self) -> float:
        return float(sum(s.duration for s in self._segments))

    def __len__(self):
        return len(self._segments)

    def __iter__(self):
        return iter(self._segments)

    def __getitem__(self, i):
        return self._segments[i]

    def __add__(self, other: "PulseSchedule") -> "PulseSchedule":
        if not isinstance(other, PulseSchedule):
            return NotImplemented
        return PulseSchedule(self._segments + other.segments)

    def __mul__(self, times: int) -> "PulseSchedule":
        if not isinstance(times, int) or times < 1:
            raise InvalidSchedule("schedule can only be repeated a positive number of times")
        return PulseSchedule(self._segments * times)

    def __repr__(self):
        return "PulseSchedule(n_segments={}, dim={}, T={:g})".format(len(self), self.dim, self.total_time)

    @cached_property
    def inverse(self) -> "PulseSchedule":
        inv = PulseSchedule(s.inverse for s in reversed(self._segments))
        inv.__dict__["inverse"] = self
        return inv

    def noiseless(self) -> "PulseSchedule":
        return PulseSchedule(s.with_dissipator(None) for s in self._segments)

    def with_dissipator(self, dissipator: Optional[np.ndarray]) -> "PulseSchedule":
        """Same pulses with one dissipator on every segment."""
        return PulseSchedule(s.with_dissipator(dissipator) for s in self._segments)

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha1()
        for s in self._segments:
            h.update(np.float64(s.duration).tobytes())
            h.update(s.hamiltonian.tobytes())
            if s.dissipator is not None:
                h.update(s.dissipator.tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class Propagator:
    value: np.ndarray
    schedule_hash: str
    method: str = "pade13-scaling-squaring"
    n_segments: int = 0


def pulse_inverse(sched: PulseSchedule) -> PulseSchedule:
    """Reverse the segments, negate each Hamiltonian, keep each dissipator."""
    return sched.inverse


def propagate(sched: PulseSchedule) -> Propagator:
    value = None
    for segment in sched:
        value = segment.propagator if value is None else segment.propagator @ value
    return Propagator(value=np.array(value), schedule_hash=sched.fingerprint, n_segments=len(sched))


def noiseless_unitary(sched: PulseSchedule) -> np.ndarray:
    U = np.eye(sched.dim, dtype=complex)
    for segment in sched:
        U = segment.unitary @ U
    return U


def noiseless_superop(sched: PulseSchedule) -> np.ndarray:
    return liouville.unitary_superop(noiseless_unitary(sched))


def _segment_magnus(segment: Segment, tol: float, nodes: int, max_nodes: int) -> np.ndarray:
    """int_0^dt exp(i H_sup s) L exp(-i H_sup s) ds by Gauss-Legendre in the H_sup eigenbasis."""
    energies, W = np.linalg.eigh(segment.hamiltonian)
    V = np.kron(W, W.conj())
    freqs = (energies[:, None] - energies[None, :]).reshape(-1)
    gaps = freqs[:, None] - freqs[None, :]
    rotated = V.conj().T @ segment.dissipator @ V
    dt = segment.duration

    def integrate(n):
        x, w = leggauss(n)
        s = 0.5 * dt * (x + 1.0)
        weights = 0.5 * dt * w
        phases = np.zeros_like(gaps, dtype=complex)
        for sk, wk in zip(s, weights):
            phases += wk * np.exp(1j * gaps * sk)
        return phases * rotated

    previous = integrate(nodes)
    while True:
        if 2 * nodes > max_nodes:
            raise QuadratureNotConverged(
                "Magnus quadrature did not reach {:.1e} with {} nodes".format(tol, max_nodes))
        nodes *= 2
        current = integrate(nodes)
        delta = np.max(np.abs(current - previous))
        previous = current
        if delta < tol:
            break
    logger.debug("segment %r: Magnus quadrature converged with %d nodes", segment.label, nodes)
    return V @ previous @ V.conj().T


def magnus1(sched: PulseSchedule, tol: Optional[float] = None, nodes: Optional[int] = None) -> np.ndarray:
    """First Magnus term: integral of U(t)^dag L(t) U(t) over the schedule."""
    tol = resolve(tol, "magnus_tol")
    nodes = settings.magnus_nodes if nodes is None else nodes
    d = sched.dim
    omega = np.zeros((d * d, d * d), dtype=complex)
    U = np.eye(d, dtype=complex)
    integrals = {}
    for segment in sched:
        if segment.is_noisy:
            if id(segment) not in integrals:
                integrals[id(segment)] = _segment_magnus(segment, tol, nodes, settings.magnus_max_nodes)
            inner = integrals[id(segment)]
            U_sup = liouville.unitary_superop(U)
            omega += U_sup.conj().T @ inner @ U_sup
        U = segment.unitary @ U
    return omega


def kik_cycle(sched: PulseSchedule) -> np.ndarray:
    """K_I K: the noisy logical identity."""
    return propagate(pulse_inverse(sched)).value @ propagate(sched).value


def conjugated_cycle(sched: PulseSchedule) -> np.ndarray:
    """U (K_I K) U^dag, the first-order stand-in for K K_I."""
    U_sup = noiseless_superop(sched)
    return U_sup @ kik_cycle(sched) @ U_sup.conj().T


def inverse_propagator_first_order(sched: PulseSchedule) -> np.ndarray:
    """exp(Omega_1) U^dag, what the pulse inverse realizes to first Magnus order."""
    return expm(magnus1(sched)) @ noiseless_superop(sched).conj().T


def inverse_sqrt(cycle: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Principal (C)^(-1/2); Hermitian fast path, Schur-based square root otherwise."""
    tol = resolve(tol, "hermitian_tol")
    if liouville.is_hermitian(cycle, 1e3 * tol):
        w, v = np.linalg.eigh(0.5 * (cycle + cycle.conj().T))
        if w[0] <= 0:
            raise BranchCutViolation("KIK cycle has non-positive eigenvalue {:.3e}".format(w[0]))
        return (v / np.sqrt(w)) @ v.conj().T
    eigenvalues = np.linalg.eigvals(cycle)
    if np.min(eigenvalues.real) <= 0:
        raise BranchCutViolation("KIK cycle eigenvalue {} off the principal branch".format(
            eigenvalues[np.argmin(eigenvalues.real)]))
    root = sqrtm(cycle)
    return np.linalg.inv(root)


def exact_kik_reference(sched: PulseSchedule) -> np.ndarray:
    """K (K_I K)^(-1/2): the untruncated KIK reconstruction of the ideal evolution."""
    K = propagate(sched).value
    K_I = propagate(pulse_inverse(sched)).value
    return K @ inverse_sqrt(K_I @ K)


def schedule_from_hamiltonians(hamiltonians: Sequence[np.ndarray], dissipator: Optional[np.ndarray] = None,
                               durations: Optional[Sequence[float]] = None, labels: Optional[Sequence[str]] = None
                               ) -> PulseSchedule:
    durations = durations or [1.0] * len(hamiltonians)
    labels = labels or ["s{}".format(i) for i in range(len(hamiltonians))]
    return PulseSchedule(Segment(dt, H, dissipator, label)
                         for H, dt, label in zip(hamiltonians, durations, labels))
