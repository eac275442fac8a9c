"""
Dissipator generators and drifting noise.

A ``NoiseSpec`` describes a noise family with its strength ``xi`` factored
out, so strength sweeps reuse one spec via ``with_strength``.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from kik import liouville
from kik.dynamics import PulseSchedule
from kik.errors import InvalidSpec, NegativeRate

logger = logging.getLogger(__name__)

KINDS = ("jumps", "pauli", "depolarizing", "custom")


@dataclass(frozen=True, eq=False)
class NoiseSpec:
    kind: str
    dim: int
    jumps: Tuple[Tuple[np.ndarray, float], ...] = ()
    pauli_terms: Tuple[Tuple[str, float], ...] = ()
    p: float = 0.0
    generator: Optional[np.ndarray] = None
    xi: float = 1.0
    non_trace_preserving: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec("unknown noise kind {!r}".format(self.kind))
        if self.xi < 0:
            raise InvalidSpec("noise strength xi must be non-negative, got {}".format(self.xi))
        if self.kind == "jumps":
            for op, rate in self.jumps:
                if rate < 0:
                    raise NegativeRate("jump rate {} is negative".format(rate))
                if np.shape(op) != (self.dim, self.dim):
                    raise InvalidSpec("jump operator shape {} does not match d={}".format(np.shape(op), self.dim))
        elif self.kind == "pauli":
            for label, alpha in self.pauli_terms:
                if alpha < 0:
                    raise InvalidSpec("Pauli rate {} for {} is negative".format(alpha, label))
                if 2 ** len(label) != self.dim:
                    raise InvalidSpec("Pauli string {} does not act on d={}".format(label, self.dim))
        elif self.kind == "depolarizing":
            if not 0 <= self.p < 1:
                raise InvalidSpec("depolarizing probability must be in [0, 1), got {}".format(self.p))
        elif self.kind == "custom":
            G = np.asarray(self.generator)
            if G.shape != (self.dim ** 2, self.dim ** 2):
                raise InvalidSpec("custom generator shape {} does not match d={}".format(G.shape, self.dim))
            if not self.non_trace_preserving:
                leak = np.max(np.abs(np.eye(self.dim).reshape(-1) @ G))
                if leak > 1e-12:
                    raise InvalidSpec("custom generator is not trace preserving (|<I|G| = {:.2e}); "
                                      "flag it non_trace_preserving".format(leak))

    @classmethod
    def jump_operators(cls, jumps: Sequence[Tuple[np.ndarray, float]], xi: float = 1.0) -> "NoiseSpec":
        jumps = tuple((np.asarray(op, dtype=complex), float(rate)) for op, rate in jumps)
        if not jumps:
            raise InvalidSpec("jump-operator noise needs at least one jump")
        return cls(kind="jumps", dim=jumps[0][0].shape[0], jumps=jumps, xi=xi)

    @classmethod
    def pauli_channel(cls, terms: Sequence[Tuple[str, float]], xi: float = 1.0) -> "NoiseSpec":
        terms = tuple((label.upper(), float(alpha)) for label, alpha in terms)
        if not terms:
            raise InvalidSpec("Pauli noise needs at least one term")
        return cls(kind="pauli", dim=2 ** len(terms[0][0]), pauli_terms=terms, xi=xi)

    @classmethod
    def global_depolarizing(cls, dim: int, p: float, xi: float = 1.0) -> "NoiseSpec":
        return cls(kind="depolarizing", dim=dim, p=float(p), xi=xi)

    @classmethod
    def custom(cls, generator: np.ndarray, xi: float = 1.0, non_trace_preserving: bool = False) -> "NoiseSpec":
        generator = np.asarray(generator, dtype=complex)
        dim = int(round(np.sqrt(generator.shape[0])))
        return cls(kind="custom", dim=dim, generator=generator, xi=xi,
                   non_trace_preserving=non_trace_preserving)

    def with_strength(self, xi: float) -> "NoiseSpec":
        return replace(self, xi=xi)

    @property
    def n_terms(self) -> int:
        if self.kind == "jumps":
            return len(self.jumps)
        if self.kind == "pauli":
            return len(self.pauli_terms)
        return 1


def term_generators(spec: NoiseSpec) -> List[np.ndarray]:
    """Unscaled generator of every noise term, rates included."""
    if spec.kind == "jumps":
        return [rate * liouville.dissipator(op) for op, rate in spec.jumps]
    if spec.kind == "pauli":
        n = len(spec.pauli_terms[0][0])
        return [liouville.pauli_channel_superop([term], n) for term in spec.pauli_terms]
    if spec.kind == "depolarizing":
        # exp(G) at unit time is rho -> (1 - p) rho + p I/d
        return [liouville.global_depolarizing_superop(spec.dim, -np.log1p(-spec.p))]
    return [np.array(spec.generator)]


def build_generator(spec: NoiseSpec) -> np.ndarray:
    total = sum(term_generators(spec))
    return spec.xi * total


@dataclass(frozen=True)
class Waveform:
    """offset + amplitude * cos(2 pi n / period + phase); ``kind='sine'`` shifts phase by -pi/2."""
    kind: str = "constant"
    offset: float = 1.0
    amplitude: float = 0.0
    period: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "cosine", "sine"):
            raise InvalidSpec("unknown waveform {!r}".format(self.kind))
        if self.kind != "constant" and not self.period > 0:
            raise InvalidSpec("waveform period must be positive")

    def __call__(self, n) -> float:
        if self.kind == "constant":
            return self.offset
        shift = -0.5 * np.pi if self.kind == "sine" else 0.0
        return self.offset + self.amplitude * np.cos(2.0 * np.pi * n / self.period + self.phase + shift)


@dataclass(frozen=True)
class DriftProfile:
    """One amplitude waveform per noise term, sampled once per executed shot."""
    waveforms: Tuple[Waveform, ...] = field(default_factory=tuple)
    discretization: str = "per_shot"

    def __post_init__(self):
        if self.discretization != "per_shot":
            raise InvalidSpec("only per-shot drift discretization is supported")

    @classmethod
    def constant(cls, n_terms: int, level: float = 1.0) -> "DriftProfile":
        return cls(tuple(Waveform("constant", offset=level) for _ in range(n_terms)))

    @classmethod
    def oscillating(cls, terms: Sequence[Tuple[str, float, float]], drift_time: float,
                    phase: float = 0.0) -> "DriftProfile":
        """
        ``terms`` are (kind, offset, amplitude) triples sharing one drift time
        ``T_d``: each amplitude is ``offset + amplitude * cos(2 n / T_d)`` (or sin).
        """
        if not drift_time > 0:
            raise InvalidSpec("drift time must be positive, got {}".format(drift_time))
        return cls(tuple(Waveform(kind, offset=offset, amplitude=amplitude, period=np.pi * drift_time, phase=phase)
                         for kind, offset, amplitude in terms))

    @property
    def is_constant(self) -> bool:
        return all(w.kind == "constant" or w.amplitude == 0 for w in self.waveforms)

    def amplitudes(self, n: int) -> np.ndarray:
        values = np.array([w(n) for w in self.waveforms], dtype=float)
        if np.any(values < -1e-12):
            raise InvalidSpec("drift amplitudes became negative at shot {}: {}".format(n, values))
        return np.clip(values, 0.0, None)


def drift_sampled_generator(spec: NoiseSpec, profile: DriftProfile, shot_index: int,
                            terms: Optional[List[np.ndarray]] = None) -> np.ndarray:
    """sum_k xi f_k(n) L_k for the shot executed at index n."""
    if shot_index < 0:
        raise InvalidSpec("shot index must be non-negative")
    terms = term_generators(spec) if terms is None else terms
    if len(profile.waveforms) != len(terms):
        raise InvalidSpec("drift profile has {} waveforms for {} noise terms".format(
            len(profile.waveforms), len(terms)))
    f = profile.amplitudes(shot_index)
    return spec.xi * sum(fk * Lk for fk, Lk in zip(f, terms))


def accumulated_noise(sched: PulseSchedule) -> float:
    """Sum over segments of duration times the spectral norm of the dissipator."""
    return float(sum(s.duration * s.dissipator_norm for s in sched))


# stock models

def local_jumps(ops: Sequence[Tuple[np.ndarray, float]], qubits: Sequence[int], n_qubits: int,
                xi: float = 1.0) -> NoiseSpec:
    """Each single-qubit jump placed independently on each listed qubit."""
    jumps = [(liouville.embed(op, q, n_qubits), rate) for q in qubits for op, rate in ops]
    return NoiseSpec.jump_operators(jumps, xi)


def spontaneous_emission(n_qubits: int, rate: float = 1.0, xi: float = 1.0) -> NoiseSpec:
    return local_jumps([(liouville.lowering(), rate)], range(n_qubits), n_qubits, xi)


def local_pauli_noise(n_qubits: int, alphas: Sequence[float], qubits: Optional[Sequence[int]] = None,
                      xi: float = 1.0) -> NoiseSpec:
    """Single-qubit X, Y, Z terms with rates ``alphas`` on each listed qubit."""
    qubits = range(n_qubits) if qubits is None else qubits
    terms = []
    for q in qubits:
        for pauli, alpha in zip("XYZ", alphas):
            label = ["I"] * n_qubits
            label[q] = pauli
            terms.append(("".join(label), alpha))
    return NoiseSpec.pauli_channel(terms, xi)


def fluctuating_two_qubit_noise(xi: float = 0.05) -> NoiseSpec:
    """Decay and dephasing on both qubits of a pair; the noise the drift profile below modulates."""
    lower, proj0 = liouville.lowering(), np.diag([1.0, 0.0]).astype(complex)
    jumps = [(liouville.embed(lower, 0, 2), 1.0), (liouville.embed(proj0, 0, 2), 1.0),
             (liouville.embed(lower, 1, 2), 1.0), (liouville.embed(proj0, 1, 2), 1.0)]
    return NoiseSpec.jump_operators(jumps, xi)


def fluctuating_profile(drift_time: float) -> DriftProfile:
    """3(1+cos), 1+sin, 2(1+cos), 3(1+sin) of 2n/T_d, matched to ``fluctuating_two_qubit_noise``."""
    return DriftProfile.oscillating(
        [("cosine", 3.0, 3.0), ("sine", 1.0, 1.0), ("cosine", 2.0, 2.0), ("sine", 3.0, 3.0)], drift_time)
