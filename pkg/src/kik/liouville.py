"""
Liouville-space core.

Density matrices are stacked row-major, ``vec(rho) = rho.reshape(-1)``, so
that ``vec(B C D) = (B kron D^T) vec(C)``. Observables are row vectors
``<A| = conj(A).reshape(-1)`` and ``<A|rho> = Tr(A rho)``. Superoperators
are dense ``d^2 x d^2`` complex arrays.
"""
import functools
import itertools
import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from kik.errors import (
    DimensionMismatch, InvalidPauliString, NegativeRate, NonHermitianInput,
    NotDensityMatrix, NotQubitDimension, SingularPTM,
)
from kik.settings import resolve, settings

logger = logging.getLogger(__name__)

PAULI_CHARS = "IXYZ"

_SINGLE_PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def is_hermitian(op: np.ndarray, tol: Optional[float] = None) -> bool:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        return False
    return bool(np.max(np.abs(op - op.conj().T), initial=0.0) <= resolve(tol, "hermitian_tol"))


def is_unitary(op: np.ndarray, tol: Optional[float] = None) -> bool:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        return False
    eye = np.eye(op.shape[0])
    return bool(np.max(np.abs(op.conj().T @ op - eye)) <= resolve(tol, "hermitian_tol"))


def _square(op, name="operator"):
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionMismatch("{} must be square, got shape {}".format(name, op.shape))
    return op


def n_qubits_of(dim: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 0 or 2 ** n != dim:
        raise NotQubitDimension("dimension {} is not a power of two".format(dim))
    return n


# vectorization

def vectorize(rho: np.ndarray, physical: bool = False, tol: Optional[float] = None) -> np.ndarray:
    rho = _square(rho, "density matrix")
    if physical:
        tol = resolve(tol, "trace_tol")
        if not is_hermitian(rho, tol):
            raise NotDensityMatrix("state is not Hermitian within {}".format(tol))
        if abs(np.trace(rho) - 1.0) > tol:
            raise NotDensityMatrix("state trace {} differs from 1".format(np.trace(rho).real))
    return np.array(rho, dtype=complex).reshape(-1)


def unvectorize(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec)
    dim = int(round(np.sqrt(vec.size)))
    if dim * dim != vec.size:
        raise DimensionMismatch("vector of length {} is not a vectorized matrix".format(vec.size))
    return vec.reshape(dim, dim)


def observable_vector(A: np.ndarray) -> np.ndarray:
    A = _square(A, "observable")
    return np.conj(np.asarray(A, dtype=complex)).reshape(-1)


def as_state_vector(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    return vectorize(rho) if rho.ndim == 2 else rho.astype(complex)


def as_observable_vector(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A)
    return observable_vector(A) if A.ndim == 2 else A.astype(complex)


def identity_superop(dim: int) -> np.ndarray:
    return np.eye(dim * dim, dtype=complex)


# superoperators

def unitary_superop(U: np.ndarray) -> np.ndarray:
    U = _square(U, "unitary")
    return np.kron(U, U.conj())


def hamiltonian_superop(H: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Commutator superoperator H kron I - I kron H^T."""
    H = _square(H, "Hamiltonian")
    if not is_hermitian(H, tol):
        raise NonHermitianInput("Hamiltonian is not Hermitian")
    eye = np.eye(H.shape[0])
    return np.kron(H, eye) - np.kron(eye, H.T)


def dissipator(A: np.ndarray) -> np.ndarray:
    A = _square(A, "jump operator").astype(complex)
    eye = np.eye(A.shape[0])
    ada = A.conj().T @ A
    return np.kron(A, A.conj()) - 0.5 * np.kron(ada, eye) - 0.5 * np.kron(eye, ada.T)


def lindblad_superop(jumps: Iterable[Tuple[np.ndarray, float]], dim: Optional[int] = None) -> np.ndarray:
    jumps = list(jumps)
    if not jumps:
        if dim is None:
            raise DimensionMismatch("empty jump list needs an explicit dimension")
        return np.zeros((dim * dim, dim * dim), dtype=complex)
    dims = {np.asarray(op).shape[0] for op, _ in jumps}
    if len(dims) != 1 or (dim is not None and dims != {dim}):
        raise DimensionMismatch("jump operators have inconsistent dimensions {}".format(sorted(dims)))
    d = dims.pop()
    generator = np.zeros((d * d, d * d), dtype=complex)
    for op, rate in jumps:
        if rate < 0:
            raise NegativeRate("jump rate {} is negative".format(rate))
        if rate:
            generator += rate * dissipator(op)
    return generator


def global_depolarizing_superop(dim: int, rate: float) -> np.ndarray:
    """Generator -rate (1 - |I><I|/d); commutes with every unitary superoperator."""
    if rate < 0:
        raise NegativeRate("depolarizing rate {} is negative".format(rate))
    vec_identity = np.eye(dim, dtype=complex).reshape(-1)
    projector = np.outer(vec_identity, vec_identity.conj()) / dim
    return -rate * (np.eye(dim * dim) - projector)


# Pauli algebra

def _check_pauli(label: str) -> str:
    if not isinstance(label, str) or not label or any(c not in PAULI_CHARS for c in label.upper()):
        raise InvalidPauliString("invalid Pauli string {!r}".format(label))
    return label.upper()


@functools.lru_cache(maxsize=512)
def _pauli_cached(label: str) -> np.ndarray:
    op = np.ones((1, 1), dtype=complex)
    for c in label:
        op = np.kron(op, _SINGLE_PAULIS[c])
    op.setflags(write=False)
    return op


def pauli_matrix(label: str) -> np.ndarray:
    return _pauli_cached(_check_pauli(label)).copy()


def pauli_labels(n_qubits: int) -> List[str]:
    return ["".join(p) for p in itertools.product(PAULI_CHARS, repeat=n_qubits)]


def embed(op: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Place a single-qubit operator on ``qubit`` (qubit 0 is the leftmost factor)."""
    if not 0 <= qubit < n_qubits:
        raise DimensionMismatch("qubit {} outside register of {}".format(qubit, n_qubits))
    factors = [np.eye(2)] * n_qubits
    factors[qubit] = np.asarray(op, dtype=complex)
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def lowering() -> np.ndarray:
    """|0><1|: relaxation towards |0>."""
    return np.array([[0, 1], [0, 0]], dtype=complex)


def pauli_channel_superop(terms: Iterable[Tuple[str, float]], n_qubits: Optional[int] = None) -> np.ndarray:
    """Sum of alpha (P kron P^T - 1) over the given Pauli strings."""
    terms = [(_check_pauli(label), float(alpha)) for label, alpha in terms]
    lengths = {len(label) for label, _ in terms}
    if n_qubits is not None:
        lengths.add(n_qubits)
    if not lengths:
        raise InvalidPauliString("empty Pauli channel needs n_qubits")
    if len(lengths) != 1:
        raise InvalidPauliString("Pauli strings have inconsistent lengths {}".format(sorted(lengths)))
    n = lengths.pop()
    dim = 2 ** n
    generator = np.zeros((dim * dim, dim * dim), dtype=complex)
    eye = np.eye(dim * dim)
    for label, alpha in terms:
        if alpha:
            P = _pauli_cached(label)
            generator += alpha * (np.kron(P, P.T) - eye)
    return generator


# expectation values and transfer matrices

def expectation(A: np.ndarray, S: Optional[np.ndarray], rho: np.ndarray, tol: Optional[float] = None) -> float:
    """Re <A| S |rho>; A and rho may be matrices or their vectorizations."""
    a = as_observable_vector(A)
    r = as_state_vector(rho)
    if S is not None:
        S = np.asarray(S)
        if S.shape != (a.size, r.size):
            raise DimensionMismatch("superoperator {} does not match vectors {} and {}".format(S.shape, a.size, r.size))
        r = S @ r
    elif a.size != r.size:
        raise DimensionMismatch("observable and state sizes differ: {} vs {}".format(a.size, r.size))
    value = a @ r
    if abs(value.imag) > resolve(tol, "imag_tol"):
        logger.warning("expectation value has imaginary residual %.3e", value.imag)
    return float(value.real)


@functools.lru_cache(maxsize=8)
def _pauli_rows(n_qubits: int) -> np.ndarray:
    rows = np.array([_pauli_cached(label).reshape(-1) for label in pauli_labels(n_qubits)])
    rows.setflags(write=False)
    return rows


def ptm_of(S: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """(R)_ij = Tr[P_i S(P_j)] / d over Paulis in lexicographic order."""
    S = np.asarray(S)
    dim = int(round(np.sqrt(S.shape[0])))
    n = n_qubits_of(dim)
    rows = _pauli_rows(n)
    R = rows.conj() @ S @ rows.T / dim
    residue = np.max(np.abs(R.imag))
    if residue > resolve(tol, "hermitian_tol"):
        logger.warning("PTM has imaginary residue %.3e, discarding", residue)
    return np.real(R)


def _ptm_dim(R):
    R = np.asarray(R)
    d = int(round(np.sqrt(R.shape[0])))
    if R.ndim != 2 or R.shape[0] != R.shape[1] or d * d != R.shape[0]:
        raise DimensionMismatch("not a Pauli transfer matrix: shape {}".format(R.shape))
    return d


def avg_gate_fidelity_ptm(R_lambda: np.ndarray, R_U: np.ndarray) -> float:
    """(Tr(R_lambda^-1 R_U) + d) / (d (d + 1)), evaluated as written."""
    d = _ptm_dim(R_lambda)
    if np.shape(R_U) != np.shape(R_lambda):
        raise DimensionMismatch("PTM shapes differ")
    cond = np.linalg.cond(R_lambda)
    if not np.isfinite(cond) or cond > settings.ptm_cond_limit:
        raise SingularPTM("PTM condition number {:.3e} too large".format(cond))
    trace = np.trace(np.linalg.solve(R_lambda, R_U))
    return float((trace + d) / (d * (d + 1)))


def avg_gate_fidelity_ptm_adjoint(R_lambda: np.ndarray, R_U: np.ndarray) -> float:
    """Standard average gate fidelity (Tr(R_lambda^T R_U) + d) / (d (d + 1))."""
    d = _ptm_dim(R_lambda)
    if np.shape(R_U) != np.shape(R_lambda):
        raise DimensionMismatch("PTM shapes differ")
    return float((np.trace(np.asarray(R_lambda).T @ R_U) + d) / (d * (d + 1)))


def _psd_eig(op: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of the Hermitian part, with eigenvalues below dim * eps * max|w| set to zero."""
    op = 0.5 * (op + op.conj().T)
    w, v = np.linalg.eigh(op)
    cutoff = op.shape[0] * np.finfo(float).eps * max(np.max(np.abs(w)), np.finfo(float).tiny)
    return np.where(w > cutoff, w, 0.0), v


def _psd_sqrt(op: np.ndarray) -> np.ndarray:
    w, v = _psd_eig(op)
    return (v * np.sqrt(w)) @ v.conj().T


def _rank_one_overlap(rho: np.ndarray, sigma: np.ndarray) -> Optional[float]:
    """lambda <v|sigma|v> when rho = lambda |v><v|, else None."""
    w, v = _psd_eig(rho)
    support = np.flatnonzero(w)
    if support.size != 1:
        return None
    vec = v[:, support[0]]
    return float(w[support[0]] * np.real(np.vdot(vec, sigma @ vec)))


def _check_density(rho, name):
    rho = _square(rho, name)
    if not is_hermitian(rho, 1e-8):
        raise NotDensityMatrix("{} is not Hermitian".format(name))
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise NotDensityMatrix("{} has trace {}".format(name, np.trace(rho).real))
    w_min = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if w_min < -1e-9:
        raise NotDensityMatrix("{} has negative eigenvalue {:.3e}".format(name, w_min))
    return rho


def state_fidelity(rho: np.ndarray, sigma: np.ndarray, validate: bool = True) -> float:
    """
    Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2.

    A rank-one argument reduces to <psi|other|psi>; otherwise the trace is the
    nuclear norm of sqrt(rho) sqrt(sigma). Validated results are clamped to
    [0, 1]. With ``validate=False`` the formula is evaluated on arbitrary
    Hermitian inputs (error-mitigated states need not be positive) and the
    value is returned as is.
    """
    if validate:
        rho = _check_density(rho, "rho")
        sigma = _check_density(sigma, "sigma")
    else:
        rho, sigma = _square(rho, "rho"), _square(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise DimensionMismatch("states have shapes {} and {}".format(rho.shape, sigma.shape))
    F = _rank_one_overlap(rho, sigma)
    if F is None and validate:
        F = _rank_one_overlap(sigma, rho)
    if F is None:
        F = float(np.sum(np.linalg.svd(_psd_sqrt(rho) @ _psd_sqrt(sigma), compute_uv=False)) ** 2)
    return float(np.clip(F, 0.0, 1.0)) if validate else F


def pure_state(amplitudes: Sequence[complex]) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def basis_state(bits: str) -> np.ndarray:
    """Projector onto a computational basis state such as ``"01"``."""
    index = int(bits, 2)
    dim = 2 ** len(bits)
    rho = np.zeros((dim, dim), dtype=complex)
    rho[index, index] = 1.0
    return rho
