"""Dense density-matrix reference simulator for up to five qubits.

Every sign convention in the covariance engine and the channel library is
checked against this module; it favours clarity over speed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .circuit import CircuitIR, GaussianRotation
from .pauli import MajoranaMonomial, PauliString, jw_majorana, jw_monomial, pauli_words

MAX_QUBITS = 5

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(p: PauliString) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for k in range(1, p.n_qubits + 1):
        out = np.kron(out, _SINGLE[p.letter(k)])
    return p.coefficient * out


@lru_cache(maxsize=None)
def majorana_matrices(n: int) -> tuple[np.ndarray, ...]:
    """Dense ``c_1 .. c_2n`` (index 0 holds ``c_1``)."""
    return tuple(pauli_matrix(jw_majorana(k, n)) for k in range(1, 2 * n + 1))


def monomial_matrix(m: MajoranaMonomial) -> np.ndarray:
    return pauli_matrix(jw_monomial(m))


@dataclass
class DenseState:
    n_qubits: int
    rho: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"dense oracle supports 1..{MAX_QUBITS} qubits")
        dim = 2**self.n_qubits
        if self.rho.shape != (dim, dim):
            raise ValueError("density matrix has wrong shape")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "DenseState":
        idx = 0
        for b in bits:
            idx = 2 * idx + int(b)
        dim = 2 ** len(bits)
        rho = np.zeros((dim, dim), dtype=complex)
        rho[idx, idx] = 1.0
        return cls(len(bits), rho)

    @classmethod
    def from_vector(cls, psi: np.ndarray) -> "DenseState":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(int(round(np.log2(psi.size))), np.outer(psi, psi.conj()))

    def check(self, tol: float = 1e-10) -> None:
        rho = self.rho
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            raise AssertionError("density matrix not Hermitian")
        if abs(np.trace(rho) - 1) > tol:
            raise AssertionError("density matrix trace != 1")
        if np.linalg.eigvalsh(rho).min() < -tol:
            raise AssertionError("density matrix not positive semidefinite")


def pauli_rotation(angle: float, p: PauliString) -> np.ndarray:
    """``exp(i*angle*P)`` for a Hermitian Pauli string, via cos*I + i*sin*P."""
    if not p.is_hermitian:
        raise ValueError("rotation generator must be Hermitian")
    P = pauli_matrix(p)
    return np.cos(angle) * np.eye(P.shape[0]) + 1j * np.sin(angle) * P


def apply_unitary(state: DenseState, U: np.ndarray) -> DenseState:
    return DenseState(state.n_qubits, U @ state.rho @ U.conj().T)


def apply_kraus(state: DenseState, kraus: Iterable[np.ndarray]) -> DenseState:
    rho = sum(K @ state.rho @ K.conj().T for K in kraus)
    return DenseState(state.n_qubits, rho)


def expectation(state: DenseState, p: PauliString | np.ndarray) -> float:
    P = p if isinstance(p, np.ndarray) else pauli_matrix(p)
    val = np.trace(state.rho @ P)
    return float(val.real)


def expect_operator(state: DenseState, op: np.ndarray) -> complex:
    return complex(np.trace(state.rho @ op))


# --- Majorana-level gates used by circuits and channel recipes -------------


def pair_rotation_unitary(i: int, j: int, angle: float, n: int) -> np.ndarray:
    """``exp(angle/2 * c_i c_j)``: rotates the (c_i, c_j) plane by ``angle`` in the Heisenberg picture."""
    c = majorana_matrices(n)
    return np.cos(angle / 2) * np.eye(2**n) + np.sin(angle / 2) * (c[i - 1] @ c[j - 1])


def four_body_unitary(idx: Sequence[int], angle: float, n: int) -> np.ndarray:
    """``exp(i*angle*c_i c_j c_k c_l)`` for distinct indices."""
    c = majorana_matrices(n)
    i, j, k, l = idx
    Q = c[i - 1] @ c[j - 1] @ c[k - 1] @ c[l - 1]
    # Q is Hermitian with Q^2 = I for distinct indices
    return np.cos(angle) * np.eye(2**n) + 1j * np.sin(angle) * Q


def pair_dephasing_kraus(idx: Sequence[int], p: float, n: int) -> list[np.ndarray]:
    """Two-qubit dephasing acting on the parities ``-i c_i c_j`` and ``-i c_k c_l``."""
    c = majorana_matrices(n)
    i, j, k, l = idx
    A = -1j * c[i - 1] @ c[j - 1]
    B = -1j * c[k - 1] @ c[l - 1]
    I = np.eye(2**n)
    return [np.sqrt(1 - p) * I, np.sqrt(p / 3) * A, np.sqrt(p / 3) * B, np.sqrt(p / 3) * (A @ B)]


def projector(p: PauliString, outcome: int) -> np.ndarray:
    P = pauli_matrix(p)
    return (np.eye(P.shape[0]) + outcome * P) / 2


def measure_z(state: DenseState, qubit: int, outcome: int) -> tuple[float, DenseState | None]:
    """Project qubit onto the ``Z = outcome`` eigenspace; returns (probability, normalized state)."""
    Pi = projector(PauliString.single("Z", qubit, state.n_qubits), outcome)
    rho = Pi @ state.rho @ Pi
    prob = float(np.trace(rho).real)
    if prob <= 1e-14:
        return prob, None
    return prob, DenseState(state.n_qubits, rho / prob)


# --- Pauli transfer matrices ----------------------------------------------


def extract_ptm(channel: Callable[[np.ndarray], np.ndarray], n_qubits: int = 2) -> np.ndarray:
    """PTM entry (P, Q) = Tr(P channel(Q)) / 2**n over the fixed word ordering."""
    words = [pauli_matrix(w) for w in pauli_words(n_qubits)]
    dim = 2**n_qubits
    out = np.empty((len(words), len(words)))
    for col, Q in enumerate(words):
        image = channel(Q)
        for row, P in enumerate(words):
            val = np.trace(P @ image) / dim
            if abs(val.imag) > 1e-10:
                raise ValueError("channel does not map Hermitian operators to Hermitian operators")
            out[row, col] = val.real
    return out


def kraus_channel(kraus: Sequence[np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    return lambda X: sum(K @ X @ K.conj().T for K in kraus)


def unitary_channel(U: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    return lambda X: U @ X @ U.conj().T


def random_pure_state(n: int, rng: np.random.Generator) -> DenseState:
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return DenseState.from_vector(psi)


def run_circuit(circuit: CircuitIR) -> DenseState:
    """Exact density-matrix evolution of a circuit."""
    n = circuit.n_modes
    state = DenseState.from_bits(circuit.initial_occupation)
    for g in circuit.gates:
        if isinstance(g, GaussianRotation):
            state = apply_unitary(state, pair_rotation_unitary(g.i, g.j, g.angle, n))
        else:
            state = apply_unitary(state, four_body_unitary(g.indices, g.angle, n))
            if g.noise_p > 0:
                state = apply_kraus(state, pair_dephasing_kraus(g.indices, g.noise_p, n))
    return state


def circuit_expectation(circuit: CircuitIR) -> float:
    op = monomial_matrix(circuit.observable_monomial())
    val = expect_operator(run_circuit(circuit), op)
    if abs(val.imag) > 1e-10:
        raise ValueError("observable expectation is not real")
    return val.real
