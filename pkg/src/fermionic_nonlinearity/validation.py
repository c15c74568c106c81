"""Oracle-equivalence checks shared by the ``validate`` command and the test suite.

Each check returns a :class:`CheckResult` with the worst deviation found and
the tolerance it was held to.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import oracle
from .channels import (
    BasisChannelSet,
    ExecChannel,
    GivensRotation,
    PauliZFlip,
    build_basis,
    exec_branches,
    ptm_dephasing,
    ptm_rot_zz,
)
from .circuit import CircuitIR, GaussianRotation
from .gaussian import GaussianState, pauli_expectation, rotate_pair, state_from_occupation
from .pauli import PauliString, pauli_words


@dataclass
class CheckResult:
    name: str
    max_deviation: float
    tolerance: float
    cases: int

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)

    def to_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


def recipe_kraus(channel: ExecChannel, n: int = 2) -> list[np.ndarray]:
    """Dense Kraus operators of a recipe, built only from oracle matrices."""
    ops = [np.eye(2**n, dtype=complex)]
    for st in channel.steps:
        if isinstance(st, GivensRotation):
            U = oracle.pair_rotation_unitary(st.i, st.j, st.angle, n)
            ops = [U @ K for K in ops]
        elif isinstance(st, PauliZFlip):
            Z = oracle.pauli_matrix(PauliString.single("Z", st.qubit, n))
            ops = [Z @ K for K in ops]
        else:
            z = PauliString.single("Z", st.measured, n)
            ops = [
                oracle.pair_rotation_unitary(st.i, st.j, s * st.angle, n) @ oracle.projector(z, s) @ K
                for K in ops
                for s in (1, -1)
            ]
    return ops


def check_basis_ptms(basis: BasisChannelSet | None = None, tol: float = 1e-10) -> CheckResult:
    basis = basis or build_basis()
    worst = 0.0
    for m in basis:
        dense = oracle.extract_ptm(oracle.kraus_channel(recipe_kraus(m.exec)))
        worst = max(worst, float(np.max(np.abs(dense - m.ptm.ptm))))
    return CheckResult("basis PTMs vs dense recipes", worst, tol, len(basis))


def check_target_ptms(n_angles: int = 20, seed: int = 0, tol: float = 1e-10) -> CheckResult:
    rng = np.random.default_rng(seed)
    zz = PauliString.from_label("ZZ")
    worst = 0.0
    for theta in rng.uniform(-math.pi, math.pi, n_angles):
        dense = oracle.extract_ptm(oracle.unitary_channel(oracle.pauli_rotation(theta, zz)))
        worst = max(worst, float(np.max(np.abs(dense - ptm_rot_zz(theta).ptm))))
    for p in rng.uniform(0, 1, 5):
        dense = oracle.extract_ptm(oracle.kraus_channel(oracle.pair_dephasing_kraus((1, 2, 3, 4), p, 2)))
        worst = max(worst, float(np.max(np.abs(dense - ptm_dephasing(p).ptm))))
    return CheckResult("ZZ rotation and dephasing PTMs", worst, tol, n_angles + 5)


def _pauli_vector(state: GaussianState) -> np.ndarray:
    return np.array([pauli_expectation(state, w) for w in pauli_words(state.n_modes)])


def random_gaussian_state(n: int, rng: np.random.Generator, depth: int = 12) -> GaussianState:
    state = state_from_occupation(rng.integers(0, 2, n).tolist())
    for _ in range(depth):
        i, j = rng.choice(2 * n, size=2, replace=False) + 1
        state = rotate_pair(state, int(i), int(j), float(rng.uniform(-math.pi, math.pi)))
    return state


def check_recipe_actions(basis: BasisChannelSet | None = None, n_states: int = 5, seed: int = 0,
                         tol: float = 1e-10) -> CheckResult:
    """Branch-averaged covariance recipes act on Pauli expectations like their PTMs."""
    basis = basis or build_basis()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_states):
        state = random_gaussian_state(2, rng)
        vec = _pauli_vector(state)
        for m in basis:
            avg = sum(w * _pauli_vector(s) for w, s in exec_branches(m.exec, state))
            worst = max(worst, float(np.max(np.abs(avg - m.ptm.ptm @ vec))))
    return CheckResult("recipe actions on Gaussian states", worst, tol, n_states * len(basis))


def random_gaussian_circuit(n: int, depth: int, rng: np.random.Generator) -> CircuitIR:
    gates = []
    for _ in range(depth):
        i, j = rng.choice(2 * n, size=2, replace=False) + 1
        gates.append(GaussianRotation(int(i), int(j), float(rng.uniform(-math.pi, math.pi))))
    return CircuitIR(n, rng.integers(0, 2, n).tolist(), gates)


def gaussian_circuit_deviation(circuit: CircuitIR) -> float:
    """Largest |<P>_covariance - <P>_dense| over every Pauli word."""
    state = state_from_occupation(circuit.initial_occupation)
    for g in circuit.gates:
        state = rotate_pair(state, g.i, g.j, g.angle)
    dense = oracle.run_circuit(circuit)
    worst = 0.0
    for w in pauli_words(circuit.n_modes):
        worst = max(worst, abs(pauli_expectation(state, w) - oracle.expectation(dense, w)))
    return worst


def check_gaussian_circuits(n_circuits: int = 200, seed: int = 0, max_modes: int = 5, max_depth: int = 20,
                            tol: float = 1e-8) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_circuits):
        n = int(rng.integers(1, max_modes + 1))
        depth = int(rng.integers(0, max_depth + 1))
        worst = max(worst, gaussian_circuit_deviation(random_gaussian_circuit(n, depth, rng)))
    return CheckResult("Gaussian circuits vs dense evolution", worst, tol, n_circuits)


def run_all(seed: int = 0, n_circuits: int = 200, basis: BasisChannelSet | None = None) -> list[CheckResult]:
    basis = basis or build_basis()
    return [
        check_basis_ptms(basis),
        check_target_ptms(seed=seed),
        check_recipe_actions(basis, seed=seed),
        check_gaussian_circuits(n_circuits, seed=seed),
    ]
