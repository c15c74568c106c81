import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fermionic_nonlinearity import oracle
from fermionic_nonlinearity.channels import ptm_rot_zz
from fermionic_nonlinearity.pauli import PauliString, pauli_words


def taylor_expm(A, terms=60):
    out = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


def test_unitary_angle_zero(rng):
    s = oracle.random_pure_state(2, rng)
    U = oracle.pauli_rotation(0.0, PauliString.from_label("XY"))
    assert np.allclose(oracle.apply_unitary(s, U).rho, s.rho)


def test_half_pi_rotation_is_pauli_conjugation(rng):
    s = oracle.random_pure_state(1, rng)
    Z = oracle.pauli_matrix(PauliString.from_label("Z"))
    rotated = oracle.apply_unitary(s, oracle.pauli_rotation(math.pi / 2, PauliString.from_label("Z")))
    assert np.allclose(rotated.rho, Z @ s.rho @ Z)


@given(st.integers(1, 3), st.floats(-3, 3), st.integers(0, 2**32 - 1))
def test_rotation_matches_series(n, angle, seed):
    rng = np.random.default_rng(seed)
    words = pauli_words(n)
    p = words[int(rng.integers(len(words)))]
    U = oracle.pauli_rotation(angle, p)
    assert np.max(np.abs(U - taylor_expm(1j * angle * oracle.pauli_matrix(p)))) <= 1e-12


def test_rotation_needs_hermitian():
    with pytest.raises(ValueError):
        oracle.pauli_rotation(0.1, PauliString.from_label("iZ"))


def test_dephasing_limits(rng):
    s = oracle.random_pure_state(2, rng)
    same = oracle.apply_kraus(s, oracle.pair_dephasing_kraus((1, 2, 3, 4), 0.0, 2))
    assert np.allclose(same.rho, s.rho)
    full = oracle.extract_ptm(oracle.kraus_channel(oracle.pair_dephasing_kraus((1, 2, 3, 4), 0.75, 2)))
    for col, w in enumerate(pauli_words(2)):
        expected = 1.0 if set(w.word) <= {"I", "Z"} else 0.0
        assert np.allclose(full[:, col], expected * np.eye(16)[:, col], atol=1e-14)


def test_kraus_trace_preserving_and_state_valid(rng):
    s = oracle.random_pure_state(3, rng)
    out = oracle.apply_kraus(s, oracle.pair_dephasing_kraus((1, 2, 5, 6), 0.3, 3))
    out.check()
    K = oracle.pair_dephasing_kraus((1, 2, 5, 6), 0.3, 3)
    assert np.allclose(sum(k.conj().T @ k for k in K), np.eye(8))


def test_ptm_examples():
    ident = oracle.extract_ptm(lambda X: X)
    assert np.array_equal(ident, np.eye(16))
    ZI = oracle.pauli_matrix(PauliString.from_label("ZI"))
    signs = oracle.extract_ptm(oracle.unitary_channel(ZI))
    expected = [-1.0 if w.word[0] in "XY" else 1.0 for w in pauli_words(2)]
    assert np.allclose(signs, np.diag(expected))


def test_ptm_rot_zz_matches_dense(rng):
    zz = PauliString.from_label("ZZ")
    for theta in rng.uniform(-math.pi, math.pi, 20):
        dense = oracle.extract_ptm(oracle.unitary_channel(oracle.pauli_rotation(theta, zz)))
        assert np.max(np.abs(dense - ptm_rot_zz(theta).ptm)) <= 1e-12


def test_expectation_examples(rng):
    zero = oracle.DenseState.from_bits([0])
    assert oracle.expectation(zero, PauliString.from_label("Z")) == 1
    assert oracle.expectation(zero, PauliString.from_label("X")) == 0
    s = oracle.random_pure_state(3, rng)
    for w in pauli_words(3)[:20]:
        val = oracle.expectation(s, w)
        assert abs(val - np.trace(s.rho @ oracle.pauli_matrix(w)).real) <= 1e-12
        assert abs(val) <= 1 + 1e-12


def test_state_checks():
    with pytest.raises(ValueError):
        oracle.DenseState(6, np.eye(64))
    with pytest.raises(ValueError):
        oracle.DenseState(2, np.eye(2))
    bad = oracle.DenseState(1, np.array([[1.5, 0], [0, -0.5]], dtype=complex))
    with pytest.raises(AssertionError):
        bad.check()


def test_majoranas_anticommute():
    c = oracle.majorana_matrices(3)
    for a in range(6):
        for b in range(6):
            anti = c[a] @ c[b] + c[b] @ c[a]
            assert np.allclose(anti, 2 * np.eye(8) * (a == b))


def test_four_body_unitary_is_zz_rotation():
    # exp(i a c1c2c3c4) = exp(-i a Z Z) because c1c2c3c4 = -ZZ
    a = 0.41
    U = oracle.four_body_unitary((1, 2, 3, 4), a, 2)
    assert np.allclose(U, oracle.pauli_rotation(-a, PauliString.from_label("ZZ")))


def test_measure_z_projects():
    plus = oracle.DenseState.from_vector(np.array([1, 1]) / math.sqrt(2))
    p, post = oracle.measure_z(plus, 1, -1)
    assert math.isclose(p, 0.5)
    assert np.allclose(post.rho, np.diag([0, 1]))
    p, post = oracle.measure_z(oracle.DenseState.from_bits([0]), 1, -1)
    assert p == 0 and post is None
