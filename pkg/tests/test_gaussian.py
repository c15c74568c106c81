import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fermionic_nonlinearity import oracle
from fermionic_nonlinearity.gaussian import (
    GaussianState,
    GaussianStateError,
    OrthogonalRotation,
    apply_rotation,
    batch_expect_monomial,
    batch_flip_z,
    batch_measure,
    batch_pfaffian,
    batch_rotate_pair,
    expect_monomial,
    flip_pauli_z,
    givens_for_pair,
    measure_pair,
    pauli_expectation,
    pfaffian,
    rotate_pair,
    state_from_occupation,
)
from fermionic_nonlinearity.pauli import MajoranaMonomial, PauliString, pauli_words
from fermionic_nonlinearity.validation import random_gaussian_state


def dense_of(state_bits, gates):
    """Dense state from occupation bits and a list of (i, j, angle) rotations."""
    n = len(state_bits)
    d = oracle.DenseState.from_bits(state_bits)
    for i, j, a in gates:
        d = oracle.apply_unitary(d, oracle.pair_rotation_unitary(i, j, a, n))
    return d


@st.composite
def circuits(draw, max_n=4, max_depth=10):
    n = draw(st.integers(1, max_n))
    bits = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    pairs = st.tuples(st.integers(1, 2 * n), st.integers(1, 2 * n), st.floats(-math.pi, math.pi))
    gates = [g for g in draw(st.lists(pairs, max_size=max_depth)) if g[0] != g[1]]
    return bits, gates


def evolve(bits, gates):
    s = state_from_occupation(bits)
    for i, j, a in gates:
        s = rotate_pair(s, i, j, a)
    return s


def test_occupation_blocks():
    assert np.array_equal(state_from_occupation([0]).M, [[0, 1], [-1, 0]])
    assert np.array_equal(state_from_occupation([1]).M, [[0, -1], [1, 0]])
    M = state_from_occupation([0, 0]).M
    assert np.array_equal(M, np.kron(np.eye(2), [[0, 1], [-1, 0]]))
    with pytest.raises(GaussianStateError):
        state_from_occupation([])
    with pytest.raises(GaussianStateError):
        state_from_occupation([2])


def test_z_sign_convention():
    assert pauli_expectation(state_from_occupation([0]), PauliString.from_label("Z")) == 1
    assert pauli_expectation(state_from_occupation([1]), PauliString.from_label("Z")) == -1
    assert pauli_expectation(state_from_occupation([0, 1]), PauliString.from_label("ZZ")) == -1


def test_givens_examples():
    assert np.array_equal(givens_for_pair(1, 3, 0.0, 2).R, np.eye(4))
    R = givens_for_pair(2, 4, math.pi, 2).R
    assert np.allclose(R, np.diag([1, -1, 1, -1]))
    a = 0.37
    assert np.allclose((givens_for_pair(1, 4, a, 2) @ givens_for_pair(1, 4, -a, 2)).R, np.eye(4))
    with pytest.raises(ValueError):
        givens_for_pair(2, 2, 0.1, 2)
    with pytest.raises(ValueError):
        givens_for_pair(1, 5, 0.1, 2)


def test_givens_pi_matches_dense_conjugation():
    # angle pi is conjugation by c_i c_j, which negates c_i and c_j only
    n = 2
    U = oracle.pair_rotation_unitary(1, 3, math.pi, n)
    c = oracle.majorana_matrices(n)
    R = givens_for_pair(1, 3, math.pi, n).R
    for k in range(4):
        heis = U.conj().T @ c[k] @ U
        assert np.allclose(heis, sum(R[k, m] * c[m] for m in range(4)))


def test_orthogonal_rotation_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        OrthogonalRotation(np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_rotation_identity_and_swap():
    s = random_gaussian_state(2, np.random.default_rng(1))
    assert np.allclose(apply_rotation(s, OrthogonalRotation(np.eye(4))).M, s.M)
    # c1 -> c3, c3 -> -c1 swaps the mode-1 and mode-2 blocks up to sign on c1/c3 entries
    R = np.eye(4)
    R[0, 0] = R[2, 2] = 0
    R[0, 2], R[2, 0] = 1, -1
    v = apply_rotation(state_from_occupation([0, 1]), OrthogonalRotation(R))
    assert np.allclose(v.M, R @ state_from_occupation([0, 1]).M @ R.T)


@given(circuits())
def test_rotate_pair_equals_apply_rotation(circ):
    bits, gates = circ
    n = len(bits)
    s1 = s2 = state_from_occupation(bits)
    for i, j, a in gates:
        s1 = rotate_pair(s1, i, j, a)
        s2 = apply_rotation(s2, givens_for_pair(i, j, a, n))
    assert np.allclose(s1.M, s2.M, atol=1e-12)


@given(circuits())
def test_antisymmetry_and_purity(circ):
    s = evolve(*circ)
    assert np.max(np.abs(s.M + s.M.T)) <= 1e-10
    assert s.is_pure()


@given(circuits(max_n=3))
def test_all_pauli_expectations_match_dense(circ):
    bits, gates = circ
    s = evolve(bits, gates)
    d = dense_of(bits, gates)
    for w in pauli_words(len(bits)):
        assert abs(pauli_expectation(s, w) - oracle.expectation(d, w)) <= 1e-8


def test_flip_z_examples():
    s0 = state_from_occupation([0])
    assert np.array_equal(flip_pauli_z(s0, 1).M, s0.M)
    s = rotate_pair(state_from_occupation([0, 0]), 2, 3, 0.6)
    assert np.allclose(flip_pauli_z(flip_pauli_z(s, 2), 2).M, s.M)
    # <X1 Y2> picks up a sign from Z1 conjugation
    xx = PauliString.from_label("XY")
    assert abs(pauli_expectation(s, xx)) > 1e-3
    assert math.isclose(pauli_expectation(flip_pauli_z(s, 1), xx), -pauli_expectation(s, xx), abs_tol=1e-12)
    with pytest.raises(ValueError):
        flip_pauli_z(s, 3)


def test_measure_certain_outcome_uses_no_rng():
    s = state_from_occupation([0, 1])
    out, prob, post = measure_pair(s, 1)
    assert (out, prob) == (1, 1.0)
    assert np.allclose(post.M, s.M)
    out, prob, _ = measure_pair(s, 2)
    assert (out, prob) == (-1, 1.0)
    with pytest.raises(GaussianStateError):
        measure_pair(s, 1, forced_outcome=-1)


def test_measure_half_probability():
    s = rotate_pair(state_from_occupation([0, 0]), 1, 3, math.pi / 2)
    assert abs(s.M[0, 1]) < 1e-15
    for o in (1, -1):
        _, p, _ = measure_pair(s, 1, forced_outcome=o)
        assert math.isclose(p, 0.5)


def test_measure_requires_rng_when_random():
    s = rotate_pair(state_from_occupation([0, 0]), 1, 3, 0.4)
    with pytest.raises(ValueError):
        measure_pair(s, 1)


@pytest.mark.parametrize("seed", range(5))
def test_measure_matches_dense(seed):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, 3).tolist()
    gates = [(int(i), int(j), float(rng.uniform(-3, 3)))
             for i, j in (rng.choice(6, 2, replace=False) + 1 for _ in range(10))]
    s, d = evolve(bits, gates), dense_of(bits, gates)
    total = 0.0
    for o in (1, -1):
        dp, dpost = oracle.measure_z(d, 1, o)
        if dp < 1e-12:
            continue
        _, p, post = measure_pair(s, 1, forced_outcome=o)
        total += p
        assert abs(p - dp) <= 1e-8
        assert post.is_pure()
        for w in pauli_words(3):
            assert abs(pauli_expectation(post, w) - oracle.expectation(dpost, w)) <= 1e-8
    assert math.isclose(total, 1.0, abs_tol=1e-15)


@given(circuits(max_n=4), st.integers(1, 4), st.sampled_from([1, -1]))
def test_measure_keeps_invariants(circ, k, outcome):
    s = evolve(*circ)
    if k > s.n_modes:
        return
    p_plus = 0.5 * (1 + s.M[2 * k - 2, 2 * k - 1])
    p = p_plus if outcome == 1 else 1 - p_plus
    if p < 1e-9:
        return
    _, _, post = measure_pair(s, k, forced_outcome=outcome)
    assert np.max(np.abs(post.M + post.M.T)) <= 1e-10
    assert post.is_pure(1e-8)
    assert post.M[2 * k - 2, 2 * k - 1] == outcome


def brute_pfaffian(A):
    n = A.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    for j in range(1, n):
        rest = [k for k in range(1, n) if k != j]
        total += (-1) ** (j - 1) * A[0, j] * brute_pfaffian(A[np.ix_(rest, rest)])
    return total


def test_pfaffian_examples(rng):
    assert pfaffian(np.array([[0, 3.0], [-3.0, 0]])) == 3.0
    blocks = np.zeros((4, 4))
    blocks[0, 1], blocks[2, 3] = 2.0, -5.0
    blocks -= blocks.T
    assert math.isclose(pfaffian(blocks), -10.0)
    A = rng.normal(size=(6, 6))
    A = A - A.T
    assert math.isclose(pfaffian(A), brute_pfaffian(A), rel_tol=1e-8)
    assert pfaffian(np.zeros((0, 0))) == 1.0


def test_pfaffian_errors():
    with pytest.raises(ValueError):
        pfaffian(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        pfaffian(np.array([[0, 1.0], [1.0, 0]]))


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_pfaffian_squared_is_det(half, seed):
    A = np.random.default_rng(seed).normal(size=(2 * half, 2 * half))
    A = A - A.T
    pf = pfaffian(A)
    assert math.isclose(pf * pf, np.linalg.det(A), rel_tol=1e-8, abs_tol=1e-10)


def test_batch_pfaffian_matches_scalar(rng):
    A = rng.normal(size=(50, 8, 8))
    A = A - A.transpose(0, 2, 1)
    assert np.allclose(batch_pfaffian(A), [pfaffian(a) for a in A])


def test_expect_monomial_examples():
    s0 = state_from_occupation([0, 0])
    assert expect_monomial(s0, MajoranaMonomial.from_indices(2, [1, 2])) == 1j
    assert expect_monomial(s0, MajoranaMonomial.from_indices(2, [1])) == 0
    assert expect_monomial(s0, MajoranaMonomial.from_indices(2, [])) == 1
    s = random_gaussian_state(2, np.random.default_rng(9))
    m = MajoranaMonomial.from_indices(2, [1, 2, 3, 4])
    dense = oracle.expect_operator(
        oracle.DenseState.from_vector(np.linalg.eigh(oracle_rho(s))[1][:, -1]), oracle.monomial_matrix(m))
    assert abs(expect_monomial(s, m) - dense) <= 1e-10


def oracle_rho(state: GaussianState) -> np.ndarray:
    """Dense density matrix rebuilt from all Pauli expectations of a Gaussian state."""
    n = state.n_modes
    rho = sum(pauli_expectation(state, w) * oracle.pauli_matrix(w) for w in pauli_words(n))
    return rho / 2**n


def test_state_json_roundtrip():
    s = random_gaussian_state(3, np.random.default_rng(4))
    t = GaussianState.from_dict(s.to_dict())
    assert np.array_equal(s.M, t.M) and s.gamma == t.gamma


def test_clamp_and_rejection():
    ident = OrthogonalRotation(np.eye(2))
    M = np.array([[0, 1 + 5e-10], [-(1 + 5e-10), 0]])
    assert apply_rotation(GaussianState(M), ident).M[0, 1] == 1.0
    with pytest.raises(GaussianStateError):
        apply_rotation(GaussianState(np.array([[0, 1.1], [-1.1, 0]])), ident)
    with pytest.raises(GaussianStateError):
        GaussianState.from_dict({"M": [[0, 0.5], [0.4, 0]]})
    with pytest.raises(GaussianStateError):
        GaussianState(np.zeros((3, 3)))


def test_batch_kernels_match_scalar(rng):
    states = [random_gaussian_state(3, rng) for _ in range(8)]
    M = np.stack([s.M for s in states])
    batch_rotate_pair(M, 2, 5, 0.3)
    batch_flip_z(M, 2)
    u = rng.random(8)
    outs = batch_measure(M, 1, u)
    m = MajoranaMonomial.from_indices(3, [1, 4, 5, 6])
    vals = batch_expect_monomial(M, m)
    for b, s in enumerate(states):
        s = flip_pauli_z(rotate_pair(s, 2, 5, 0.3), 2)
        p_plus = 0.5 * (1 + s.M[0, 1])
        expected = 1 if u[b] < p_plus else -1
        assert outs[b] == expected
        _, _, s = measure_pair(s, 1, forced_outcome=expected)
        assert np.allclose(M[b], s.M, atol=1e-12)
        assert math.isclose(vals[b], expect_monomial(s, m).real, abs_tol=1e-12)


def test_pure_states_after_mixed_sequence(rng):
    for _ in range(20):
        s = random_gaussian_state(4, rng)
        for k in itertools.islice(itertools.cycle([1, 3, 2]), 5):
            s = flip_pauli_z(s, k)
            if abs(s.M[2 * k - 2, 2 * k - 1]) < 1 - 1e-9:
                _, _, s = measure_pair(s, k, rng=rng)
            s = rotate_pair(s, 1, 8, rng.uniform(-3, 3))
        assert s.is_pure(1e-8)
        assert np.max(np.abs(s.M + s.M.T)) <= 1e-10
