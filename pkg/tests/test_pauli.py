import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fermionic_nonlinearity import oracle
from fermionic_nonlinearity.pauli import (
    MajoranaMonomial,
    PauliString,
    jw_inverse,
    jw_majorana,
    jw_monomial,
    majorana_pair_pauli,
    pauli_multiply,
    pauli_words,
    word_index,
)


def mono(n, idx, phase=0):
    return MajoranaMonomial.from_indices(n, idx, phase)


@st.composite
def pauli_strings(draw, n=None):
    n = n or draw(st.integers(1, 5))
    x = draw(st.integers(0, 2**n - 1))
    z = draw(st.integers(0, 2**n - 1))
    return PauliString(n, draw(st.integers(0, 3)), x, z)


@pytest.mark.parametrize("k, n, label", [(1, 2, "XI"), (2, 2, "YI"), (3, 2, "ZX"), (4, 2, "ZY"), (5, 3, "ZZX")])
def test_jw_majorana_table(k, n, label):
    assert jw_majorana(k, n) == PauliString.from_label(label)


@pytest.mark.parametrize("k", [0, 5])
def test_jw_majorana_range(k):
    with pytest.raises(ValueError):
        jw_majorana(k, 2)


def test_monomial_examples():
    assert jw_monomial(mono(2, [1, 2], 3)) == PauliString.from_label("ZI")
    assert jw_monomial(mono(2, [2, 3], 3)) == PauliString.from_label("XX")
    assert jw_monomial(mono(2, [1, 2, 3, 4])) == PauliString.from_label("-ZZ")


def test_multiply_examples():
    X, Y, Z = (PauliString.from_label(s) for s in "XYZ")
    assert X * Y == PauliString.from_label("+iZ")
    assert Z * Z == PauliString.identity(1)
    assert PauliString.from_label("XX") * PauliString.from_label("ZZ") == PauliString.from_label("-YY")


def test_multiply_size_mismatch():
    with pytest.raises(ValueError):
        pauli_multiply(PauliString.from_label("X"), PauliString.from_label("XX"))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_pair_identities(n):
    for k in range(1, n):
        a, b = 2 * k - 1, 2 * k
        assert jw_monomial(mono(n, [b + 1, b + 2], 3)).word == "I" * (k) + "Z" + "I" * (n - k - 1)
        cases = {
            "XX": mono(n, [b, b + 1], 3),
            "XY": mono(n, [b, b + 2], 3),
            "YX": mono(n, [a, b + 1], 1),
            "YY": mono(n, [a, b + 2], 1),
        }
        for pair, m in cases.items():
            expected = "I" * (k - 1) + pair + "I" * (n - k - 1)
            assert jw_monomial(m) == PauliString.from_label(expected)
        assert jw_monomial(mono(n, [a, b], 3)) == PauliString.from_label("I" * (k - 1) + "Z" + "I" * (n - k))


def test_monomial_normalization():
    m = mono(3, [3, 1])
    assert m.indices == (1, 3) and m.coefficient == -1
    assert mono(3, [2, 2]).degree == 0
    assert mono(3, [1, 2, 1]).indices == (2,)
    assert mono(3, [1, 2, 1]).coefficient == -1


@given(pauli_strings(), st.data())
def test_multiply_matches_matrices(a, data):
    b = data.draw(pauli_strings(a.n_qubits))
    dense = oracle.pauli_matrix(a) @ oracle.pauli_matrix(b)
    assert np.allclose(oracle.pauli_matrix(a * b), dense)


@given(pauli_strings(), st.data())
def test_multiply_associative(a, data):
    b = data.draw(pauli_strings(a.n_qubits))
    c = data.draw(pauli_strings(a.n_qubits))
    assert (a * b) * c == a * (b * c)
    assert a * PauliString.identity(a.n_qubits) == a


@given(pauli_strings())
def test_hermitian_squares_to_identity(p):
    sq = p * p
    assert sq.x_mask == 0 and sq.z_mask == 0
    if p.is_hermitian:
        assert sq == PauliString.identity(p.n_qubits)


@given(st.integers(1, 5), st.data())
def test_majorana_involution(n, data):
    k = data.draw(st.integers(1, 2 * n))
    c = jw_majorana(k, n)
    assert c * c == PauliString.identity(n)


@given(st.integers(2, 5), st.data())
def test_pair_anticommutation_rule(n, data):
    idx = st.integers(1, 2 * n)
    i, j, k, l = (data.draw(idx) for _ in range(4))
    if i == j or k == l:
        return
    a = jw_monomial(mono(n, [i, j]))
    b = jw_monomial(mono(n, [k, l]))
    shared = len({i, j} & {k, l})
    assert a.commutes_with(b) == (shared != 1)


@given(st.integers(1, 5), st.data())
def test_majorana_anticommute(n, data):
    i = data.draw(st.integers(1, 2 * n))
    j = data.draw(st.integers(1, 2 * n))
    ci, cj = jw_majorana(i, n), jw_majorana(j, n)
    assert ci.commutes_with(cj) == (i == j)


@given(st.integers(1, 4), st.data())
def test_jw_inverse_roundtrip(n, data):
    word = data.draw(st.sampled_from(pauli_words(n)))
    m = jw_inverse(word)
    assert jw_monomial(m) == word


@given(st.integers(1, 4), st.data())
def test_monomial_product_matches_dense(n, data):
    sub = st.lists(st.integers(1, 2 * n), max_size=5)
    a, b = mono(n, data.draw(sub)), mono(n, data.draw(sub))
    dense = oracle.monomial_matrix(a) @ oracle.monomial_matrix(b)
    assert np.allclose(oracle.monomial_matrix(a * b), dense)


def test_word_order():
    words = [w.word for w in pauli_words(2)]
    assert words[:5] == ["II", "IX", "IY", "IZ", "XI"]
    assert words[-1] == "ZZ"
    assert all(word_index(w) == i for i, w in enumerate(pauli_words(2)))


def test_pair_pauli_helper():
    assert majorana_pair_pauli(1, 2, 2) == PauliString.from_label("ZI")


@pytest.mark.parametrize("bad", ["", "XQ", "+2X"])
def test_bad_labels(bad):
    with pytest.raises(ValueError):
        PauliString.from_label(bad)


def test_label_phases():
    for prefix, phase in [("", 0), ("+", 0), ("i", 1), ("+i", 1), ("-", 2), ("-i", 3)]:
        assert PauliString.from_label(prefix + "XZ").phase == phase


def test_all_words_distinct():
    words = pauli_words(3)
    assert len({(w.x_mask, w.z_mask) for w in words}) == 64
    for a, b in itertools.combinations(words[:10], 2):
        assert not a.same_word(b)
