"""Pauli strings, Majorana monomials and the Jordan-Wigner map between them.

Phases are elements of Z4 (power of ``i``) and never floating point.
Qubit and Majorana indices are 1-based; qubit 1 is the leftmost letter of a
Pauli word and the most significant tensor factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

_PHASE_VALUES = (1, 1j, -1, -1j)
_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_FROM_LETTER = {v: k for k, v in _LETTERS.items()}


def phase_to_complex(phase: int) -> complex:
    return _PHASE_VALUES[phase % 4]


def complex_to_phase(value: complex, tol: float = 1e-9) -> int:
    for k, v in enumerate(_PHASE_VALUES):
        if abs(value - v) <= tol:
            return k
    raise ValueError(f"{value!r} is not a fourth root of unity")


def _g(x1: int, z1: int, x2: int, z2: int) -> int:
    # exponent of i picked up when multiplying single-qubit Paulis (x1,z1)(x2,z2),
    # with Y represented as (1, 1)
    if x1 == 0 and z1 == 0:
        return 0
    if x1 == 1 and z1 == 1:
        return z2 - x2
    if x1 == 1:
        return z2 * (2 * x2 - 1)
    return x2 * (1 - 2 * z2)


@dataclass(frozen=True)
class PauliString:
    """``i**phase`` times a tensor product of I, X, Y, Z.

    Bit ``k-1`` of ``x_mask`` / ``z_mask`` refers to qubit ``k``.
    """

    n_qubits: int
    phase: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError("mask wider than n_qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0, 0)

    @classmethod
    def from_label(cls, label: str, phase: int = 0) -> "PauliString":
        """Parse a word such as ``"XIZ"``; an optional leading sign is accepted."""
        label = label.strip()
        for prefix, p in (("-i", 2 + 1), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if label.startswith(prefix) and len(label) > len(prefix) and label[len(prefix)] in "IXYZ":
                label = label[len(prefix):]
                phase += p
                break
        if not label or any(ch not in "IXYZ" for ch in label):
            raise ValueError(f"bad Pauli label {label!r}")
        x = z = 0
        for k, ch in enumerate(label):
            xb, zb = _FROM_LETTER[ch]
            x |= xb << k
            z |= zb << k
        return cls(len(label), phase, x, z)

    @classmethod
    def single(cls, letter: str, qubit: int, n_qubits: int) -> "PauliString":
        word = ["I"] * n_qubits
        word[qubit - 1] = letter
        return cls.from_label("".join(word))

    def letter(self, qubit: int) -> str:
        b = qubit - 1
        return _LETTERS[((self.x_mask >> b) & 1, (self.z_mask >> b) & 1)]

    @property
    def word(self) -> str:
        return "".join(self.letter(k) for k in range(1, self.n_qubits + 1))

    @property
    def coefficient(self) -> complex:
        return phase_to_complex(self.phase)

    @property
    def is_hermitian(self) -> bool:
        # every letter is Hermitian, so only the phase matters
        return self.phase % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_multiply(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n_qubits, self.phase + 2, self.x_mask, self.z_mask)

    def scaled(self, phase: int) -> "PauliString":
        return PauliString(self.n_qubits, self.phase + phase, self.x_mask, self.z_mask)

    def dagger(self) -> "PauliString":
        return PauliString(self.n_qubits, -self.phase, self.x_mask, self.z_mask)

    def commutes_with(self, other: "PauliString") -> bool:
        sym = bin(self.x_mask & other.z_mask).count("1") + bin(self.z_mask & other.x_mask).count("1")
        return sym % 2 == 0

    def same_word(self, other: "PauliString") -> bool:
        return (self.n_qubits, self.x_mask, self.z_mask) == (other.n_qubits, other.x_mask, other.z_mask)

    def __str__(self) -> str:
        return ("+", "+i", "-", "-i")[self.phase] + self.word


def pauli_multiply(a: PauliString, b: PauliString) -> PauliString:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"size mismatch: {a.n_qubits} vs {b.n_qubits}")
    phase = a.phase + b.phase
    for k in range(a.n_qubits):
        phase += _g((a.x_mask >> k) & 1, (a.z_mask >> k) & 1, (b.x_mask >> k) & 1, (b.z_mask >> k) & 1)
    return PauliString(a.n_qubits, phase, a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask)


@dataclass(frozen=True)
class MajoranaMonomial:
    """``coefficient * c_{i1} c_{i2} ...`` with strictly increasing indices.

    ``coefficient`` is stored as a Z4 phase, like :class:`PauliString`.
    Construct through :meth:`from_indices` to normalize arbitrary index lists.
    """

    n_modes: int
    indices: tuple[int, ...]
    phase: int = 0

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be positive")
        idx = tuple(self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing; use from_indices")
        if idx and (idx[0] < 1 or idx[-1] > 2 * self.n_modes):
            raise ValueError(f"Majorana index out of range [1, {2 * self.n_modes}]")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_indices(cls, n_modes: int, indices: Iterable[int], phase: int = 0) -> "MajoranaMonomial":
        """Normalize a product of Majoranas: sort with anticommutation signs, cancel squares."""
        idx = list(indices)
        for i in idx:
            if not 1 <= i <= 2 * n_modes:
                raise ValueError(f"Majorana index {i} out of range [1, {2 * n_modes}]")
        # bubble sort, one sign flip per swap of distinct neighbours
        swaps = 0
        for end in range(len(idx) - 1, 0, -1):
            for k in range(end):
                if idx[k] > idx[k + 1]:
                    idx[k], idx[k + 1] = idx[k + 1], idx[k]
                    swaps += 1
        out: list[int] = []
        for i in idx:
            if out and out[-1] == i:
                out.pop()
            else:
                out.append(i)
        return cls(n_modes, tuple(out), phase + 2 * (swaps % 2))

    @property
    def coefficient(self) -> complex:
        return phase_to_complex(self.phase)

    @property
    def degree(self) -> int:
        return len(self.indices)

    def __mul__(self, other: "MajoranaMonomial") -> "MajoranaMonomial":
        if self.n_modes != other.n_modes:
            raise ValueError("mode count mismatch")
        return MajoranaMonomial.from_indices(
            self.n_modes, self.indices + other.indices, self.phase + other.phase
        )


def jw_majorana(k: int, n: int) -> PauliString:
    """Jordan-Wigner image of ``c_k``: X (odd k) or Y (even k) on qubit ceil(k/2), Z on all lower qubits."""
    if not 1 <= k <= 2 * n:
        raise ValueError(f"Majorana index {k} out of range [1, {2 * n}]")
    q = (k + 1) // 2
    below = (1 << (q - 1)) - 1
    x = 1 << (q - 1)
    z = below | (x if k % 2 == 0 else 0)
    return PauliString(n, 0, x, z)


def jw_monomial(m: MajoranaMonomial) -> PauliString:
    out = PauliString.identity(m.n_modes).scaled(m.phase)
    for k in m.indices:
        out = pauli_multiply(out, jw_majorana(k, m.n_modes))
    return out


def jw_inverse(p: PauliString) -> MajoranaMonomial:
    """The unique monomial whose Jordan-Wigner image is ``p`` (phase included)."""
    n = p.n_qubits
    chosen: list[int] = []
    parity = 0  # number of chosen Majoranas living on higher qubits
    for q in range(n, 0, -1):
        x = (p.x_mask >> (q - 1)) & 1
        z = ((p.z_mask >> (q - 1)) & 1) ^ parity
        if x and not z:
            picked = [2 * q - 1]
        elif x and z:
            picked = [2 * q]
        elif z:
            picked = [2 * q - 1, 2 * q]
        else:
            picked = []
        chosen.extend(picked)
        parity ^= len(picked) & 1
    bare = MajoranaMonomial(n, tuple(sorted(chosen)))
    image = jw_monomial(bare)
    assert image.same_word(p)
    return MajoranaMonomial(n, bare.indices, p.phase - image.phase)


def pauli_words(n_qubits: int) -> list[PauliString]:
    """All ``4**n`` phase-free words, ordered I<X<Y<Z with qubit 1 most significant."""
    letters = "IXYZ"
    out = []
    for code in range(4**n_qubits):
        word = []
        for _ in range(n_qubits):
            word.append(letters[code % 4])
            code //= 4
        out.append(PauliString.from_label("".join(reversed(word))))
    return out


def word_index(p: PauliString) -> int:
    idx = 0
    for k in range(1, p.n_qubits + 1):
        idx = 4 * idx + "IXYZ".index(p.letter(k))
    return idx


def majorana_pair_pauli(i: int, j: int, n: int) -> PauliString:
    """``-i c_i c_j`` as a Pauli string (Hermitian for i != j)."""
    return jw_monomial(MajoranaMonomial.from_indices(n, [i, j], phase=3))

