"""Two-qubit channels as Pauli transfer matrices, and the Gaussian basis set.

PTMs are indexed by the 16 two-qubit words ordered I<X<Y<Z with qubit 1
major (II, IX, IY, IZ, XI, ..., ZZ).  They are built from Kraus operators
written as exact Pauli sums; the dense oracle is never used here, so that
it can serve as an independent check.

Each basis member also carries an :class:`ExecChannel`, the recipe that
realizes it on a covariance matrix in the canonical frame where the gate
acts on Majoranas 1..4 (qubits 1 and 2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .gaussian import (
    GaussianState,
    batch_flip_z,
    batch_measure,
    batch_rotate_pair,
    flip_pauli_z,
    measure_pair,
    rotate_pair,
)
from .pauli import PauliString, jw_inverse, pauli_words, word_index

N_WORDS = 16
DEDUP_TOL = 1e-12
WORDS = pauli_words(2)


# --- Pauli-sum algebra on two qubits --------------------------------------

PauliSum = dict  # (x_mask, z_mask) -> complex


def _as_sum(terms: Iterable[tuple[complex, PauliString]]) -> PauliSum:
    out: PauliSum = {}
    for coef, p in terms:
        key = (p.x_mask, p.z_mask)
        out[key] = out.get(key, 0) + coef * p.coefficient
    return out


def _sum_product(a: PauliSum, b: PauliSum, n: int = 2) -> PauliSum:
    out: PauliSum = {}
    for (xa, za), ca in a.items():
        pa = PauliString(n, 0, xa, za)
        for (xb, zb), cb in b.items():
            prod = pa * PauliString(n, 0, xb, zb)
            key = (prod.x_mask, prod.z_mask)
            out[key] = out.get(key, 0) + ca * cb * prod.coefficient
    return out


def _sum_dagger(a: PauliSum) -> PauliSum:
    return {k: np.conj(v) for k, v in a.items()}


def kraus_ptm(kraus: Sequence[PauliSum]) -> np.ndarray:
    """PTM of ``rho -> sum_K K rho K^dag`` with Kraus operators given as Pauli sums."""
    ptm = np.zeros((N_WORDS, N_WORDS))
    for col, Q in enumerate(WORDS):
        image: PauliSum = {}
        q_sum = {(Q.x_mask, Q.z_mask): 1.0}
        for K in kraus:
            term = _sum_product(_sum_product(K, q_sum), _sum_dagger(K))
            for k, v in term.items():
                image[k] = image.get(k, 0) + v
        for (x, z), v in image.items():
            if abs(v.imag) > 1e-12:
                raise ValueError("Kraus map is not Hermiticity preserving")
            ptm[word_index(PauliString(2, 0, x, z)), col] = v.real
    return ptm


def _rotation_sum(angle: float, p: PauliString) -> PauliSum:
    """``exp(i*angle*P)`` for Hermitian ``P``."""
    return _as_sum([(math.cos(angle), PauliString.identity(2)), (1j * math.sin(angle), p)])


def _projector_sum(qubit: int, outcome: int) -> PauliSum:
    return _as_sum([(0.5, PauliString.identity(2)), (0.5 * outcome, PauliString.single("Z", qubit, 2))])


# --- channel types --------------------------------------------------------


@dataclass(frozen=True)
class ChannelPTM:
    ptm: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        ptm = np.asarray(self.ptm, dtype=float)
        if ptm.shape != (N_WORDS, N_WORDS):
            raise ValueError("a two-qubit PTM is 16x16")
        object.__setattr__(self, "ptm", ptm)

    @property
    def is_trace_preserving(self) -> bool:
        e0 = np.zeros(N_WORDS)
        e0[0] = 1
        return bool(np.max(np.abs(self.ptm[0] - e0)) <= 1e-12)

    def entry(self, out_word: str, in_word: str) -> float:
        return float(self.ptm[word_index(PauliString.from_label(out_word)),
                              word_index(PauliString.from_label(in_word))])

    def to_dict(self) -> dict:
        return {"label": self.label, "words": [w.word for w in WORDS], "ptm": self.ptm.tolist()}


def identity_ptm() -> ChannelPTM:
    return ChannelPTM(np.eye(N_WORDS), "[I]⊗[I]")


def compose(a: ChannelPTM, b: ChannelPTM) -> ChannelPTM:
    """``a ∘ b``: apply ``b`` first."""
    return ChannelPTM(a.ptm @ b.ptm, f"{a.label}∘{b.label}")


def ptm_rot_zz(theta: float) -> ChannelPTM:
    """PTM of conjugation by ``exp(i*theta*Z⊗Z)``."""
    zz = PauliString.from_label("ZZ")
    return ChannelPTM(kraus_ptm([_rotation_sum(theta, zz)]), f"[exp(i{theta:.6g}ZZ)]")


def ptm_dephasing(p: float) -> ChannelPTM:
    """``(1-p)[II] + p/3 ([IZ] + [ZI] + [ZZ])``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"dephasing probability {p} outside [0, 1]")
    kraus = [_as_sum([(math.sqrt(1 - p), PauliString.identity(2))])]
    kraus += [_as_sum([(math.sqrt(p / 3), PauliString.from_label(w))]) for w in ("IZ", "ZI", "ZZ")]
    return ChannelPTM(kraus_ptm(kraus), f"Ndep({p:.6g})")


def ptm_noisy_rot(theta: float, p: float) -> ChannelPTM:
    return compose(ptm_dephasing(p), ptm_rot_zz(theta))


# --- executable recipes ---------------------------------------------------


@dataclass(frozen=True)
class GivensRotation:
    """``exp(angle/2 * c_i c_j)`` on frame Majoranas ``i``, ``j``."""

    i: int
    j: int
    angle: float


@dataclass(frozen=True)
class PauliZFlip:
    qubit: int


@dataclass(frozen=True)
class MeasureThenConditionalRotation:
    """Measure ``Z`` on ``measured``; on outcome ``s`` apply ``GivensRotation(i, j, s*angle)``."""

    measured: int
    i: int
    j: int
    angle: float


Step = Union[GivensRotation, PauliZFlip, MeasureThenConditionalRotation]


@dataclass(frozen=True)
class ExecChannel:
    label: str
    steps: tuple[Step, ...]

    @property
    def is_stochastic(self) -> bool:
        return any(isinstance(s, MeasureThenConditionalRotation) for s in self.steps)


def exec_on_state(
    channel: ExecChannel,
    state: GaussianState,
    qubit_pair: tuple[int, int] = (1, 2),
    rng: np.random.Generator | None = None,
) -> GaussianState:
    """Run a recipe on the adjacent qubit pair ``(k, k+1)`` of ``state``."""
    k = qubit_pair[0]
    if qubit_pair[1] != k + 1 or not 1 <= k < state.n_modes:
        raise ValueError("exec_on_state needs an adjacent qubit pair (k, k+1)")
    off = 2 * (k - 1)
    for st in channel.steps:
        if isinstance(st, GivensRotation):
            state = rotate_pair(state, st.i + off, st.j + off, st.angle)
        elif isinstance(st, PauliZFlip):
            state = flip_pauli_z(state, st.qubit + k - 1)
        else:
            s, _, state = measure_pair(state, st.measured + k - 1, rng=rng)
            state = rotate_pair(state, st.i + off, st.j + off, s * st.angle)
    return state


def exec_branches(
    channel: ExecChannel, state: GaussianState, qubit_pair: tuple[int, int] = (1, 2)
) -> list[tuple[float, GaussianState]]:
    """Every measurement branch with its probability (exact average, no sampling)."""
    k = qubit_pair[0]
    off = 2 * (k - 1)
    branches = [(1.0, state)]
    for st in channel.steps:
        nxt = []
        for w, s_ in branches:
            if isinstance(st, GivensRotation):
                nxt.append((w, rotate_pair(s_, st.i + off, st.j + off, st.angle)))
            elif isinstance(st, PauliZFlip):
                nxt.append((w, flip_pauli_z(s_, st.qubit + k - 1)))
            else:
                for outcome in (1, -1):
                    m = s_.M[2 * (st.measured + k - 1) - 2, 2 * (st.measured + k - 1) - 1]
                    p = 0.5 * (1 + outcome * m)
                    if p <= 1e-12:
                        continue
                    _, _, post = measure_pair(s_, st.measured + k - 1, forced_outcome=outcome)
                    nxt.append((w * p, rotate_pair(post, st.i + off, st.j + off, outcome * st.angle)))
        branches = nxt
    return branches


def exec_batch(channel: ExecChannel, M: np.ndarray, uniforms: np.ndarray) -> None:
    """In-place recipe on a stack of frame covariances; ``uniforms`` has one column per measurement."""
    col = 0
    for st in channel.steps:
        if isinstance(st, GivensRotation):
            batch_rotate_pair(M, st.i, st.j, st.angle)
        elif isinstance(st, PauliZFlip):
            batch_flip_z(M, st.qubit)
        else:
            s = batch_measure(M, st.measured, uniforms[:, col])
            col += 1
            batch_rotate_pair(M, st.i, st.j, s * st.angle)


def n_measurements(channel: ExecChannel) -> int:
    return sum(isinstance(s, MeasureThenConditionalRotation) for s in channel.steps)


# --- the basis ------------------------------------------------------------


@dataclass(frozen=True)
class BasisMember:
    label: str
    ptm: ChannelPTM
    exec: ExecChannel


@dataclass(frozen=True)
class BasisChannelSet:
    members: tuple[BasisMember, ...]
    manifest: dict

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def labels(self) -> list[str]:
        return [m.label for m in self.members]

    def __getitem__(self, key: int | str) -> BasisMember:
        if isinstance(key, str):
            for m in self.members:
                if m.label == key:
                    return m
            raise KeyError(key)
        return self.members[key]

    def matrix(self) -> np.ndarray:
        """Columns are the row-major vectorized member PTMs (256 x N)."""
        return np.stack([m.ptm.ptm.reshape(-1) for m in self.members], axis=1)

    def to_dict(self) -> dict:
        return {
            "manifest": self.manifest,
            "members": [m.ptm.to_dict() for m in self.members],
        }


def _angle_text(angle: float) -> str:
    frac = Fraction(angle / math.pi).limit_denominator(64)
    if abs(float(frac) * math.pi - angle) < 1e-12 and frac.numerator == 1:
        return f"π/{frac.denominator}"
    return f"{angle:.6g}"


def _local(kind: int, qubit: int, angle: float) -> tuple[list[PauliSum], list[Step]]:
    z = PauliString.single("Z", qubit, 2)
    a, b = 2 * qubit - 1, 2 * qubit
    if kind == 0:
        return [_as_sum([(1.0, PauliString.identity(2))])], []
    if kind == 1:
        return [_as_sum([(1.0, z)])], [PauliZFlip(qubit)]
    sign = 1 if kind == 2 else -1
    # exp(i*sign*angle*Z) = exp(sign*angle * c_a c_b) since Z = -i c_a c_b
    return [_rotation_sum(sign * angle, z)], [GivensRotation(a, b, 2 * sign * angle)]


def _generator_pair(word: str) -> tuple[int, int, int]:
    """``word`` as ``sigma * (-i c_a c_b)``; returns (a, b, sigma)."""
    m = jw_inverse(PauliString.from_label(word))
    if m.degree != 2:
        raise AssertionError(f"{word} is not quadratic in Majoranas")
    # word = i^phase c_a c_b = sigma * (-i) c_a c_b  ->  sigma = i^(phase+1)
    sigma = {0: 1, 2: -1}[(m.phase + 1) % 4]
    return m.indices[0], m.indices[1], sigma


def _members_for_angle(angle: float) -> list[BasisMember]:
    txt = _angle_text(angle)
    names = ["[I]", "[Z]", f"[e^{{+i{txt} Z}}]", f"[e^{{-i{txt} Z}}]"]
    members: list[BasisMember] = []
    for k1 in range(4):
        for k2 in range(4):
            kr1, st1 = _local(k1, 1, angle)
            kr2, st2 = _local(k2, 2, angle)
            kraus = [_sum_product(kr1[0], kr2[0])]
            label = f"{names[k1]}⊗{names[k2]}"
            members.append(BasisMember(label, ChannelPTM(kraus_ptm(kraus), label), ExecChannel(label, tuple(st1 + st2))))

    # K channels: measure one qubit, rotate the other by ±angle depending on the outcome
    for which in (1, 2):
        other = 3 - which
        z_other = PauliString.single("Z", other, 2)
        a, b = 2 * other - 1, 2 * other
        for alpha in (1, -1):
            label = f"K{which},{alpha:+d}" if angle == math.pi / 4 else f"K{which},{alpha:+d}({txt})"
            kraus = [
                _sum_product(_projector_sum(which, s), _rotation_sum(s * alpha * angle, z_other))
                for s in (1, -1)
            ]
            steps = (MeasureThenConditionalRotation(which, a, b, 2 * alpha * angle),)
            members.append(BasisMember(label, ChannelPTM(kraus_ptm(kraus), label), ExecChannel(label, steps)))

    for word in ("XX", "YY", "XY", "YX"):
        g = PauliString.from_label(word)
        a, b, sigma = _generator_pair(word)
        for beta in (1, -1):
            label = f"[e^{{{'+' if beta > 0 else '-'}i{txt} {word}}}]"
            kraus = [_rotation_sum(beta * angle, g)]
            steps = (GivensRotation(a, b, 2 * beta * sigma * angle),)
            members.append(BasisMember(label, ChannelPTM(kraus_ptm(kraus), label), ExecChannel(label, steps)))
    return members


def build_basis(angles: Sequence[float] = (math.pi / 4,)) -> BasisChannelSet:
    """Tensor products of {[e^{±iφZ}], [I], [Z]}, the four K channels and the eight
    generator rotations, for each rotation angle φ; duplicates removed by PTM equality."""
    candidates: list[BasisMember] = []
    for angle in angles:
        candidates.extend(_members_for_angle(angle))
    kept: list[BasisMember] = []
    dropped: list[dict] = []
    for cand in candidates:
        dup = next((k for k in kept if np.max(np.abs(k.ptm.ptm - cand.ptm.ptm)) <= DEDUP_TOL), None)
        if dup is None:
            kept.append(cand)
        else:
            dropped.append({"label": cand.label, "duplicate_of": dup.label})
    manifest = {
        "angles": [float(a) for a in angles],
        "count": len(kept),
        "candidates": len(candidates),
        "dropped_duplicates": dropped,
        "word_order": [w.word for w in WORDS],
    }
    return BasisChannelSet(tuple(kept), manifest)
