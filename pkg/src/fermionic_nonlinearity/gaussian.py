"""Covariance-matrix simulation of fermionic Gaussian states.

Convention (anchored to the dense oracle): ``M[a, b] = Re <-i c_a c_b>`` for
``a != b``, so ``<c_a c_b> = i M[a, b]`` and ``<Z_k> = M[2k-1, 2k]``.  The
computational-basis state ``|0>`` of a mode therefore has the block
``[[0, 1], [-1, 0]]``.  An :class:`OrthogonalRotation` ``R`` stores the
Heisenberg action ``U^dag c_a U = sum_b R[a, b] c_b`` and updates
``M -> R M R^T``.

Index arguments are 1-based like the Majorana labels; arrays are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .pauli import MajoranaMonomial, PauliString, jw_inverse

ANTISYM_TOL = 1e-10
CLAMP_SLACK = 1e-9
PROB_FLOOR = 1e-12


class GaussianStateError(ValueError):
    pass


@dataclass
class GaussianState:
    M: np.ndarray
    gamma: float = 1.0

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=float)
        d = self.M.shape[0]
        if self.M.ndim != 2 or self.M.shape != (d, d) or d % 2:
            raise GaussianStateError("covariance must be a square matrix of even size")

    @property
    def n_modes(self) -> int:
        return self.M.shape[0] // 2

    def copy(self) -> "GaussianState":
        return GaussianState(self.M.copy(), self.gamma)

    def is_pure(self, tol: float = 1e-10) -> bool:
        d = self.M.shape[0]
        return bool(np.max(np.abs(self.M @ self.M.T - np.eye(d))) <= tol)

    def check(self, tol: float = ANTISYM_TOL) -> None:
        if np.max(np.abs(self.M + self.M.T), initial=0.0) > tol:
            raise GaussianStateError("covariance matrix is not antisymmetric")
        if np.linalg.norm(self.M, 2) > 1 + 1e-9:
            raise GaussianStateError("covariance matrix has a singular value above 1")

    def to_dict(self) -> dict:
        return {"n_modes": self.n_modes, "gamma": self.gamma, "M": self.M.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianState":
        state = cls(np.array(data["M"], dtype=float), float(data.get("gamma", 1.0)))
        if "n_modes" in data and data["n_modes"] != state.n_modes:
            raise GaussianStateError("n_modes does not match the covariance size")
        state.check()
        return state


@dataclass(frozen=True)
class OrthogonalRotation:
    R: np.ndarray = field(repr=False)

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise ValueError("rotation must be square")
        if np.max(np.abs(R @ R.T - np.eye(R.shape[0]))) > 1e-12:
            raise ValueError("rotation matrix is not orthogonal")
        object.__setattr__(self, "R", R)

    @property
    def n_modes(self) -> int:
        return self.R.shape[0] // 2

    @property
    def T(self) -> "OrthogonalRotation":
        return OrthogonalRotation(self.R.T)

    def __matmul__(self, other: "OrthogonalRotation") -> "OrthogonalRotation":
        return OrthogonalRotation(self.R @ other.R)


def _clamp(M: np.ndarray) -> np.ndarray:
    excess = np.abs(M) - 1.0
    worst = excess.max(initial=-1.0)
    if worst > CLAMP_SLACK:
        raise GaussianStateError(f"covariance entry exceeds 1 by {worst:.3g}")
    if worst > 0:
        M = np.clip(M, -1.0, 1.0)
    return M


def state_from_occupation(bits: Sequence[int]) -> GaussianState:
    """Computational-basis state; occupied modes get the block ``[[0, -1], [1, 0]]``."""
    if len(bits) == 0:
        raise GaussianStateError("empty occupation list")
    n = len(bits)
    M = np.zeros((2 * n, 2 * n))
    for k, b in enumerate(bits):
        if b not in (0, 1):
            raise GaussianStateError(f"occupation must be 0 or 1, got {b!r}")
        s = 1.0 if b == 0 else -1.0
        M[2 * k, 2 * k + 1] = s
        M[2 * k + 1, 2 * k] = -s
    return GaussianState(M)


def givens_for_pair(i: int, j: int, angle: float, n: int) -> OrthogonalRotation:
    """Rotation generated by ``exp(angle/2 * c_i c_j)``."""
    if i == j:
        raise ValueError("givens_for_pair needs two distinct indices")
    for k in (i, j):
        if not 1 <= k <= 2 * n:
            raise ValueError(f"Majorana index {k} out of range")
    R = np.eye(2 * n)
    c, s = np.cos(angle), np.sin(angle)
    a, b = i - 1, j - 1
    R[a, a] = c
    R[b, b] = c
    R[a, b] = s
    R[b, a] = -s
    return OrthogonalRotation(R)


def apply_rotation(state: GaussianState, rot: OrthogonalRotation) -> GaussianState:
    if rot.R.shape != state.M.shape:
        raise ValueError("rotation and state dimensions differ")
    M = rot.R @ state.M @ rot.R.T
    M = 0.5 * (M - M.T)
    return GaussianState(_clamp(M), state.gamma)


def rotate_pair(state: GaussianState, i: int, j: int, angle: float) -> GaussianState:
    """Same as applying :func:`givens_for_pair` but touching only two rows and columns."""
    if i == j:
        raise ValueError("rotate_pair needs two distinct indices")
    M = state.M.copy()
    a, b = i - 1, j - 1
    c, s = np.cos(angle), np.sin(angle)
    ra, rb = M[a].copy(), M[b].copy()
    M[a], M[b] = c * ra + s * rb, -s * ra + c * rb
    ca, cb = M[:, a].copy(), M[:, b].copy()
    M[:, a], M[:, b] = c * ca + s * cb, -s * ca + c * cb
    return GaussianState(M, state.gamma)


def flip_pauli_z(state: GaussianState, k: int) -> GaussianState:
    """Conjugate by ``Z_k = -i c_{2k-1} c_{2k}``, which negates both Majoranas of mode k."""
    n = state.n_modes
    if not 1 <= k <= n:
        raise ValueError(f"qubit {k} out of range 1..{n}")
    M = state.M.copy()
    sl = slice(2 * k - 2, 2 * k)
    M[sl, :] *= -1
    M[:, sl] *= -1
    return GaussianState(M, state.gamma)


def outcome_probability(state: GaussianState, k: int, outcome: int) -> float:
    m = state.M[2 * k - 2, 2 * k - 1]
    return min(max(0.5 * (1 + outcome * m), 0.0), 1.0)


def project_pair(state: GaussianState, k: int, outcome: int) -> GaussianState:
    """Post-measurement state after observing ``Z_k = outcome``."""
    M = state.M
    a, b = 2 * k - 2, 2 * k - 1
    denom = 1 + outcome * M[a, b]
    if denom / 2 <= PROB_FLOOR:
        raise GaussianStateError(f"outcome {outcome} on qubit {k} has zero probability")
    Ma, Mb = M[:, a], M[:, b]
    # M'_pq = M_pq + s (M_aq M_bp - M_ap M_bq) / (1 + s m)
    out = M + outcome * (np.outer(Mb, Ma) - np.outer(Ma, Mb)) / denom
    out[[a, b], :] = 0.0
    out[:, [a, b]] = 0.0
    out[a, b] = outcome
    out[b, a] = -outcome
    out = 0.5 * (out - out.T)
    return GaussianState(_clamp(out), state.gamma)


def measure_pair(
    state: GaussianState,
    k: int,
    forced_outcome: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[int, float, GaussianState]:
    """Projective ``Z_k`` measurement; returns (outcome, probability, post-state)."""
    n = state.n_modes
    if not 1 <= k <= n:
        raise ValueError(f"qubit {k} out of range 1..{n}")
    p_plus = outcome_probability(state, k, +1)
    if forced_outcome is not None:
        if forced_outcome not in (1, -1):
            raise ValueError("outcome must be +1 or -1")
        s = forced_outcome
    elif p_plus >= 1.0:
        s = 1
    elif p_plus <= 0.0:
        s = -1
    else:
        if rng is None:
            raise ValueError("a random generator is required for sampled measurements")
        s = 1 if rng.random() < p_plus else -1
    prob = p_plus if s == 1 else 1.0 - p_plus
    return s, prob, project_pair(state, k, s)


def pfaffian(A: np.ndarray, tol: float = ANTISYM_TOL) -> float:
    """Pfaffian by Parlett-Reid elimination with partial pivoting."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError("pfaffian needs a square matrix")
    if n % 2:
        raise ValueError("pfaffian of an odd-dimensional matrix")
    if n and np.max(np.abs(A + A.T)) > tol:
        raise ValueError("matrix is not antisymmetric")
    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1 :, k])))
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        if A[k + 1, k] == 0.0:
            return 0.0
        pf *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2 :] / A[k, k + 1]
            col = A[k + 2 :, k + 1]
            A[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return float(pf)


def expect_monomial(state: GaussianState, m: MajoranaMonomial) -> complex:
    """Wick's theorem: ``<c_{a1}..c_{a2k}> = i^k Pf(M[a, a])``."""
    if m.n_modes != state.n_modes:
        raise ValueError("monomial and state mode counts differ")
    deg = m.degree
    if deg % 2:
        return 0j
    if deg == 0:
        return m.coefficient * state.gamma
    idx = np.array(m.indices) - 1
    pf = pfaffian(state.M[np.ix_(idx, idx)])
    return m.coefficient * (1j ** (deg // 2)) * pf


def pauli_expectation(state: GaussianState, p: PauliString) -> float:
    val = expect_monomial(state, jw_inverse(p))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"Pauli string {p} has a non-real expectation")
    return float(val.real)


# --- batched kernels: a stack of covariance matrices, shape (B, 2n, 2n) ----


def batch_rotate_pair(M: np.ndarray, i: int, j: int, angle: np.ndarray | float) -> None:
    """In-place :func:`rotate_pair` with one angle per batch member."""
    a, b = i - 1, j - 1
    c = np.cos(angle)
    s = np.sin(angle)
    if np.ndim(c):
        c1, s1 = c[:, None], s[:, None]
    else:
        c1, s1 = c, s
    ra, rb = M[:, a, :].copy(), M[:, b, :]
    M[:, a, :] = c1 * ra + s1 * rb
    M[:, b, :] = -s1 * ra + c1 * rb
    ca, cb = M[:, :, a].copy(), M[:, :, b]
    M[:, :, a] = c1 * ca + s1 * cb
    M[:, :, b] = -s1 * ca + c1 * cb


def batch_flip_z(M: np.ndarray, k: int, mask: np.ndarray | None = None) -> None:
    sl = slice(2 * k - 2, 2 * k)
    if mask is None:
        M[:, sl, :] *= -1
        M[:, :, sl] *= -1
        return
    sign = np.where(mask, -1.0, 1.0)[:, None, None]
    M[:, sl, :] *= sign
    M[:, :, sl] *= sign


def batch_measure(M: np.ndarray, k: int, u: np.ndarray) -> np.ndarray:
    """In-place Z_k measurement with uniforms ``u``; returns outcomes (+1/-1).

    Outcome +1 is chosen iff ``u < p_plus``; a certain outcome never depends on ``u``.
    """
    a, b = 2 * k - 2, 2 * k - 1
    m = M[:, a, b]
    p_plus = np.clip(0.5 * (1 + m), 0.0, 1.0)
    s = np.where(u < p_plus, 1.0, -1.0)
    s = np.where(p_plus >= 1.0, 1.0, np.where(p_plus <= 0.0, -1.0, s))
    denom = 1 + s * m
    Ma = M[:, :, a].copy()
    Mb = M[:, :, b].copy()
    coef = (s / denom)[:, None, None]
    M += coef * (Mb[:, :, None] * Ma[:, None, :] - Ma[:, :, None] * Mb[:, None, :])
    M[:, [a, b], :] = 0.0
    M[:, :, [a, b]] = 0.0
    M[:, a, b] = s
    M[:, b, a] = -s
    return s


def batch_pfaffian(A: np.ndarray) -> np.ndarray:
    """Parlett-Reid over a stack of antisymmetric matrices, pivoting per member."""
    A = np.array(A, dtype=float)
    B, n, _ = A.shape
    pf = np.ones(B)
    rows = np.arange(B)
    for k in range(0, n - 1, 2):
        kp = k + 1 + np.argmax(np.abs(A[:, k + 1 :, k]), axis=1)
        swap = kp != k + 1
        if swap.any():
            r = rows[swap]
            p = kp[swap]
            tmp = A[r, k + 1, :].copy()
            A[r, k + 1, :] = A[r, p, :]
            A[r, p, :] = tmp
            tmp = A[r, :, k + 1].copy()
            A[r, :, k + 1] = A[r, :, p]
            A[r, :, p] = tmp
            pf[swap] *= -1
        piv = A[:, k, k + 1]
        pf *= piv
        if k + 2 < n:
            safe = np.where(piv == 0.0, 1.0, piv)
            tau = A[:, k, k + 2 :] / safe[:, None]
            col = A[:, k + 2 :, k + 1]
            A[:, k + 2 :, k + 2 :] += tau[:, :, None] * col[:, None, :] - col[:, :, None] * tau[:, None, :]
    return pf


def batch_expect_monomial(M: np.ndarray, m: MajoranaMonomial) -> np.ndarray:
    """Real part of the monomial expectation for every batch member (Hermitian observables)."""
    deg = m.degree
    if deg % 2:
        return np.zeros(M.shape[0])
    if deg == 0:
        return np.full(M.shape[0], m.coefficient.real)
    idx = np.array(m.indices) - 1
    sub = M[:, idx[:, None], idx[None, :]]
    val = m.coefficient * (1j ** (deg // 2)) * batch_pfaffian(sub)
    return val.real
