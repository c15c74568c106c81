"""Fermionic nonlinearity (upper bound) as an L1-minimizing linear program.

``W(E) = min sum|q_i|  s.t.  sum q_i S_i = E`` over a discrete set of Gaussian
channels ``S_i``.  All values reported here are upper bounds on the true
nonlinearity because the basis is finite.
"""
from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .channels import BasisChannelSet, ChannelPTM, ptm_noisy_rot
from .simplex import InfeasibleError, simplex


@dataclass(frozen=True)
class Tolerances:
    rank: float = 1e-10
    infeasible: float = 1e-8
    residual: float = 1e-7

    @classmethod
    def from_env(cls) -> "Tolerances":
        """Read ``FNL_RANK_TOL``, ``FNL_INFEASIBLE_TOL`` and ``FNL_RESIDUAL_TOL`` if set."""
        d = cls()
        return cls(
            rank=float(os.environ.get("FNL_RANK_TOL", d.rank)),
            infeasible=float(os.environ.get("FNL_INFEASIBLE_TOL", d.infeasible)),
            residual=float(os.environ.get("FNL_RESIDUAL_TOL", d.residual)),
        )


class InfeasibleDecomposition(InfeasibleError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass
class QuasiDecomposition:
    weights: list[tuple[str, float]]
    l1_norm: float
    residual: float

    @property
    def probabilities(self) -> np.ndarray:
        q = np.array([w for _, w in self.weights])
        return np.abs(q) / np.abs(q).sum()

    @property
    def signs(self) -> np.ndarray:
        return np.sign([w for _, w in self.weights])

    def nonzero(self, tol: float = 1e-12) -> list[tuple[str, float]]:
        return [(lab, q) for lab, q in self.weights if abs(q) > tol]

    def to_dict(self, target: dict | None = None) -> dict:
        out = {
            "target": target or {},
            "l1": self.l1_norm,
            "l1_is_upper_bound": True,
            "residual": self.residual,
            "weights": [{"label": lab, "q": q} for lab, q in self.weights],
        }
        return out


def independent_rows(A: np.ndarray, tol: float) -> np.ndarray:
    """Indices of a maximal set of independent rows (QR with column pivoting on ``A.T``)."""
    _, R, piv = scipy.linalg.qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return np.array([], dtype=int)
    rank = int(np.sum(diag > tol * diag[0]))
    return np.sort(piv[:rank])


def reconstruct(basis: BasisChannelSet, q: Sequence[float]) -> np.ndarray:
    return (basis.matrix() @ np.asarray(q)).reshape(16, 16)


def solve_l1(target: ChannelPTM, basis: BasisChannelSet, tol: Tolerances | None = None) -> QuasiDecomposition:
    tol = tol or Tolerances.from_env()
    if not target.is_trace_preserving:
        raise ValueError("target channel is not trace preserving")
    S = basis.matrix()
    t = target.ptm.reshape(-1)

    q_ls, *_ = np.linalg.lstsq(S, t, rcond=None)
    ls_res = float(np.max(np.abs(S @ q_ls - t)))
    if ls_res > tol.infeasible:
        raise InfeasibleDecomposition(
            f"target is outside the span of the basis (least-squares residual {ls_res:.3g})", ls_res
        )

    rows = independent_rows(S, tol.rank)
    A = S[rows]
    n = S.shape[1]
    res = simplex(np.ones(2 * n), np.hstack([A, -A]), t[rows])
    q = res.x[:n] - res.x[n:]
    residual = float(np.max(np.abs(S @ q - t)))
    return QuasiDecomposition(
        weights=list(zip(basis.labels, q.tolist())),
        l1_norm=float(np.abs(q).sum()),
        residual=residual,
    )


def nonlinearity(theta: float, p: float, basis: BasisChannelSet, tol: Tolerances | None = None) -> tuple[float, QuasiDecomposition]:
    """W of ``N_dep(p) ∘ [exp(i theta Z⊗Z)]``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise probability {p} outside [0, 1]")
    dec = solve_l1(ptm_noisy_rot(theta, p), basis, tol)
    return dec.l1_norm, dec


def reference_decomposition(theta: float) -> dict[str, float]:
    """Closed-form decomposition of ``[exp(i theta Z⊗Z)]`` over measurement-and-rotate channels:
    ``cos^2 [I] + sin^2 [ZZ] + sin cos (K1,+ - K1,- + K2,+ - K2,-)``."""
    c, s = math.cos(theta), math.sin(theta)
    return {
        "[I]⊗[I]": c * c,
        "[Z]⊗[Z]": s * s,
        "K1,+1": s * c,
        "K1,-1": -s * c,
        "K2,+1": s * c,
        "K2,-1": -s * c,
    }


def reference_l1(theta: float) -> float:
    return sum(abs(v) for v in reference_decomposition(theta).values())


class NonlinearityCache:
    """Per-(theta, p) memo of LP solutions; keys round theta to 1e-12."""

    def __init__(self, basis: BasisChannelSet, tol: Tolerances | None = None):
        self.basis = basis
        self.tol = tol or Tolerances.from_env()
        self._store: dict[tuple[float, float], QuasiDecomposition] = {}
        self._lock = threading.Lock()

    @staticmethod
    def key(theta: float, p: float) -> tuple[float, float]:
        return (round(theta, 12) + 0.0, float(p))

    def get(self, theta: float, p: float) -> QuasiDecomposition:
        k = self.key(theta, p)
        dec = self._store.get(k)
        if dec is None:
            dec = solve_l1(ptm_noisy_rot(k[0], p), self.basis, self.tol)
            with self._lock:
                self._store[k] = dec
        return dec

    def __len__(self) -> int:
        return len(self._store)


def hoeffding_samples(l1_total: float, epsilon: float, delta: float) -> int:
    """Samples for additive error ``epsilon`` with confidence ``1 - delta``: ceil(2 W^2 ln(2/delta) / eps^2)."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if l1_total < 0:
        raise ValueError("l1 norm must be non-negative")
    return math.ceil(2.0 * l1_total**2 * math.log(2.0 / delta) / epsilon**2)


@dataclass(frozen=True)
class GateCost:
    gate_id: int
    theta: float
    p: float
    w: float


@dataclass
class CostReport:
    per_gate: list[GateCost] = field(default_factory=list)

    @property
    def total_w(self) -> float:
        return math.prod(g.w for g in self.per_gate)

    @property
    def log10_total(self) -> float:
        return math.fsum(math.log10(g.w) for g in self.per_gate)

    def samples_for(self, epsilon: float, delta: float) -> int:
        return hoeffding_samples(self.total_w, epsilon, delta)

    def to_dict(self) -> dict:
        return {
            "total_w": self.total_w,
            "log10_total": self.log10_total,
            "w_is_upper_bound": True,
            "per_gate": [{"gate": g.gate_id, "theta": g.theta, "p": g.p, "W": g.w} for g in self.per_gate],
        }


def circuit_cost(
    gates: Iterable[tuple[float, float]],
    basis: BasisChannelSet | None = None,
    cache: NonlinearityCache | None = None,
) -> CostReport:
    """Product of per-gate upper bounds, justified by submultiplicativity."""
    if cache is None:
        if basis is None:
            raise ValueError("circuit_cost needs a basis or a cache")
        cache = NonlinearityCache(basis)
    report = CostReport()
    for gid, (theta, p) in enumerate(gates):
        report.per_gate.append(GateCost(gid, theta, p, cache.get(theta, p).l1_norm))
    return report
