"""Noisy UCCSD circuits from amplitude files, their sampling cost and size extrapolation.

Amplitudes are read from JSON; nothing here runs quantum chemistry.
Spin-orbital indices are 1-based.  With ``a_p = (c_{2p-1} + i c_{2p}) / 2``:

* a single excitation ``exp(t (a_a^dag a_i - a_i^dag a_a))`` equals the two
  commuting Gaussian rotations ``exp(t/2 c_{2a-1} c_{2i-1}) exp(t/2 c_{2a} c_{2i})``;
* a double excitation splits into eight commuting four-body rotations with
  angles ``±t/8``.

Two sign patterns are available for the doubles.  ``"printed"`` is the
widely quoted pattern (-,-,-,+,-,+,+,+); ``"exact"`` is (+,+,-,+,-,+,-,-),
which reproduces ``exp(t (a_a^dag a_b^dag a_i a_j - h.c.))`` exactly under the
convention above.  Both have the same angle magnitudes and hence the same cost.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .channels import BasisChannelSet
from .circuit import CircuitIR, FourBodyRotation, GaussianRotation
from .nonlinearity import CostReport, NonlinearityCache, circuit_cost

BUDGET_W = 3e3

# Majorana parity offsets for (a, b, i, j): 1 selects c_{2p-1}, 0 selects c_{2p}
DOUBLE_OFFSETS: tuple[tuple[int, int, int, int], ...] = (
    (1, 1, 1, 0),
    (1, 1, 0, 1),
    (1, 0, 1, 1),
    (1, 0, 0, 0),
    (0, 1, 1, 1),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
)
DOUBLE_SIGNS: dict[str, tuple[int, ...]] = {
    "printed": (-1, -1, -1, +1, -1, +1, +1, +1),
    "exact": (+1, +1, -1, +1, -1, +1, -1, -1),
}


class AmplitudeError(ValueError):
    pass


@dataclass
class AmplitudeSet:
    n_spin_orbitals: int
    occ: list[int]
    virt: list[int]
    t1: dict[tuple[int, int], float] = field(default_factory=dict)
    t2: dict[tuple[int, int, int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        n = self.n_spin_orbitals
        occ, virt = set(self.occ), set(self.virt)
        if n < 1:
            raise AmplitudeError("n_spin_orbitals must be positive")
        if occ & virt:
            raise AmplitudeError(f"orbitals {sorted(occ & virt)} are both occupied and virtual")
        if any(not 1 <= p <= n for p in occ | virt):
            raise AmplitudeError("orbital index out of range")
        if len(occ) != len(self.occ) or len(virt) != len(self.virt):
            raise AmplitudeError("repeated orbital index")
        for a, i in self.t1:
            if a not in virt or i not in occ:
                raise AmplitudeError(f"t1 entry ({a}, {i}) must map occ -> virt")
        for a, b, i, j in self.t2:
            if a not in virt or b not in virt or i not in occ or j not in occ:
                raise AmplitudeError(f"t2 entry ({a}, {b}, {i}, {j}) must map occ -> virt")
            if a == b or i == j:
                raise AmplitudeError(f"t2 entry ({a}, {b}, {i}, {j}) repeats an orbital")

    def to_dict(self) -> dict:
        return {
            "n_spin_orbitals": self.n_spin_orbitals,
            "occ": list(self.occ),
            "virt": list(self.virt),
            "t1": [{"a": a, "i": i, "t": t} for (a, i), t in self.t1.items()],
            "t2": [{"a": a, "b": b, "i": i, "j": j, "t": t} for (a, b, i, j), t in self.t2.items()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AmplitudeSet":
        try:
            t1 = {}
            for e in data.get("t1", []):
                key = (int(e["a"]), int(e["i"]))
                if key in t1:
                    raise AmplitudeError(f"duplicate t1 entry {key}")
                t1[key] = float(e["t"])
            t2 = {}
            for e in data.get("t2", []):
                key = (int(e["a"]), int(e["b"]), int(e["i"]), int(e["j"]))
                if key in t2:
                    raise AmplitudeError(f"duplicate t2 entry {key}")
                t2[key] = float(e["t"])
            return cls(
                n_spin_orbitals=int(data["n_spin_orbitals"]),
                occ=[int(p) for p in data["occ"]],
                virt=[int(p) for p in data["virt"]],
                t1=t1,
                t2=t2,
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, AmplitudeError):
                raise
            raise AmplitudeError(f"malformed amplitude file: {exc}") from exc


def load_amplitudes(path: str | Path) -> AmplitudeSet:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise AmplitudeError(f"{path}: not valid JSON ({exc})") from exc
    return AmplitudeSet.from_dict(data)


def save_amplitudes(amps: AmplitudeSet, path: str | Path) -> None:
    Path(path).write_text(json.dumps(amps.to_dict(), indent=2, sort_keys=True) + "\n")


def single_excitation_gates(a: int, i: int, t: float) -> list[GaussianRotation]:
    return [GaussianRotation(2 * a - 1, 2 * i - 1, t), GaussianRotation(2 * a, 2 * i, t)]


def double_excitation_gates(a: int, b: int, i: int, j: int, t: float, noise_p: float,
                            signs: str = "printed") -> list[FourBodyRotation]:
    gates = []
    for offsets, sign in zip(DOUBLE_OFFSETS, DOUBLE_SIGNS[signs]):
        idx = [2 * p - off for p, off in zip((a, b, i, j), offsets)]
        gates.append(FourBodyRotation(*idx, angle=sign * t / 8, noise_p=noise_p))
    return gates


def build_circuit(amps: AmplitudeSet, trotter_n: int = 1, noise_p: float = 0.0,
                  signs: str = "printed") -> CircuitIR:
    """Trotterized UCCSD: all singles, then all doubles, repeated ``trotter_n`` times."""
    if trotter_n < 1:
        raise ValueError("trotter_n must be at least 1")
    if not 0.0 <= noise_p <= 1.0:
        raise ValueError("noise probability outside [0, 1]")
    step = []
    for (a, i), t in amps.t1.items():
        step.extend(single_excitation_gates(a, i, t / trotter_n))
    for (a, b, i, j), t in amps.t2.items():
        step.extend(double_excitation_gates(a, b, i, j, t / trotter_n, noise_p, signs))
    init = [1 if p in set(amps.occ) else 0 for p in range(1, amps.n_spin_orbitals + 1)]
    return CircuitIR(amps.n_spin_orbitals, init, step * trotter_n)


@dataclass
class UccsdCost:
    report: CostReport
    budget: float = BUDGET_W

    @property
    def total_w(self) -> float:
        return self.report.total_w

    @property
    def within_budget(self) -> bool:
        """True when a one-day run on 1e6 cores at 1 ms/sample suffices (W <= 3e3)."""
        return self.total_w <= self.budget

    def to_dict(self) -> dict:
        out = self.report.to_dict()
        out["budget_w"] = self.budget
        out["simulatable_within_budget"] = self.within_budget
        return out

    def csv_rows(self) -> list[tuple[int, float, float, float]]:
        return [(g.gate_id, g.theta, g.p, g.w) for g in self.report.per_gate]


def cost_report(circuit: CircuitIR, basis: BasisChannelSet | None = None,
                cache: NonlinearityCache | None = None, budget: float = BUDGET_W) -> UccsdCost:
    gates = [(g.zz_angle, g.noise_p) for g in circuit.four_body_gates]
    return UccsdCost(circuit_cost(gates, basis, cache), budget)


def n4_all_doubles(m: int) -> int:
    """Four-body rotations for H_m with every (a<b, i<j) spin-orbital double excitation."""
    pairs = math.comb(m, 2)
    return 8 * pairs * pairs


def n4_spin_conserving(m: int) -> int:
    """Same, keeping only S_z-conserving doubles (m even, alternating alpha/beta orbitals)."""
    half = m // 2
    same_spin = 2 * math.comb(half, 2) ** 2
    opposite = half**4
    return 8 * (same_spin + opposite)


N4_RULES: dict[str, Callable[[int], int]] = {"all": n4_all_doubles, "spin": n4_spin_conserving}


@dataclass
class ExtrapolationReport:
    geo_mean_w: float
    n4_rule: str = "all"

    def __post_init__(self):
        if self.geo_mean_w < 1 - 1e-12:
            raise ValueError("geometric mean of W must be at least 1")
        if self.n4_rule not in N4_RULES:
            raise ValueError(f"unknown N4 rule {self.n4_rule!r}")

    def n4_of_m(self, m: int) -> int:
        return N4_RULES[self.n4_rule](m)

    def predicted_w(self, m: int) -> float:
        return self.geo_mean_w ** self.n4_of_m(m)

    def max_simulatable_m(self, budget: float = BUDGET_W, m_limit: int = 10_000) -> int | None:
        """Largest chain length within budget; ``None`` means every length fits."""
        if self.geo_mean_w <= 1.0:
            return None
        best = 0
        for m in range(2, m_limit + 1):
            if self.n4_of_m(m) * math.log(self.geo_mean_w) <= math.log(budget):
                best = m
            elif best:
                break
        return best

    def to_dict(self, ms: Sequence[int] = ()) -> dict:
        return {
            "geo_mean_w": self.geo_mean_w,
            "n4_rule": self.n4_rule,
            "max_simulatable_m": self.max_simulatable_m(),
            "predicted": [{"m": m, "n4": self.n4_of_m(m), "W": self.predicted_w(m)} for m in ms],
        }


def extrapolate(per_gate_ws: Sequence[float], n4_rule: str = "all") -> ExtrapolationReport:
    if len(per_gate_ws) == 0:
        raise ValueError("need at least one gate cost")
    ws = np.asarray(per_gate_ws, dtype=float)
    if np.any(ws < 1 - 1e-9):
        raise ValueError("per-gate W values must be at least 1")
    geo = math.exp(math.fsum(np.log(np.maximum(ws, 1.0))) / ws.size)
    return ExtrapolationReport(geo, n4_rule)
