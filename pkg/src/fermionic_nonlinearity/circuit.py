"""Circuit description shared by the sampler, the cost analysis and the CLI.

Gate semantics (1-based Majorana indices):

* ``GaussianRotation(i, j, angle)`` is ``exp(angle/2 * c_i c_j)``, i.e. a
  rotation by ``angle`` in the ``(c_i, c_j)`` plane.
* ``FourBodyRotation(i, j, k, l, angle, noise_p)`` is
  ``exp(i * angle * c_i c_j c_k c_l)`` followed by two-qubit dephasing on the
  parities ``-i c_i c_j`` and ``-i c_k c_l``.  In the frame where the four
  indices become 1..4 it equals ``N_dep(p) ∘ [exp(i * (-angle) * Z⊗Z)]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .pauli import MajoranaMonomial, PauliString, jw_inverse, jw_monomial


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianRotation:
    i: int
    j: int
    angle: float

    @property
    def indices(self) -> tuple[int, ...]:
        return (self.i, self.j)


@dataclass(frozen=True)
class FourBodyRotation:
    i: int
    j: int
    k: int
    l: int
    angle: float
    noise_p: float = 0.0

    @property
    def indices(self) -> tuple[int, ...]:
        return (self.i, self.j, self.k, self.l)

    @property
    def zz_angle(self) -> float:
        """Angle of the equivalent ``exp(i theta Z⊗Z)`` in the canonical frame."""
        return -self.angle


Gate = Union[GaussianRotation, FourBodyRotation]
Observable = Union[PauliString, MajoranaMonomial]


@dataclass
class CircuitIR:
    n_modes: int
    initial_occupation: list[int]
    gates: list[Gate] = field(default_factory=list)
    observable: Observable | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.n_modes < 1:
            raise CircuitError("n_modes must be positive")
        if len(self.initial_occupation) != self.n_modes:
            raise CircuitError("initial occupation length differs from n_modes")
        if any(b not in (0, 1) for b in self.initial_occupation):
            raise CircuitError("occupations must be 0 or 1")
        for g in self.gates:
            idx = g.indices
            if any(not 1 <= a <= 2 * self.n_modes for a in idx):
                raise CircuitError(f"gate index out of range in {g}")
            if len(set(idx)) != len(idx):
                raise CircuitError(f"gate indices must be distinct in {g}")
            if isinstance(g, FourBodyRotation) and not 0.0 <= g.noise_p <= 1.0:
                raise CircuitError(f"noise probability outside [0, 1] in {g}")
        obs = self.observable
        if isinstance(obs, PauliString):
            if obs.n_qubits != self.n_modes:
                raise CircuitError("observable acts on the wrong number of qubits")
            if not obs.is_hermitian:
                raise CircuitError("observable must be Hermitian")
        elif isinstance(obs, MajoranaMonomial):
            if obs.n_modes != self.n_modes:
                raise CircuitError("observable acts on the wrong number of modes")
            if not jw_monomial(obs).is_hermitian:
                raise CircuitError("observable must be Hermitian")

    @property
    def four_body_gates(self) -> list[FourBodyRotation]:
        return [g for g in self.gates if isinstance(g, FourBodyRotation)]

    def observable_monomial(self) -> MajoranaMonomial:
        if self.observable is None:
            raise CircuitError("circuit has no observable")
        if isinstance(self.observable, PauliString):
            return jw_inverse(self.observable)
        return self.observable

    def to_dict(self) -> dict:
        gates = []
        for g in self.gates:
            if isinstance(g, GaussianRotation):
                gates.append({"type": "g2", "idx": [g.i, g.j], "angle": g.angle})
            else:
                gates.append({"type": "g4", "idx": list(g.indices), "angle": g.angle, "noise_p": g.noise_p})
        out: dict = {"n_modes": self.n_modes, "init": list(self.initial_occupation), "gates": gates}
        if isinstance(self.observable, PauliString):
            out["observable"] = {"pauli": str(self.observable).lstrip("+")}
        elif isinstance(self.observable, MajoranaMonomial):
            out["observable"] = {"majorana": list(self.observable.indices), "phase": self.observable.phase}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CircuitIR":
        try:
            n = int(data["n_modes"])
            init = [int(b) for b in data.get("init", [0] * n)]
            gates: list[Gate] = []
            for g in data.get("gates", []):
                kind, idx = g["type"], [int(a) for a in g["idx"]]
                if kind == "g2":
                    if len(idx) != 2:
                        raise CircuitError("g2 gates take two indices")
                    gates.append(GaussianRotation(idx[0], idx[1], float(g["angle"])))
                elif kind == "g4":
                    if len(idx) != 4:
                        raise CircuitError("g4 gates take four indices")
                    gates.append(FourBodyRotation(*idx, angle=float(g["angle"]), noise_p=float(g.get("noise_p", 0.0))))
                else:
                    raise CircuitError(f"unknown gate type {kind!r}")
            obs_data = data.get("observable")
            obs: Observable | None = None
            if obs_data is not None:
                if "pauli" in obs_data:
                    obs = PauliString.from_label(obs_data["pauli"])
                elif "majorana" in obs_data:
                    obs = MajoranaMonomial.from_indices(n, obs_data["majorana"], int(obs_data.get("phase", 0)))
                else:
                    raise CircuitError("observable needs a 'pauli' or 'majorana' entry")
        except (KeyError, TypeError) as exc:
            raise CircuitError(f"malformed circuit: {exc}") from exc
        return cls(n, init, gates, obs)


def load_circuit(path: str | Path) -> CircuitIR:
    return CircuitIR.from_dict(json.loads(Path(path).read_text()))


def save_circuit(circuit: CircuitIR, path: str | Path) -> None:
    Path(path).write_text(json.dumps(circuit.to_dict(), indent=2) + "\n")
