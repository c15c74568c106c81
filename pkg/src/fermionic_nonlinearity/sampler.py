"""Monte-Carlo quasiprobability simulation on top of the covariance engine.

Each sample starts from the initial occupation state, applies Gaussian
rotations exactly and replaces every noisy four-body rotation by a basis
channel drawn with probability ``|q_i| / ||q||_1``; the sample value is the
observable times the product of ``||q||_1 sign(q_i)`` factors.

Samples are processed in fixed-size blocks.  Block ``b`` draws from a Philox
stream keyed by ``(seed, b)``, and block sums are merged in block order, so
a run is reproducible bit for bit whatever the worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import BasisChannelSet, ExecChannel, build_basis, exec_batch, n_measurements
from .circuit import CircuitIR, GaussianRotation
from .gaussian import OrthogonalRotation, batch_expect_monomial, batch_rotate_pair, state_from_occupation
from .nonlinearity import NonlinearityCache, hoeffding_samples
from .pauli import MajoranaMonomial

BLOCK_SIZE = 4096


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    std_error: float
    n_samples: int
    l1_total: float
    seed: int
    hoeffding_samples: int | None = None
    epsilon: float | None = None
    delta: float | None = None

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "l1_total": self.l1_total,
            "l1_is_upper_bound": True,
            "seed": self.seed,
            "hoeffding_samples": self.hoeffding_samples,
            "epsilon": self.epsilon,
            "delta": self.delta,
        }


def frame_permutation(idx: Sequence[int], n: int) -> np.ndarray:
    """0-based order putting Majoranas ``idx`` first, remaining ones after in ascending order."""
    idx = [int(a) for a in idx]
    if len(set(idx)) != len(idx):
        raise ValueError("frame indices must be distinct")
    if any(not 1 <= a <= 2 * n for a in idx):
        raise ValueError("frame index out of range")
    rest = [a for a in range(1, 2 * n + 1) if a not in idx]
    return np.array(idx + rest) - 1


def frame_rotation(i: int, j: int, k: int, l: int, n: int) -> OrthogonalRotation:
    """Orthogonal ``R`` with ``R e_i = e_1``, ..., ``R e_l = e_4`` (a permutation)."""
    perm = frame_permutation((i, j, k, l), n)
    R = np.zeros((2 * n, 2 * n))
    R[np.arange(2 * n), perm] = 1.0
    return OrthogonalRotation(R)


@dataclass(frozen=True)
class _GateStep:
    """A four-body gate with its sampling distribution, ready to ship to workers."""

    perm: np.ndarray
    probs: np.ndarray
    factors: np.ndarray  # ||q||_1 * sign(q_i)
    channels: tuple[ExecChannel, ...]
    measurements: tuple[int, ...]


@dataclass(frozen=True)
class _Plan:
    n_modes: int
    init_M: np.ndarray
    ops: tuple  # GaussianRotation | _GateStep
    observable: MajoranaMonomial
    seed: int


def _plan(circuit: CircuitIR, cache: NonlinearityCache, seed: int) -> tuple[_Plan, float]:
    ops = []
    l1_total = 1.0
    by_label = {m.label: m for m in cache.basis}
    for g in circuit.gates:
        if isinstance(g, GaussianRotation):
            ops.append(g)
            continue
        dec = cache.get(g.zz_angle, g.noise_p)
        picked = dec.nonzero()
        q = np.array([w for _, w in picked])
        l1 = float(np.abs(q).sum())
        channels = tuple(by_label[lab].exec for lab, _ in picked)
        ops.append(
            _GateStep(
                perm=frame_permutation(g.indices, circuit.n_modes),
                probs=np.abs(q) / l1,
                factors=l1 * np.sign(q),
                channels=channels,
                measurements=tuple(n_measurements(ch) for ch in channels),
            )
        )
        l1_total *= l1
    init = state_from_occupation(circuit.initial_occupation).M
    return _Plan(circuit.n_modes, init, tuple(ops), circuit.observable_monomial(), seed), l1_total


def _block_generator(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


def _block_values(plan: _Plan, block: int, size: int) -> np.ndarray:
    rng = _block_generator(plan.seed, block)
    M = np.broadcast_to(plan.init_M, (size,) + plan.init_M.shape).copy()
    weight = np.ones(size)
    for op in plan.ops:
        if isinstance(op, GaussianRotation):
            batch_rotate_pair(M, op.i, op.j, op.angle)
            continue
        choice = rng.choice(len(op.probs), size=size, p=op.probs)
        weight *= op.factors[choice]
        perm = op.perm
        inv = np.argsort(perm)
        M = M[:, perm][:, :, perm]
        for c, channel in enumerate(op.channels):
            rows = np.flatnonzero(choice == c)
            if rows.size == 0:
                continue
            sub = M[rows]
            uniforms = rng.random((rows.size, op.measurements[c]))
            exec_batch(channel, sub, uniforms)
            M[rows] = sub
        M = M[:, inv][:, :, inv]
    return weight * batch_expect_monomial(M, plan.observable)


def _block_sums(args: tuple[_Plan, int, int]) -> tuple[int, float, float]:
    plan, block, size = args
    v = _block_values(plan, block, size)
    return block, math.fsum(v), math.fsum(v * v)


def sample_values(circuit: CircuitIR, n_samples: int, seed: int, basis: BasisChannelSet | None = None,
                  cache: NonlinearityCache | None = None) -> np.ndarray:
    """All individual weighted sample values (for diagnostics and tests)."""
    cache = cache or NonlinearityCache(basis or build_basis())
    plan, _ = _plan(circuit, cache, seed)
    out = []
    for b, start in enumerate(range(0, n_samples, BLOCK_SIZE)):
        out.append(_block_values(plan, b, min(BLOCK_SIZE, n_samples - start)))
    return np.concatenate(out) if out else np.zeros(0)


def required_samples(circuit: CircuitIR, epsilon: float, delta: float, basis: BasisChannelSet | None = None,
                     cache: NonlinearityCache | None = None) -> int:
    cache = cache or NonlinearityCache(basis or build_basis())
    l1 = math.prod(cache.get(g.zz_angle, g.noise_p).l1_norm for g in circuit.four_body_gates)
    return hoeffding_samples(l1, epsilon, delta)


def run(
    circuit: CircuitIR,
    basis: BasisChannelSet | None = None,
    n_samples: int | None = None,
    epsilon: float | None = None,
    delta: float | None = None,
    seed: int = 0,
    workers: int = 1,
    cache: NonlinearityCache | None = None,
) -> EstimateResult:
    """Estimate the circuit observable; give ``n_samples`` or ``(epsilon, delta)``."""
    if circuit.observable is None:
        raise ValueError("circuit has no observable")
    cache = cache or NonlinearityCache(basis or build_basis())
    plan, l1_total = _plan(circuit, cache, seed)
    n_hoeff = None
    if epsilon is not None or delta is not None:
        if epsilon is None or delta is None:
            raise ValueError("epsilon and delta must be given together")
        n_hoeff = hoeffding_samples(l1_total, epsilon, delta)
    if n_samples is None:
        if n_hoeff is None:
            raise ValueError("give n_samples or (epsilon, delta)")
        n_samples = n_hoeff
    if n_samples < 1:
        raise ValueError("n_samples must be positive")

    jobs = [(plan, b, min(BLOCK_SIZE, n_samples - start)) for b, start in enumerate(range(0, n_samples, BLOCK_SIZE))]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_block_sums, jobs))
    else:
        results = [_block_sums(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    total = math.fsum(r[1] for r in results)
    total_sq = math.fsum(r[2] for r in results)
    mean = total / n_samples
    if n_samples > 1:
        var = max(total_sq - n_samples * mean * mean, 0.0) / (n_samples - 1)
    else:
        var = 0.0
    return EstimateResult(
        mean=mean,
        std_error=math.sqrt(var / n_samples),
        n_samples=n_samples,
        l1_total=l1_total,
        seed=seed,
        hoeffding_samples=n_hoeff,
        epsilon=epsilon,
        delta=delta,
    )
