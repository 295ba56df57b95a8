"""Seeded Monte Carlo checks of the analytic success probabilities.

Trials are split into fixed-size shards. Shard ``k`` draws from its own
stream, ``SeedSequence(seed, spawn_key=(k,))``, so results depend only on
``(seed, trials)`` and never on how many workers ran the shards.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classical import guess_table
from .core import InputTuple, ProtocolChain, mod4_target, parse_chain
from .noise import NoiseParams, signal_probability
from .quantum import run_quantum

SHARD_SIZE = 1 << 16
QUANTUM = "quantum"
CLASSICAL = "classical"

__all__ = [
    "TrialRecord",
    "Estimate",
    "shard_rng",
    "sample_constrained_inputs",
    "sample_inputs_batch",
    "simulate_noisy_run",
    "run_experiment",
    "QUANTUM",
    "CLASSICAL",
]


@dataclass(frozen=True)
class TrialRecord:
    inputs: InputTuple
    detected_signal: bool
    outcome_correct: bool


@dataclass(frozen=True)
class Estimate:
    successes: int
    trials: int

    @property
    def point(self) -> float:
        return self.successes / self.trials

    @property
    def ci_halfwidth(self) -> float:
        """Three-sigma normal-approximation half width."""
        p = self.point
        return 3 * math.sqrt(p * (1 - p) / self.trials)

    def covers(self, value: float) -> bool:
        return abs(self.point - value) <= self.ci_halfwidth


def shard_rng(seed: int, shard: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(shard,)))


def sample_inputs_batch(n_parties: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` uniform promise-satisfying tuples as an ``(size, N)`` array.

    The first ``N - 1`` symbols are uniform; the last is one of the two
    symbols that make the sum even, chosen by a fair bit.
    """
    head = rng.integers(0, 4, size=(size, n_parties - 1))
    last = head.sum(axis=1) % 2 + 2 * rng.integers(0, 2, size=size)
    return np.column_stack([head, last])


def sample_constrained_inputs(n_parties: int, rng: np.random.Generator) -> InputTuple:
    return InputTuple(tuple(int(x) for x in sample_inputs_batch(n_parties, 1, rng)[0]))


def simulate_noisy_run(
    inputs: InputTuple, params: NoiseParams, rng: np.random.Generator
) -> TrialRecord:
    """One photon through the parties; two uniform draws per run."""
    u_detect, u_outcome = rng.random(2)
    detected = bool(u_detect < signal_probability(params))
    f = run_quantum(inputs)
    if detected:
        answer = f if u_outcome < params.s else 1 - f
    else:
        answer = int(u_outcome < 0.5)
    return TrialRecord(inputs, detected, answer == mod4_target(inputs))


def _classical_shard(chain: ProtocolChain, x: np.ndarray) -> int:
    tables = [np.array(t.bits) for t in chain.tables]
    m = tables[0][x[:, 0]]
    for j, table in enumerate(tables[1:], start=1):
        m = table[2 * x[:, j] + m]
    guesses = guess_table(chain)
    lookup = np.array([[guesses[(xl, mm)] for mm in (0, 1)] for xl in range(4)])
    target = (x.sum(axis=1) % 4) // 2
    return int(np.count_nonzero(lookup[x[:, -1], m] == target))


def _quantum_shard(params: NoiseParams, x: np.ndarray, rng: np.random.Generator) -> int:
    u = rng.random((len(x), 2))
    detected = u[:, 0] < signal_probability(params)
    outcome = (x.sum(axis=1) % 4) // 2  # quarter-turn accumulator, as in run_quantum
    answer = np.where(
        detected,
        np.where(u[:, 1] < params.s, outcome, 1 - outcome),
        (u[:, 1] < 0.5).astype(outcome.dtype),
    )
    target = (x.sum(axis=1) % 4) // 2
    return int(np.count_nonzero(answer == target))


def _run_shard(job: tuple) -> int:
    kind, n_parties, chain_text, params, seed, shard, size = job
    rng = shard_rng(seed, shard)
    x = sample_inputs_batch(n_parties, size, rng)
    if kind == CLASSICAL:
        return _classical_shard(parse_chain(chain_text), x)
    return _quantum_shard(params, x, rng)


def _shard_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, SHARD_SIZE)
    return [SHARD_SIZE] * full + ([rest] if rest else [])


def run_experiment(
    kind: str,
    n_parties: int,
    trials: int,
    seed: int,
    params: NoiseParams | None = None,
    chain: ProtocolChain | None = None,
    jobs: int = 1,
) -> Estimate:
    """Empirical success rate of a noisy quantum run or a classical chain."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if kind == CLASSICAL:
        if chain is None:
            raise ValueError("classical experiments need a chain")
        if chain.n_parties != n_parties:
            raise ValueError(f"chain is for {chain.n_parties} parties, not {n_parties}")
        chain_text = str(chain)
    elif kind == QUANTUM:
        params = params or NoiseParams()
        chain_text = None
    else:
        raise ValueError(f"unknown experiment kind {kind!r}")

    jobs_list: Sequence[tuple] = [
        (kind, n_parties, chain_text, params, seed, k, size)
        for k, size in enumerate(_shard_sizes(trials))
    ]
    if jobs <= 1 or len(jobs_list) == 1:
        counts = list(map(_run_shard, jobs_list))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(_run_shard, jobs_list))
    return Estimate(sum(counts), trials)
