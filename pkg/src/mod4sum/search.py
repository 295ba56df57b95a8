"""Exhaustive and heuristic search over deterministic chains.

Chains are enumerated with each table read as a big-endian integer and party 1
outermost, so the canonical index of ``(t_1, ..., t_{N-1})`` is the mixed-radix
number ``t_1 t_2 ... t_{N-1}``. The space is cut into independent tasks by the
``(t_1, t_2)`` prefix (just ``t_1`` when N = 3). Inside a task the 8-state
count distribution is carried depth first, so every prefix is propagated once,
and the last two tables are scored together as one matrix product.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .classical import evaluate_chain_dp, reference_chain, total_inputs
from .core import FIRST_WIDTH, INNER_WIDTH, ProtocolChain
from .errors import ResourceLimitError
from .probability import SuccessProbability

log = logging.getLogger(__name__)

EXHAUSTIVE = "exhaustive"
HEURISTIC = "heuristic"
DEFAULT_MAX_EXHAUSTIVE = 5

__all__ = [
    "SearchResult",
    "space_size",
    "exhaustive_search",
    "heuristic_search",
    "EXHAUSTIVE",
    "HEURISTIC",
]


def _bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> (width - 1 - n)) & 1 for n in range(width)], dtype=np.int64)


# State index is 4 * m + s with s the partial sum mod 4.
_FIRST_BITS = np.stack([_bits(v, FIRST_WIDTH) for v in range(16)])
_INNER_BITS = np.stack([_bits(v, INNER_WIDTH) for v in range(256)])


def _first_distributions() -> np.ndarray:
    out = np.zeros((16, 8))
    for v in range(16):
        for x in range(4):
            out[v, 4 * _FIRST_BITS[v, x] + x] += 1
    return out


def _transition_matrices() -> np.ndarray:
    """``T[v] @ d`` advances distribution ``d`` through inner table ``v``."""
    out = np.zeros((256, 8, 8))
    for v in range(256):
        for m in range(2):
            for s in range(4):
                for x in range(4):
                    out[v, 4 * _INNER_BITS[v, 2 * x + m] + (s + x) % 4, 4 * m + s] += 1
    return out


FIRST_DIST = _first_distributions()
TRANSITIONS = _transition_matrices()
# Entry e = 2x + m routes a copy of the row for m, shifted by x, to the table's bit.
_ROUTE = _INNER_BITS.astype(float)  # (256 tables, 8 entries)
_SHIFT = np.zeros((8, 8, 4))  # (entry, state, new partial sum)
for _x in range(4):
    for _m in range(2):
        for _s in range(4):
            _SHIFT[2 * _x + _m, 4 * _m + _s, (_s + _x) % 4] = 1


def _score_last(dists: np.ndarray) -> np.ndarray:
    """Correct-guess counts for every last inner table, shape ``(B, 256)``.

    ``dists`` has shape ``(B, 8)`` and holds the counts before the last inner
    table. Given the received bit and the parity of ``x_N``, the two
    compatible values of ``x_N`` see the same pair of partial sums with F
    swapped, hence the factor 2.
    """
    routed = np.einsum("bi,eis->bes", dists, _SHIFT)  # (B, 8, 4)
    total = routed.sum(axis=1)  # (B, 4)
    ones = np.einsum("ue,bes->bus", _ROUTE, routed, optimize=True)  # (B, 256, 4)
    zeros = total[:, None, :] - ones
    best = (
        np.maximum(ones[..., 0], ones[..., 2])
        + np.maximum(ones[..., 1], ones[..., 3])
        + np.maximum(zeros[..., 0], zeros[..., 2])
        + np.maximum(zeros[..., 1], zeros[..., 3])
    )
    return 2 * best


def _best_below(dist: np.ndarray, remaining: int) -> tuple[int, tuple[int, ...]]:
    """Best score and first maximising suffix for ``remaining`` inner tables."""
    if remaining == 1:
        scores = _score_last(dist[None, :])[0]
        i = int(np.argmax(scores))
        return int(scores[i]), (i,)
    if remaining == 2:
        scores = _score_last(TRANSITIONS @ dist)  # (256, 256), row-major = canonical
        flat = int(np.argmax(scores))
        i, j = divmod(flat, 256)
        return int(scores[i, j]), (i, j)
    best, best_suffix = -1, ()
    for v in range(256):
        score, suffix = _best_below(TRANSITIONS[v] @ dist, remaining - 1)
        if score > best:
            best, best_suffix = score, (v,) + suffix
    return best, best_suffix


def _run_task(args: tuple[int, tuple[int, ...]]) -> tuple[int, tuple[int, ...]]:
    n_parties, prefix = args
    dist = FIRST_DIST[prefix[0]]
    for v in prefix[1:]:
        dist = TRANSITIONS[v] @ dist
    remaining = n_parties - 1 - len(prefix)
    score, suffix = _best_below(dist, remaining)
    return score, prefix + suffix


def _tasks(n_parties: int) -> list[tuple[int, ...]]:
    if n_parties == 3:
        return [(a,) for a in range(16)]
    return [(a, b) for a in range(16) for b in range(256)]


def space_size(n_parties: int) -> int:
    """Number of deterministic chains, ``2**(8N - 12)``."""
    return 1 << (8 * n_parties - 12)


@dataclass(frozen=True)
class SearchResult:
    n_parties: int
    optimum: SuccessProbability
    witness: ProtocolChain
    chains_examined: int
    mode: str


def default_jobs() -> int:
    return os.cpu_count() or 1


def _map(func, items: Sequence, jobs: int) -> Iterable:
    if jobs <= 1:
        return map(func, items)
    chunk = max(1, len(items) // (jobs * 16))
    pool = ProcessPoolExecutor(max_workers=jobs)
    try:
        return list(pool.map(func, items, chunksize=chunk))
    finally:
        pool.shutdown()


def exhaustive_search(
    n_parties: int,
    jobs: int = 1,
    allow_large: bool = False,
    max_parties: int = DEFAULT_MAX_EXHAUSTIVE,
) -> SearchResult:
    """Optimal success probability over all ``2**(8N - 12)`` chains.

    The result, including the witness (the first optimal chain in canonical
    order), does not depend on ``jobs``.
    """
    if n_parties < 3:
        raise ValueError(f"need at least 3 parties, got {n_parties}")
    if n_parties > max_parties and not allow_large:
        raise ResourceLimitError(
            f"exhaustive search at N={n_parties} covers {space_size(n_parties)} chains; "
            f"limit is N={max_parties} unless explicitly allowed"
        )
    tasks = _tasks(n_parties)
    log.info("exhaustive N=%d: %d tasks on %d worker(s)", n_parties, len(tasks), jobs)
    best, witness = -1, ()
    for score, chain in _map(_run_task, [(n_parties, t) for t in tasks], jobs):
        if score > best:
            best, witness = score, chain
    return SearchResult(
        n_parties=n_parties,
        optimum=SuccessProbability(best, total_inputs(n_parties)),
        witness=ProtocolChain.from_ints(witness),
        chains_examined=space_size(n_parties),
        mode=EXHAUSTIVE,
    )


def heuristic_search(n_parties: int, budget: int, seed: int = 0) -> SearchResult:
    """Lower bound on the optimum from at most ``budget`` chain evaluations.

    The reference chain is always evaluated first. If the budget covers the
    whole space it is enumerated in canonical order; otherwise random-restart
    hill climbing over single-bit flips spends the rest. Every value found is
    a lower bound on the true optimum.
    """
    if n_parties < 3:
        raise ValueError(f"need at least 3 parties, got {n_parties}")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    ref = reference_chain(n_parties)
    best_chain, best = ref, evaluate_chain_dp(ref)
    examined = 1
    widths = [FIRST_WIDTH] + [INNER_WIDTH] * (n_parties - 2)

    if budget - 1 >= space_size(n_parties):
        for values in product(range(16), *[range(256)] * (n_parties - 2)):
            chain = ProtocolChain.from_ints(values)
            p = evaluate_chain_dp(chain)
            examined += 1
            if p > best:
                best, best_chain = p, chain
        return SearchResult(n_parties, best, best_chain, examined, HEURISTIC)

    rng = np.random.default_rng(seed)
    n_bits = sum(widths)
    offsets = np.cumsum([0] + widths)

    def to_chain(bits: np.ndarray) -> ProtocolChain:
        values = [
            int("".join(map(str, bits[offsets[k] : offsets[k + 1]])), 2)
            for k in range(len(widths))
        ]
        return ProtocolChain.from_ints(values)

    while examined < budget:
        bits = rng.integers(0, 2, size=n_bits)
        current = evaluate_chain_dp(to_chain(bits))
        examined += 1
        if current > best:
            best, best_chain = current, to_chain(bits)
        improved = True
        while improved and examined < budget:
            improved = False
            for k in rng.permutation(n_bits):
                if examined >= budget:
                    break
                bits[k] ^= 1
                cand = evaluate_chain_dp(to_chain(bits))
                examined += 1
                if cand > current:
                    current, improved = cand, True
                    if cand > best:
                        best, best_chain = cand, to_chain(bits)
                    break
                bits[k] ^= 1
    return SearchResult(n_parties, best, best_chain, examined, HEURISTIC)
