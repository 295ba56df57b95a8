"""Exact success probability of deterministic chains.

Two independent evaluators are provided. :func:`evaluate_chain_naive` lists
every promise-compatible input and lets the last party take the most likely
value of F in each ``(x_N, m_{N-1})`` bucket. :func:`evaluate_chain_dp`
propagates counts over the 8 states ``(m, partial sum mod 4)`` party by party
and scores the final distribution the same way, in ``O(N)`` per chain.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (
    SYMBOLS,
    ProtocolChain,
    enumerate_inputs,
    mod4_target,
    parse_chain,
    run_chain,
)
from .errors import InconsistentBoundsError
from .probability import SuccessProbability

REFERENCE_FIRST = "0011"
REFERENCE_INNER = "01011010"

__all__ = [
    "total_inputs",
    "evaluate_chain_naive",
    "evaluate_chain_dp",
    "propagate",
    "final_distribution",
    "guess_table",
    "reference_chain",
    "evaluate_mixture",
    "ignores_some_input",
    "Bound",
    "combine_bounds",
]


def total_inputs(n_parties: int) -> int:
    """Number of promise-satisfying tuples, ``4**N / 2``."""
    return 1 << (2 * n_parties - 1)


def evaluate_chain_naive(chain: ProtocolChain) -> SuccessProbability:
    n = chain.n_parties
    correct = 0
    for x_last in SYMBOLS:
        buckets: dict[int, list[int]] = defaultdict(lambda: [0, 0])
        for inputs in enumerate_inputs(n, fixed_last=x_last):
            buckets[run_chain(chain, inputs)][mod4_target(inputs)] += 1
        correct += sum(max(c) for c in buckets.values())
    return SuccessProbability(correct, total_inputs(n))


def propagate(chain: ProtocolChain) -> list[list[int]]:
    """Counts ``dist[m][s]`` of inputs ``x_1..x_{N-1}`` by final message and sum mod 4."""
    first, *inner = chain.tables
    dist = [[0] * 4 for _ in range(2)]
    for x in SYMBOLS:
        dist[first.bits[x]][x] += 1
    for table in inner:
        new = [[0] * 4 for _ in range(2)]
        for m in (0, 1):
            for s in range(4):
                c = dist[m][s]
                if c:
                    for x in SYMBOLS:
                        new[table.bits[2 * x + m]][(s + x) % 4] += c
        dist = new
    return dist


def final_distribution(dist: Sequence[Sequence[int]]) -> dict[tuple[int, int], tuple[int, int]]:
    """Map ``(x_N, m)`` to the pair ``(#F=0, #F=1)`` for the last party's bucket."""
    out = {}
    for x_last in SYMBOLS:
        for m in (0, 1):
            counts = [0, 0]
            for s in range(4):
                if (s + x_last) % 2 == 0:
                    counts[((s + x_last) % 4) // 2] += dist[m][s]
            out[(x_last, m)] = (counts[0], counts[1])
    return out


def evaluate_chain_dp(chain: ProtocolChain) -> SuccessProbability:
    buckets = final_distribution(propagate(chain))
    correct = sum(max(c) for c in buckets.values())
    return SuccessProbability(correct, total_inputs(chain.n_parties))


def guess_table(chain: ProtocolChain) -> dict[tuple[int, int], int]:
    """Last party's most likely F per ``(x_N, m)``; ties go to 0."""
    return {
        key: int(c1 > c0)
        for key, (c0, c1) in final_distribution(propagate(chain)).items()
    }


def reference_chain(n_parties: int) -> ProtocolChain:
    """First table 0011 followed by ``N - 2`` copies of 01011010."""
    if n_parties < 3:
        raise ValueError(f"need at least 3 parties, got {n_parties}")
    return parse_chain("|".join([REFERENCE_FIRST] + [REFERENCE_INNER] * (n_parties - 2)))


def evaluate_mixture(chains: Sequence[ProtocolChain], weights: Sequence[Fraction]) -> Fraction:
    """Success of a shared-randomness mixture of deterministic chains.

    The last party knows which chain was drawn, so each run is scored with
    that chain's own guess table and the result is the weighted average.
    """
    if len(chains) != len(weights) or not chains:
        raise ValueError("need one weight per chain and at least one chain")
    weights = [Fraction(w) for w in weights]
    if any(w < 0 for w in weights) or sum(weights) != 1:
        raise ValueError("weights must be non-negative and sum to 1")
    return sum(
        (w * evaluate_chain_dp(c).fraction for c, w in zip(chains, weights)), Fraction(0)
    )


def ignores_some_input(chain: ProtocolChain) -> bool:
    """True if the final message is unchanged by shifting some ``x_i`` (``i < N``) by 2.

    Such a shift flips F while keeping the promise, so the last party cannot
    tell the two cases apart.
    """
    n = chain.n_parties
    for i in range(n - 1):
        if all(
            run_chain(chain, inp)
            == run_chain(
                chain, inp.symbols[:i] + ((inp[i] + 2) % 4,) + inp.symbols[i + 1 :]
            )
            for inp in enumerate_inputs(n)
        ):
            return True
    return False


@dataclass(frozen=True)
class Bound:
    """Known range for the optimal success probability at one party count."""

    n_parties: int
    lower: Fraction
    upper: Fraction

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def _frac(p) -> Fraction:
    return p.fraction if isinstance(p, SuccessProbability) else Fraction(p)


def combine_bounds(
    exact_at: Mapping[int, SuccessProbability | Fraction],
    lower_at: Mapping[int, SuccessProbability | Fraction],
    n_values: Sequence[int] = (),
) -> dict[int, Bound]:
    """Combine exhaustive optima with lower bounds using monotonicity in N.

    The optimum cannot increase with N, so the smallest exact value at any
    ``N' <= N`` caps ``N``. Raises InconsistentBoundsError if a lower bound
    exceeds that cap.
    """
    exact = {n: _frac(p) for n, p in exact_at.items()}
    lower = {n: _frac(p) for n, p in lower_at.items()}
    out = {}
    for n in sorted(set(exact) | set(lower) | set(n_values)):
        caps = [v for k, v in exact.items() if k <= n]
        upper = min(caps) if caps else Fraction(1)
        lo = max(lower.get(n, Fraction(0)), exact.get(n, Fraction(0)))
        if lo > upper:
            raise InconsistentBoundsError(
                f"N={n}: lower bound {lo} exceeds upper bound {upper}"
            )
        out[n] = Bound(n, lo, upper)
    return out
