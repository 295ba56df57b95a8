"""Single-qubit relay protocol.

The qubit starts in ``(|0> + |1>)/sqrt(2)``; party ``j`` multiplies the
``|1>`` amplitude by ``i**x_j``. Under the promise the accumulated phase is
``pi * F`` so a measurement in the ``+/-`` basis returns F with certainty.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

from .core import InputTuple, enumerate_inputs, mod4_target
from .errors import PromiseViolation

NORM_TOL = 1e-12
_PHASES = (1, 1j, -1, -1j)  # exact i**x, no rounding from exp()

__all__ = [
    "QubitState",
    "plus_state",
    "apply_phase",
    "measure_diagonal",
    "accumulated_phase",
    "run_quantum",
    "final_state",
    "verify_ideal",
]


@dataclass(frozen=True)
class QubitState:
    amp0: complex
    amp1: complex

    @property
    def norm(self) -> float:
        return abs(self.amp0) ** 2 + abs(self.amp1) ** 2

    def isclose(self, other: "QubitState", tol: float = NORM_TOL) -> bool:
        return abs(self.amp0 - other.amp0) <= tol and abs(self.amp1 - other.amp1) <= tol


def plus_state() -> QubitState:
    r = 1 / math.sqrt(2)
    return QubitState(complex(r), complex(r))


def apply_phase(state: QubitState, x: int) -> QubitState:
    """Phase shift by ``x * pi/2`` on the ``|1>`` amplitude."""
    if not 0 <= x <= 3:
        raise ValueError(f"phase symbol must be in [0, 3], got {x}")
    return QubitState(state.amp0, state.amp1 * _PHASES[x])


def apply_angle(state: QubitState, angle: float) -> QubitState:
    """General phase shift, used to cross-check the quarter-turn table."""
    return QubitState(state.amp0, state.amp1 * cmath.exp(1j * angle))


def measure_diagonal(state: QubitState) -> tuple[float, float]:
    """Outcome probabilities in the ``{|+>, |->}`` basis."""
    p0 = abs(state.amp0 + state.amp1) ** 2 / 2
    p1 = abs(state.amp0 - state.amp1) ** 2 / 2
    return p0, p1


def accumulated_phase(symbols: Sequence[int]) -> int:
    """Total phase in quarter turns, modulo 4."""
    return sum(symbols) % 4


def final_state(inputs: InputTuple | Sequence[int]) -> QubitState:
    state = plus_state()
    for x in inputs:
        state = apply_phase(state, x)
    return state


def run_quantum(inputs: InputTuple | Sequence[int]) -> int:
    """Deterministic measurement outcome: 1 iff the accumulated phase is pi.

    The integer accumulator decides the outcome; the amplitude simulation is
    run alongside and must agree with it.
    """
    symbols = tuple(inputs)
    quarter_turns = accumulated_phase(symbols)
    if quarter_turns % 2:
        raise PromiseViolation(
            f"odd phase {quarter_turns}*pi/2 leaves no definite outcome for {symbols}"
        )
    outcome = quarter_turns // 2
    p0, p1 = measure_diagonal(final_state(symbols))
    if abs((p1 if outcome else p0) - 1) > NORM_TOL:
        raise AssertionError(f"amplitude simulation disagrees for {symbols}: {(p0, p1)}")
    return outcome


def verify_ideal(n_parties: int) -> bool:
    """True iff the protocol returns F on every promise-satisfying input."""
    return all(
        run_quantum(inputs) == mod4_target(inputs) for inputs in enumerate_inputs(n_parties)
    )
