"""Noise model for the photonic implementation.

A run counts as a genuine signal detection with probability
``(1 - mu) * eta * t``; it is then correct with probability ``s``. Every
other run (lost photon, missed detection, dark count) ends in a fair guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from scipy.optimize import brentq

from .errors import DegenerateParameters
from .probability import SuccessProbability

ROOT_TOL = 1e-10

__all__ = [
    "NoiseParams",
    "ThresholdReport",
    "effective_success",
    "eta_threshold",
    "bare_eta_threshold",
    "chain_transmissivity",
    "signal_probability",
]


@dataclass(frozen=True)
class NoiseParams:
    eta: float = 1.0
    t: float = 1.0
    mu: float = 0.0
    s: float = 1.0

    def __post_init__(self) -> None:
        for name in ("eta", "t", "mu", "s"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


def signal_probability(params: NoiseParams) -> float:
    return (1 - params.mu) * params.eta * params.t


def _effective(eta: float, t: float, mu: float, s: float) -> float:
    detected = (1 - mu) * eta * t
    return detected * s + (1 - detected) * 0.5


def effective_success(params: NoiseParams) -> float:
    return _effective(params.eta, params.t, params.mu, params.s)


def _as_fraction(p_c) -> Fraction:
    return p_c.fraction if isinstance(p_c, SuccessProbability) else Fraction(p_c)


@dataclass(frozen=True)
class ThresholdReport:
    """Smallest detection efficiency needed to strictly beat ``p_c``.

    ``eta_min`` is an open bound: efficiencies above it win, equality ties.
    """

    p_c: Fraction
    t: float
    mu: float
    s: float
    eta_min: float
    eta_numeric: float | None

    @property
    def achievable(self) -> bool:
        return self.eta_min <= 1.0


def eta_threshold(p_c, t: float = 1.0, mu: float = 0.0, s: float = 1.0) -> ThresholdReport:
    p = _as_fraction(p_c)
    if not Fraction(1, 2) <= p <= 1:
        raise ValueError(f"p_c must lie in [1/2, 1], got {p}")
    NoiseParams(t=t, mu=mu, s=s)
    slope = (1 - mu) * t * (s - 0.5)
    if slope <= 0:
        if p > Fraction(1, 2):
            raise DegenerateParameters(
                f"no detection efficiency beats p_c={p} with t={t}, mu={mu}, s={s}"
            )
        return ThresholdReport(p, t, mu, s, 0.0, None)
    eta_min = float(p - Fraction(1, 2)) / slope
    if eta_min == 0.0:
        return ThresholdReport(p, t, mu, s, 0.0, 0.0)

    # Independent check: root of the affine model on a bracket past eta_min.
    target = float(p)
    numeric = brentq(
        lambda eta: _effective(eta, t, mu, s) - target, 0.0, max(1.0, 2 * eta_min), xtol=1e-15
    )
    if abs(numeric - eta_min) > ROOT_TOL:
        raise AssertionError(f"closed form {eta_min} disagrees with root {numeric}")
    return ThresholdReport(p, t, mu, s, eta_min, numeric)


def bare_eta_threshold(p_c) -> Fraction:
    """``2 p_c - 1``: the threshold when detection efficiency is the only loss."""
    p = _as_fraction(p_c)
    if not Fraction(1, 2) <= p <= 1:
        raise ValueError(f"p_c must lie in [1/2, 1], got {p}")
    return 2 * p - 1


def chain_transmissivity(per_element: float, n_parties: int) -> float:
    if not 0.0 <= per_element <= 1.0:
        raise ValueError(f"per-element transmission must lie in [0, 1], got {per_element}")
    return per_element**n_parties
