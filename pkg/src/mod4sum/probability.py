"""Exact success probabilities stored as integer count pairs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

__all__ = ["SuccessProbability", "parse_rational"]


@total_ordering
@dataclass(frozen=True, eq=False)
class SuccessProbability:
    """``correct / total`` kept as integers; compared by cross-multiplication."""

    correct: int
    total: int

    def __post_init__(self) -> None:
        if self.total <= 0:
            raise ValueError(f"total must be positive, got {self.total}")
        if not 0 <= self.correct <= self.total:
            raise ValueError(f"need 0 <= correct <= total, got {self.correct}/{self.total}")

    @classmethod
    def from_fraction(cls, value: Fraction) -> "SuccessProbability":
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.correct, self.total)

    def __float__(self) -> float:
        return self.correct / self.total

    def _other(self, other):
        if isinstance(other, SuccessProbability):
            return other.correct, other.total
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return f.numerator, f.denominator
        return None

    def __eq__(self, other) -> bool:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.correct * o[1] == o[0] * self.total

    def __lt__(self, other) -> bool:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.correct * o[1] < o[0] * self.total

    def __hash__(self) -> int:
        return hash(self.fraction)

    def __str__(self) -> str:
        f = self.fraction
        return f"{f.numerator}/{f.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"5/8"`` or ``"0.625"`` exactly (decimals keep their literal value)."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc
