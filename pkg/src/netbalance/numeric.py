"""Floating-point comparison policy shared by all balance checks."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerance:
    """Combined relative/absolute closeness test.

    a and b are considered equal iff |a - b| <= abs + rel * max(|a|, |b|).
    """

    rel: float = 1e-9
    abs: float = 1e-12

    def __post_init__(self):
        if self.rel < 0 or self.abs < 0:
            raise ValueError("tolerances must be nonnegative")

    def close(self, a: float, b: float) -> bool:
        return abs(a - b) <= self.abs + self.rel * max(abs(a), abs(b))

    def compare(self, a: float, b: float) -> int:
        """Total trichotomy: 0 if a ~ b, +1 if a > b beyond tolerance, -1 if a < b."""
        if self.close(a, b):
            return 0
        return 1 if a > b else -1


DEFAULT_TOLERANCE = Tolerance()
