"""
Closed exchange-ratio intervals on [0, +inf] that may be empty or unbounded above.
"""
import math
from dataclasses import dataclass

from src.errors import EmptyIntervalError


@dataclass(frozen=True)
class ExtendedInterval:
    """A closed interval [lower, upper] with 0 <= lower <= upper <= +inf.

    Emptiness is decided by a strict lower > upper comparison with no
    tolerance. Endpoints of an empty interval raise when read.
    """
    _lower: float = math.nan
    _upper: float = math.nan
    empty: bool = True

    @classmethod
    def make(cls, lower: float, upper: float) -> 'ExtendedInterval':
        """Intersect [lower, upper] with r >= 0"""
        if math.isnan(lower) or math.isnan(upper):
            return EMPTY
        lower = max(0.0, lower)
        if lower == math.inf or lower > upper:
            return EMPTY
        return cls(lower, upper, False)

    @property
    def lower(self) -> float:
        if self.empty:
            raise EmptyIntervalError("lower bound of an empty interval")
        return self._lower

    @property
    def upper(self) -> float:
        if self.empty:
            raise EmptyIntervalError("upper bound of an empty interval")
        return self._upper

    @property
    def bounded(self) -> bool:
        return not self.empty and math.isfinite(self._upper)

    @property
    def degenerate(self) -> bool:
        return not self.empty and self._lower == self._upper

    def contains(self, r: float) -> bool:
        return not self.empty and self._lower <= r <= self._upper

    def intersect(self, other: 'ExtendedInterval') -> 'ExtendedInterval':
        if self.empty or other.empty:
            return EMPTY
        return ExtendedInterval.make(max(self._lower, other._lower), min(self._upper, other._upper))

    def width(self, clamp: float = math.inf) -> float:
        """Width after truncating the upper end at clamp; 0 when empty"""
        if self.empty:
            return 0.0
        return max(0.0, min(self._upper, clamp) - self._lower)

    def __str__(self) -> str:
        if self.empty:
            return "empty"
        upper = "+inf)" if self._upper == math.inf else f"{self._upper:.6g}]"
        return f"[{self._lower:.6g}, {upper}"


EMPTY = ExtendedInterval()
