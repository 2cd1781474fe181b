"""Log-domain arithmetic for nonnegative reals far outside float range.

Frequency sequences like b_n = 2**(n**n) overflow any fixed-width float by
n = 5, so every sequence quantity in this package is carried as a natural
log.  A ``LogReal`` is either zero (sign 0) or positive (sign +1) with its
log magnitude stored as a double; sums are evaluated with the usual
max-plus-log1p trick so no intermediate exp ever overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

#: log magnitude used as the sentinel for an exact zero
ZERO_SENTINEL = -math.inf


@dataclass(frozen=True, slots=True)
class LogReal:
    """A nonnegative real stored as (sign, natural log of magnitude)."""

    sign: int
    log_magnitude: float

    def __post_init__(self) -> None:
        if self.sign not in (0, 1):
            raise ValueError(f"sign must be 0 or 1, got {self.sign}")
        if self.sign == 0 and self.log_magnitude != ZERO_SENTINEL:
            raise ValueError("zero LogReal must carry the log sentinel")
        if self.sign == 1 and math.isnan(self.log_magnitude):
            raise ValueError("log magnitude may not be NaN")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "LogReal":
        return LogReal(0, ZERO_SENTINEL)

    @staticmethod
    def one() -> "LogReal":
        return LogReal(1, 0.0)

    @staticmethod
    def from_log(log_magnitude: float) -> "LogReal":
        if log_magnitude == ZERO_SENTINEL:
            return LogReal.zero()
        return LogReal(1, log_magnitude)

    @staticmethod
    def from_float(value: float) -> "LogReal":
        if value < 0:
            raise ValueError("LogReal represents nonnegative values only")
        if value == 0:
            return LogReal.zero()
        return LogReal(1, math.log(value))

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def to_float(self) -> float:
        """Native float value; inf when the magnitude exceeds float range."""
        if self.is_zero:
            return 0.0
        return math.exp(self.log_magnitude) if self.log_magnitude < 710 else math.inf

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "LogReal") -> "LogReal":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        hi, lo = self.log_magnitude, other.log_magnitude
        if lo > hi:
            hi, lo = lo, hi
        return LogReal(1, hi + math.log1p(math.exp(lo - hi)))

    def __mul__(self, other: "LogReal") -> "LogReal":
        if self.is_zero or other.is_zero:
            return LogReal.zero()
        return LogReal(1, self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: "LogReal") -> "LogReal":
        if other.is_zero:
            raise ZeroDivisionError("LogReal division by zero")
        if self.is_zero:
            return LogReal.zero()
        return LogReal(1, self.log_magnitude - other.log_magnitude)

    # -- ordering ------------------------------------------------------------

    def _key(self) -> float:
        return ZERO_SENTINEL if self.is_zero else self.log_magnitude

    def __lt__(self, other: "LogReal") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "LogReal") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "LogReal") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "LogReal") -> bool:
        return self._key() >= other._key()


def log_sum_exp(log_terms: Iterable[float]) -> float:
    """Stable log(sum(exp(t))) over finite log-domain terms.

    The scaled sum is accumulated with ``math.fsum`` (an extended-precision
    accumulator internal to this helper; the result is an ordinary double).
    Terms equal to the zero sentinel are skipped; an empty sum maps to the
    sentinel.
    """
    terms = [t for t in log_terms if t != ZERO_SENTINEL]
    if not terms:
        return ZERO_SENTINEL
    hi = max(terms)
    if math.isinf(hi):
        return hi
    return hi + math.log(math.fsum(math.exp(t - hi) for t in terms))


def log1p_exp(x: float) -> float:
    """log(1 + exp(x)) without overflow for large |x|."""
    if x > 0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))
