"""Replayable resolution of specification nondeterminism."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .timebase import ZERO, Time, as_time

POLICIES = ("minimal", "maximal", "uniform")

# resolution of uniform draws
_GRID = 1 << 20


@dataclass(frozen=True)
class AdversaryStrategy:
    """Chooses among feasible behaviours, deterministically per decision key.

    Every decision is keyed (for instance by submodule id and the time of the
    triggering event), so two runs that share a seed make identical choices
    for identical events even if other events differ.
    """

    seed: int = 0
    policy: str = "uniform"
    min_delay: Time = ZERO

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}; expected one of {POLICIES}")
        object.__setattr__(self, "min_delay", as_time(self.min_delay))

    def rng(self, key: str) -> random.Random:
        return random.Random(f"{self.seed}|{key}")

    def unit(self, key: str, open_low: bool = False) -> Fraction:
        """A rational in ``[0, 1]`` (``(0, 1]`` with ``open_low``)."""
        if self.policy == "minimal":
            return Fraction(1, _GRID) if open_low else Fraction(0)
        if self.policy == "maximal":
            return Fraction(1)
        k = self.rng(key).randint(1 if open_low else 0, _GRID)
        return Fraction(k, _GRID)

    def pick(self, key: str, lo, hi, open_low: bool = False) -> Time:
        lo, hi = as_time(lo), as_time(hi)
        if hi < lo:
            raise ValueError(f"empty choice range [{lo}, {hi}]")
        return lo + (hi - lo) * self.unit(key, open_low)

    def delay(self, key: str, d: Time) -> Time:
        """A channel delay in ``[min_delay, d]``."""
        lo = self.min_delay if self.min_delay <= d else d
        return self.pick(key, lo, d)

    def with_seed(self, seed: int) -> "AdversaryStrategy":
        return AdversaryStrategy(seed, self.policy, self.min_delay)

    def with_policy(self, policy: str) -> "AdversaryStrategy":
        return AdversaryStrategy(self.seed, policy, self.min_delay)


def random_rational(rng: random.Random, lo, hi, grid: int = 1 << 12) -> Time:
    """Uniform draw from a rational grid on ``[lo, hi]``."""
    lo, hi = as_time(lo), as_time(hi)
    return lo + (hi - lo) * Fraction(rng.randint(0, grid), grid)


def hostile_signal(strategy: AdversaryStrategy, key: str, interval, rate=10):
    """Arbitrary replayable signal with at most ``ceil(rate * |interval|)`` transitions."""
    from .signals import Signal

    rate = Fraction(rate)
    length = interval.hi - interval.lo
    cap = (length * rate).floor()
    if length * rate != Time(cap):
        cap += 1
    rng = strategy.rng(f"byz|{key}")
    n = rng.randint(0, max(cap, 0))
    times = sorted({random_rational(rng, interval.lo, interval.hi, 1 << 16) for _ in range(n)})
    times = [t for t in times if t > interval.lo]
    return Signal(interval, rng.randint(0, 1), tuple(times))
