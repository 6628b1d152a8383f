"""Prime intervals, sampling, and exact counting.

The integer decompositions draw moduli as uniform primes from dyadic
intervals [k, 2k] with k = ceil(c * n * ln(2M) * lnln(2M)).  The constant c
defaults to the analysis-grade 50 and is configuration: benchmarks scale it
down and record the value used.  Primality is a deterministic Miller-Rabin
for 64-bit inputs; counting is a segmented sieve with a configurable budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError

DEFAULT_PRIME_CONSTANT = 50.0
DEFAULT_SIEVE_MAX = 1 << 34

# Deterministic witness set for n < 3.3 * 10^24 (covers all 64-bit inputs).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class PrimeInterval:
    """Inclusive dyadic interval [lo, 2*lo] with its construction inputs."""

    lo: int
    hi: int
    count_target: int
    max_value: int
    constant: float

    def __contains__(self, p: int) -> bool:
        return self.lo <= p <= self.hi


def prime_interval(count_target: int, max_value: int, constant: float = DEFAULT_PRIME_CONSTANT) -> PrimeInterval:
    """The interval [k, 2k] with k = ceil(c * n * ln(2M) * lnln(2M))."""
    if max_value < 8:
        raise ValueError("max_value must be >= 8; use the trivial small-universe path")
    if count_target < 1:
        raise ValueError("count_target must be >= 1")
    if not constant > 0:
        raise ValueError("constant must be positive")
    two_m = 2 * max_value
    lo = math.ceil(constant * count_target * math.log(two_m) * math.log(math.log(two_m)) - 1e-12)
    lo = max(2, lo)
    return PrimeInterval(lo=lo, hi=2 * lo, count_target=count_target, max_value=max_value, constant=constant)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 2^64."""
    if n >= 1 << 64:
        raise ValueError("primality check limited to 64-bit inputs")
    if n < 2:
        return False
    for p in _MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sample_prime(interval: PrimeInterval, rng: np.random.Generator, max_attempts: int = 10000) -> int:
    """Uniform prime in the interval, by rejection over uniform integers."""
    for _ in range(max_attempts):
        candidate = int(rng.integers(interval.lo, interval.hi + 1))
        if is_prime(candidate):
            return candidate
    raise RuntimeError(
        f"no prime found in [{interval.lo}, {interval.hi}] after {max_attempts} draws; "
        "the interval is likely misconstructed"
    )


def _small_primes(limit: int) -> np.ndarray:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)


def count_primes(interval: PrimeInterval, sieve_max: int = DEFAULT_SIEVE_MAX, segment: int = 1 << 22) -> int:
    """Exact number of primes in [lo, hi] via a segmented sieve."""
    lo, hi = interval.lo, interval.hi
    if hi > sieve_max:
        raise BudgetExceededError(f"sieve bound {hi} exceeds budget {sieve_max}")
    base = _small_primes(math.isqrt(hi) + 1)
    count = 0
    for seg_lo in range(lo, hi + 1, segment):
        seg_hi = min(hi, seg_lo + segment - 1)
        marks = np.ones(seg_hi - seg_lo + 1, dtype=bool)
        if seg_lo <= 1:
            marks[: max(0, 2 - seg_lo)] = False
        for p in base.tolist():
            if p * p > seg_hi:
                break
            start = max(p * p, ((seg_lo + p - 1) // p) * p)
            marks[start - seg_lo :: p] = False
        # base primes that fall inside the segment were never struck
        count += int(marks.sum())
    return count
