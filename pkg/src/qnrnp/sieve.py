"""Segmented sieves over [lo, hi) with memory bounded by the segment size.

Two flavours: plain prime segments, and a factor-data sieve that gives, for
every integer in a window, the number of distinct prime factors, the number
counted with multiplicity and a floating-point phi(m)/m.  The float ratio is
only ever used as a pre-filter; callers confirm with exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .ntheory import SMALL_PRIMES, _sieve

DEFAULT_SEGMENT = 1 << 21

_SMALL = np.array(SMALL_PRIMES, dtype=np.int64)


def base_primes(limit: int) -> np.ndarray:
    """All primes <= limit as int64."""
    if limit <= SMALL_PRIMES[-1]:
        return _SMALL[: np.searchsorted(_SMALL, limit, side="right")]
    return _sieve(limit).astype(np.int64)


def prime_segments(lo: int, hi: int, segment: int = DEFAULT_SEGMENT) -> Iterator[np.ndarray]:
    """Yield int64 arrays holding the primes of [lo, hi), one window at a time."""
    lo = max(lo, 2)
    if hi <= lo:
        return
    seeds = base_primes(math.isqrt(hi - 1))
    start = lo
    while start < hi:
        stop = min(start + segment, hi)
        mask = np.ones(stop - start, dtype=bool)
        for q in seeds:
            q = int(q)
            if q * q >= stop:
                break
            first = max(q * q, -(-start // q) * q)
            mask[first - start :: q] = False
        if start < 2:
            mask[: 2 - start] = False
        yield np.flatnonzero(mask).astype(np.int64) + start
        start = stop


def count_primes(lo: int, hi: int, segment: int = DEFAULT_SEGMENT) -> int:
    """Number of primes in [lo, hi]."""
    return sum(len(s) for s in prime_segments(lo, hi + 1, segment))


@dataclass
class FactorData:
    """Per-integer arithmetic data for the window [start, start + len)."""

    start: int
    omega: np.ndarray  # distinct primes, excluding any skipped primes
    big_omega: np.ndarray  # with multiplicity, skipped primes included
    ratio: np.ndarray  # product of (1 - 1/q) over counted primes

    def __len__(self):
        return len(self.omega)


def factor_data(start: int, stop: int, skip: Iterable[int] = ()) -> FactorData:
    """Factor-count sieve over the integers of [start, stop), start >= 1.

    Primes in ``skip`` are divided out (they still count towards big_omega)
    but contribute neither to ``omega`` nor to ``ratio``; the search pipeline
    passes the primes of its forced divisor here and adds them back itself.
    """
    skip = frozenset(int(q) for q in skip)
    size = stop - start
    rem = np.arange(start, stop, dtype=np.int64)
    om = np.zeros(size, dtype=np.int16)
    big = np.zeros(size, dtype=np.int16)
    ratio = np.ones(size, dtype=np.float64)
    limit = max(math.isqrt(stop - 1), max(skip, default=0))
    for q in base_primes(limit):
        q = int(q)
        first = -(-start // q) * q - start
        if first >= size:
            continue
        if q not in skip:
            om[first::q] += 1
            ratio[first::q] *= 1.0 - 1.0 / q
        qe = q
        while qe < stop:
            first = -(-start // qe) * qe - start
            if first >= size:
                break
            rem[first::qe] //= q
            big[first::qe] += 1
            qe *= q
    # what is left above the seed bound is a single large prime
    tail = rem > 1
    om[tail] += 1
    big[tail] += 1
    ratio[tail] *= 1.0 - 1.0 / rem[tail]
    return FactorData(start, om, big, ratio)
