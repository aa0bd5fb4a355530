"""Exact integer number theory for moduli below 2**63.

Primality, factorization, the classical arithmetic functions and the
residue / primitive-root tests that everything else is built on.  All
functions are pure; Python integers give the 128-bit intermediates needed
for modular products of 64-bit operands for free.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterator

import numpy as np

from .errors import NotPrime

__all__ = [
    "FactoredInteger",
    "ResidueClass",
    "QnrnpWitness",
    "is_prime",
    "factorize",
    "euler_phi",
    "omega",
    "big_omega",
    "mobius",
    "jacobi_symbol",
    "legendre_symbol",
    "euler_criterion",
    "classify_residue",
    "is_primitive_root",
    "is_qnrnp",
    "primes_first",
    "nth_prime",
    "primorial",
    "primes_in_range",
    "SMALL_PRIMES",
]

_TRIAL_LIMIT = 100_000


def _sieve(limit: int) -> np.ndarray:
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if mask[q]:
            mask[q * q :: q] = False
    return np.flatnonzero(mask)


# primes below 10^5, used for trial division and as sieve seeds
SMALL_PRIMES: tuple[int, ...] = tuple(int(q) for q in _sieve(_TRIAL_LIMIT))
_SMALL_PRIME_SET = frozenset(SMALL_PRIMES)

# Jaeschke/Sorenson: the first 12 primes as Miller-Rabin bases are a
# deterministic test for n < 3.3 * 10^24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test, exact for every n < 3.3e24."""
    if n < 2:
        return False
    if n <= _TRIAL_LIMIT:
        return n in _SMALL_PRIME_SET
    for q in SMALL_PRIMES[:25]:
        if n % q == 0:
            return False
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FactoredInteger:
    """A positive integer together with its prime factorization.

    ``factors`` holds ``(prime, exponent)`` pairs in strictly increasing
    prime order.  Construction checks the product and the ordering; the
    (more expensive) primality of each factor is checked by :meth:`validate`.
    """

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((int(q), int(e)) for q, e in self.factors))
        if self.value < 1:
            raise ValueError(f"value must be positive, got {self.value}")
        prev = 1
        prod = 1
        for q, e in self.factors:
            if q <= prev or e < 1:
                raise ValueError(f"factors must be increasing primes with positive exponents: {self.factors}")
            prev = q
            prod *= q**e
        if prod != self.value:
            raise ValueError(f"factors multiply to {prod}, not {self.value}")

    @classmethod
    def from_dict(cls, factors: dict[int, int]) -> "FactoredInteger":
        items = tuple(sorted(factors.items()))
        return cls(math.prod(q**e for q, e in items), items)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def __mul__(self, other: "FactoredInteger") -> "FactoredInteger":
        merged = dict(self.factors)
        for q, e in other.factors:
            merged[q] = merged.get(q, 0) + e
        return FactoredInteger.from_dict(merged)

    def validate(self) -> None:
        """Raise ValueError unless every listed prime really is prime."""
        for q, _ in self.factors:
            if not is_prime(q):
                raise ValueError(f"{q} is listed as a prime factor of {self.value} but is composite")

    def divisors(self, squarefree_only: bool = False) -> list[int]:
        divs = [1]
        for q, e in self.factors:
            top = 1 if squarefree_only else e
            divs = [d * q**i for d in divs for i in range(top + 1)]
        return sorted(divs)


def _pollard_brent(n: int) -> int:
    """Return a non-trivial factor of the odd composite n."""
    if n % 2 == 0:
        return 2
    c = 1
    while True:
        y, r, q, g = 2, 1, 1, 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            # batched gcd overshot, walk back one step at a time
            while True:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
                if g > 1:
                    break
        if g != n:
            return g
        c += 1


def _split(n: int, out: dict[int, int]) -> None:
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _split(d, out)
    _split(n // d, out)


def factorize(n: int) -> FactoredInteger:
    """Complete factorization: trial division below 10^5, then Pollard-Brent rho."""
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    value = n
    found: dict[int, int] = {}
    if not n & 1:
        s = (n & -n).bit_length() - 1
        found[2] = s
        n >>= s
    for q in SMALL_PRIMES[1:]:
        if q * q > n:
            break
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            found[q] = e
    if n > 1:
        if n < _TRIAL_LIMIT * _TRIAL_LIMIT:
            found[n] = found.get(n, 0) + 1
        else:
            _split(n, found)
    return FactoredInteger(value, tuple(sorted(found.items())))


def euler_phi(f: FactoredInteger) -> int:
    return reduce(lambda acc, qe: acc * qe[0] ** (qe[1] - 1) * (qe[0] - 1), f.factors, 1)


def omega(f: FactoredInteger) -> int:
    """Number of distinct prime divisors."""
    return len(f.factors)


def big_omega(f: FactoredInteger) -> int:
    """Number of prime divisors counted with multiplicity."""
    return sum(e for _, e in f.factors)


def mobius(f: FactoredInteger) -> int:
    if not f.is_squarefree:
        return 0
    return -1 if len(f.factors) % 2 else 1


class ResidueClass(enum.IntEnum):
    """Quadratic character of n modulo an odd prime; values are the Legendre symbol."""

    RESIDUE = 1
    NON_RESIDUE = -1
    ZERO = 0


def jacobi_symbol(a: int, n: int) -> int:
    """Binary Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or not n & 1:
        raise ValueError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    t = 1
    while a:
        while not a & 1:
            a >>= 1
            if n & 7 in (3, 5):
                t = -t
        a, n = n, a
        if a & 3 == 3 and n & 3 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def legendre_symbol(n: int, p: int) -> int:
    """Legendre symbol (n/p) for an odd prime p, via the binary Jacobi algorithm."""
    return jacobi_symbol(n, p)


def euler_criterion(n: int, p: int) -> int:
    """Legendre symbol by Euler's criterion n^((p-1)/2) mod p; slow reference path."""
    r = pow(n, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


def classify_residue(n: int, p: int) -> ResidueClass:
    return ResidueClass(legendre_symbol(n, p))


def _factors_of_p_minus_1(p: int, f: FactoredInteger | None) -> FactoredInteger:
    if f is None:
        return factorize(p - 1)
    if f.value != p - 1:
        raise ValueError(f"factorization is of {f.value}, expected p-1 = {p - 1}")
    return f


def is_primitive_root(n: int, p: int, f: FactoredInteger | None = None) -> bool:
    """True iff n generates the multiplicative group mod p.

    ``f`` is the factorization of p-1; it is computed when omitted.
    """
    f = _factors_of_p_minus_1(p, f)
    if n % p == 0:
        return False
    if p == 2:
        return n % 2 == 1
    return all(pow(n, (p - 1) // q, p) != 1 for q in f.primes)


def is_qnrnp(n: int, p: int, f: FactoredInteger | None = None) -> bool:
    """True iff n is a quadratic non-residue mod p that is not a primitive root.

    A non-residue already has n^((p-1)/2) = -1, so only the odd prime
    divisors of p-1 need the subgroup test.
    """
    if legendre_symbol(n, p) != -1:
        return False
    f = _factors_of_p_minus_1(p, f)
    return any(pow(n, (p - 1) // q, p) == 1 for q in f.primes if q != 2)


def _prime_iter() -> Iterator[int]:
    yield from SMALL_PRIMES
    n = SMALL_PRIMES[-1] + 2
    while True:
        if is_prime(n):
            yield n
        n += 2


def primes_first(m: int) -> list[int]:
    """The first m primes in increasing order."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m <= len(SMALL_PRIMES):
        return list(SMALL_PRIMES[:m])
    # p_m < m (log m + log log m) for m >= 6
    bound = int(m * (math.log(m) + math.log(math.log(m)))) + 10
    return [int(q) for q in _sieve(bound)[:m]]


def nth_prime(i: int) -> int:
    """The i-th prime, 1-indexed (nth_prime(1) == 2)."""
    if i < 1:
        raise ValueError("primes are 1-indexed")
    return primes_first(i)[-1]


def primorial(m: int) -> int:
    """Product of the first m primes."""
    return math.prod(primes_first(m))


def primes_in_range(lo: int, hi: int) -> Iterator[int]:
    """Every prime in [lo, hi] in ascending order, from a segmented sieve."""
    from .sieve import prime_segments

    for seg in prime_segments(lo, hi + 1):
        yield from (int(q) for q in seg)


@dataclass(frozen=True)
class QnrnpWitness:
    """A prime p with n and n+1 both QNRNPs modulo p."""

    p: int
    n: int

    @property
    def pair(self) -> tuple[int, int]:
        return (self.n, self.n + 1)

    def check(self, f: FactoredInteger | None = None) -> bool:
        f = _factors_of_p_minus_1(self.p, f)
        return 2 <= self.n <= self.p - 2 and is_qnrnp(self.n, self.p, f) and is_qnrnp(self.n + 1, self.p, f)


def require_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")

