"""Exact evaluation of the sieve inequalities for two consecutive QNRNPs.

For a prime p with omega = omega(p-1), put

    B     = sum_{nu=1}^{2k} C(omega, nu)
    theta = eps - sum_{nu=2k+1, nu odd}^{omega} P^nu / nu!

where P bounds the sum of 1/q over the primes q | p-1 and
eps <= 1/2 - phi(p-1)/(p-1).  If theta > 0 then p has two consecutive
QNRNPs whenever

    p > 4 (B theta + B^2)^2 / theta^4        (tail threshold)

provided sqrt(p) > B / theta                 (monotonicity guard).

The guard is implied by the threshold: 4(B theta + B^2)^2 / theta^4 is
always larger than (B / theta)^2.  Everything here is exact rational
arithmetic except :func:`large_omega_check`, which uses outward-rounded
interval arithmetic for its logarithms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath

from .errors import NonPositiveTheta, NoValidK
from .ntheory import FactoredInteger, euler_phi, factorize, primes_first, primorial

QUARTER = Fraction(1, 4)


def as_fraction(eps) -> Fraction:
    """Accept a Fraction, int or 'a/b' string; floats are refused as ambiguous."""
    if isinstance(eps, float):
        raise TypeError("epsilon must be exact; pass a Fraction or a string like '1/4'")
    return Fraction(eps)


@dataclass(frozen=True)
class CriterionParams:
    omega: int
    k: int
    epsilon: Fraction
    P: Fraction

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        object.__setattr__(self, "P", Fraction(self.P))
        if self.omega < 1 or self.k < 1:
            raise ValueError(f"omega and k must be >= 1 (omega={self.omega}, k={self.k})")
        if not 0 < self.epsilon <= Fraction(1, 2):
            raise ValueError(f"epsilon must lie in (0, 1/2], got {self.epsilon}")
        if self.P < 0:
            raise ValueError("P must be non-negative")


@dataclass(frozen=True)
class CriterionEvaluation:
    params: CriterionParams
    theta_lower: Fraction
    binom_sum: int
    threshold: Fraction
    clod_floor: int

    def certifies(self, p: int) -> bool:
        return p > self.threshold and p >= self.clod_floor


@dataclass(frozen=True)
class SearchInterval:
    """Candidate primes p with lower <= p <= upper, omega(p-1) = omega and D | p-1."""

    omega: int
    lower: int
    upper: int
    k_used: int = 0
    D: int = 1
    threshold: Fraction | None = field(default=None, compare=False)

    @property
    def empty(self) -> bool:
        return self.lower > self.upper

    @property
    def width(self) -> int:
        return max(0, self.upper - self.lower + 1)

    def display(self, digits: int = 3) -> tuple[str, str]:
        """Endpoints at ``digits`` significant figures, rounded outward."""
        return (sig_round(self.lower, digits, up=False), sig_round(self.upper, digits, up=True))

    def rounded(self, digits: int = 3) -> "SearchInterval":
        """The superset interval whose endpoints are the outward-rounded display values."""
        lo, hi = (int(Fraction(s)) for s in self.display(digits))
        return SearchInterval(self.omega, min(lo, self.lower), max(hi, self.upper), self.k_used, self.D, self.threshold)


def sig_round(x, digits: int = 3, up: bool = True) -> str:
    """Format a positive rational with ``digits`` significant figures, rounding up or down."""
    x = Fraction(x)
    if x <= 0:
        return "0"
    e = math.floor(math.log10(x.numerator) - math.log10(x.denominator))
    # log10 can be off by one near powers of ten
    while Fraction(10) ** e > x:
        e -= 1
    while Fraction(10) ** (e + 1) <= x:
        e += 1
    scale = Fraction(10) ** (e - digits + 1)
    q = x / scale
    m = math.ceil(q) if up else math.floor(q)
    if m >= 10**digits:
        m //= 10
        e += 1
    mant = str(m)
    mant = mant[0] + ("." + mant[1:] if len(mant) > 1 else "")
    return f"{mant}e{e}"


def prime_reciprocal_sum(primes: Sequence[int]) -> Fraction:
    if len(set(primes)) != len(primes):
        raise ValueError("primes must be distinct")
    return sum((Fraction(1, q) for q in primes), Fraction(0))


@lru_cache(maxsize=None)
def first_primes_reciprocal_sum(m: int) -> Fraction:
    return prime_reciprocal_sum(primes_first(m))


def theta_tail(omega: int, k: int, P: Fraction, odd_only: bool = True) -> Fraction:
    """sum_{nu = 2k+1}^{omega} P^nu / nu!, over odd nu only unless ``odd_only`` is False.

    Dropping the even terms is legitimate because mu(d) = +1 on those
    divisors, so they can only increase theta.
    """
    P = Fraction(P)
    total = Fraction(0)
    step = 2 if odd_only else 1
    for nu in range(2 * k + 1, omega + 1, step):
        total += P**nu / math.factorial(nu)
    return total


def theta_lower_bound(params: CriterionParams, odd_only: bool = True) -> Fraction:
    return params.epsilon - theta_tail(params.omega, params.k, params.P, odd_only)


def theta_exact(p: int, k: int, f: FactoredInteger | None = None) -> Fraction:
    """The true theta_k(p) = 1/2 - phi(p-1)/(p-1) + sum over squarefree d | p-1
    with omega(d) >= 2k+1 of mu(d)/d."""
    if f is None:
        f = factorize(p - 1)
    qs = f.primes
    total = Fraction(1, 2) - Fraction(euler_phi(f), p - 1)
    for nu in range(2 * k + 1, len(qs) + 1):
        sign = -1 if nu % 2 else 1
        total += sign * sum(Fraction(1, math.prod(c)) for c in itertools.combinations(qs, nu))
    return total


def binom_sum(omega: int, k: int) -> int:
    return sum(math.comb(omega, nu) for nu in range(1, min(2 * k, omega) + 1))


def _positive_theta(params: CriterionParams, odd_only: bool) -> Fraction:
    theta = theta_lower_bound(params, odd_only)
    if theta <= 0:
        raise NonPositiveTheta(f"theta lower bound {float(theta):.4g} <= 0 for {params}")
    return theta


def tail_threshold(params: CriterionParams, odd_only: bool = True) -> Fraction:
    """4 (B theta + B^2)^2 / theta^4; primes above it are certified."""
    theta = _positive_theta(params, odd_only)
    b = binom_sum(params.omega, params.k)
    return 4 * (b * theta + b * b) ** 2 / theta**4


def clod_floor(params: CriterionParams, odd_only: bool = True) -> int:
    """Smallest integer p0 with theta > B / sqrt(p0), i.e. p0 > (B/theta)^2.

    Above this point the criterion is increasing in theta, which is what
    lets a lower bound for theta stand in for its true value.
    """
    theta = _positive_theta(params, odd_only)
    b = binom_sum(params.omega, params.k)
    return math.floor((b / theta) ** 2) + 1


def evaluate(params: CriterionParams, odd_only: bool = True) -> CriterionEvaluation:
    theta = _positive_theta(params, odd_only)
    b = binom_sum(params.omega, params.k)
    return CriterionEvaluation(
        params=params,
        theta_lower=theta,
        binom_sum=b,
        threshold=4 * (b * theta + b * b) ** 2 / theta**4,
        clod_floor=math.floor((b / theta) ** 2) + 1,
    )


def optimal_k(omega: int, epsilon, P, odd_only: bool = True) -> tuple[int, Fraction]:
    """The k in [1, omega] with the smallest tail threshold; ties go to the smaller k.

    Only k with a positive theta lower bound qualify.  No separate guard
    condition is imposed because every p above the threshold already
    satisfies it.
    """
    eps = as_fraction(epsilon)
    P = Fraction(P)
    # tail sums for every k from one pass over the terms P^nu / nu!
    term = [Fraction(0)] * (omega + 2)
    power = Fraction(1)
    for nu in range(1, omega + 1):
        power *= P
        term[nu] = power / math.factorial(nu)
    suffix = [Fraction(0)] * (omega + 3)
    for nu in range(omega, 0, -1):
        suffix[nu] = term[nu] + suffix[nu + (2 if odd_only else 1)]
    best: tuple[int, Fraction] | None = None
    for k in range(1, max(omega, 1) + 1):
        theta = eps - (suffix[2 * k + 1] if 2 * k + 1 <= omega else 0)
        if theta <= 0:
            continue
        b = binom_sum(omega, k)
        t = 4 * (b * theta + b * b) ** 2 / theta**4
        if best is None or t < best[1]:
            best = (k, t)
    if best is None:
        raise NoValidK(f"no k in [1, {omega}] gives a positive theta for epsilon={eps}, P={float(P):.4f}")
    return best


def evaluate_prime(omega: int, primes: Sequence[int], epsilon=QUARTER, k: int | None = None) -> CriterionEvaluation:
    """Criterion evaluation for one p, with the exact P of the primes dividing p-1."""
    P = prime_reciprocal_sum(primes)
    if k is None:
        k, _ = optimal_k(omega, epsilon, P)
    return evaluate(CriterionParams(omega, k, as_fraction(epsilon), P))


def interval_for_omega(omega: int, epsilon=QUARTER, odd_only: bool = True) -> SearchInterval:
    """Primes with this omega(p-1) that the criterion alone does not settle.

    lower is primorial(omega) + 1, the least p with omega(p-1) = omega;
    upper is the ceiling of the smallest tail threshold.  An empty interval
    settles the value of omega outright.
    """
    if omega < 1:
        raise ValueError("omega must be >= 1")
    P = first_primes_reciprocal_sum(omega)
    k, t = optimal_k(omega, epsilon, P, odd_only)
    return SearchInterval(omega, primorial(omega) + 1, math.ceil(t), k, 1, t)


def omega_one_check(epsilon=QUARTER) -> int:
    """Threshold when omega(p-1) = 1: theta = eps exactly and B = 1."""
    eps = as_fraction(epsilon)
    if not 0 < eps <= Fraction(1, 2):
        raise ValueError("epsilon must lie in (0, 1/2]")
    return math.ceil(4 * (eps + 1) ** 2 / eps**4)


# ---------------------------------------------------------------------------
# omega(p-1) large: closed-form bounds with outward rounding

_iv = mpmath.iv


def robin_omega_bound(n: int) -> float:
    """Upper bound 1.385 log n / log log n for omega(n), valid for n >= 3."""
    if n < 3:
        raise ValueError("bound holds for n >= 3")
    with mpmath.workdps(30):
        b = _iv.mpf("1.385") * _iv.log(n) / _iv.log(_iv.log(n))
        return float(b.b)


def nth_prime_upper(n: int):
    """Interval enclosing n (log n + log log n), an upper bound for the n-th prime (n >= 6)."""
    if n < 6:
        raise ValueError("bound holds for n >= 6")
    n = _iv.mpf(n)
    return n * (_iv.log(n) + _iv.log(_iv.log(n)))


def reciprocal_sum_upper(x) -> mpmath.mpf:
    """Upper endpoint of log log x + 0.262 + 1/log^2 x, bounding sum_{q <= x} 1/q."""
    x = _iv.mpf(x)
    lx = _iv.log(x)
    return (_iv.log(lx) + _iv.mpf("0.262") + 1 / (lx * lx)).b


@dataclass(frozen=True)
class LargeOmegaResult:
    omega: int
    P_upper: float
    k: int
    holds: bool
    log10_margin: float  # log10(sqrt(p_min)) - log10(right-hand side)


def large_omega_detail(omega: int, epsilon=QUARTER) -> LargeOmegaResult:
    """Evaluate sqrt(p) > 8 (omega^{2k} + omega^{4k}) / eps^2 at p = primorial(omega) + 1.

    k = max(floor(e P) + 1, ceil(log(2/eps) / (2 log 2))) with P replaced by
    an upper bound, so k >= e P holds for the true P.  The comparison of the
    two sides is exact; only P and k come from interval arithmetic.
    """
    if omega < 6:
        raise ValueError("the n-th prime bound needs omega >= 6")
    eps = as_fraction(epsilon)
    with mpmath.workdps(40):
        p_up = reciprocal_sum_upper(nth_prime_upper(omega).b)
        ep = (_iv.e * _iv.mpf(p_up)).b
        k1 = int(mpmath.floor(ep)) + 1
        kk = (_iv.log(_iv.mpf(2) / (_iv.mpf(eps.numerator) / eps.denominator)) / (2 * _iv.log(2))).b
        k2 = int(mpmath.ceil(kk))
    k = max(k1, k2)
    rhs = Fraction(8 * (omega ** (2 * k) + omega ** (4 * k))) / eps**2
    p_min = primorial(omega) + 1
    holds = p_min > rhs * rhs
    margin = 0.5 * math.log10(p_min) - (math.log10(rhs.numerator) - math.log10(rhs.denominator))
    return LargeOmegaResult(omega, float(p_up), k, holds, margin)


def large_omega_check(omega: int, epsilon=QUARTER) -> bool:
    return large_omega_detail(omega, epsilon).holds


def large_omega_crossover(epsilon=QUARTER, bound: int = 2000) -> int | None:
    """Smallest omega in [6, bound] from which the check holds all the way to bound."""
    first = None
    for w in range(6, bound + 1):
        if large_omega_check(w, epsilon):
            if first is None:
                first = w
        else:
            first = None
    return first
