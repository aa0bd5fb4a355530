"""Prime divisor tree: force small primes to divide p-1.

Assuming a prime t does not divide p-1 moves both ends of the search
interval.  The least possible p-1 becomes the product of the omega smallest
primes other than t (and other than anything already excluded), and the
largest possible P loses 1/t in favour of the next admissible prime, which
lowers the tail threshold.  When the raised lower end passes the lowered
upper end the assumption is impossible and t | p-1 is forced.

When a test is inconclusive the tree may split: one child excludes t (one
level deeper), the other forces t.  Leaves are emitted as
:class:`DivisorConstraint` records.  Every prime of the root interval that
the criterion does not certify satisfies the divisibility and exclusion
conditions of at least one leaf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .criterion import (
    QUARTER,
    CriterionParams,
    SearchInterval,
    as_fraction,
    interval_for_omega,
    tail_threshold,
    theta_lower_bound,
)
from .errors import Infeasible
from .ntheory import SMALL_PRIMES

# exclusion depth per omega that reproduces the published branch set
DEFAULT_LEVELS = {14: 0, 13: 1, 12: 2, 11: 3, 10: 4}

# the fixed k used by the tree; any k gives a valid bound
TREE_K = 2

_SCAN_CAP = 2000  # admissible primes are drawn from below this


@dataclass(frozen=True)
class TreeState:
    omega: int
    epsilon: Fraction
    interval: SearchInterval
    forced: tuple[int, ...] = (2,)
    excluded: tuple[int, ...] = ()
    level: int = 0

    def __post_init__(self):
        if set(self.forced) & set(self.excluded):
            raise ValueError("a prime cannot be both forced and excluded")
        if 2 not in self.forced:
            raise ValueError("2 always divides p-1")


@dataclass(frozen=True)
class DivisorConstraint:
    """A leaf of the tree: D | p-1, no excluded prime divides p-1, p in the residual interval."""

    omega: int
    D: int
    forced: tuple[int, ...]
    excluded: tuple[int, ...]
    level: int
    residual_interval: SearchInterval
    root_interval: SearchInterval = field(compare=False)

    @property
    def ident(self) -> str:
        f = ".".join(map(str, self.forced))
        x = ".".join(map(str, self.excluded)) or "-"
        return f"w{self.omega}:D{self.D}:x{x}:f{f}"

    def admits(self, p: int) -> bool:
        """Whether p satisfies this leaf's divisibility conditions."""
        m = p - 1
        return m % self.D == 0 and all(m % q for q in self.excluded)


@dataclass(frozen=True)
class Contradiction:
    """Assuming t does not divide p-1 leaves no room: t is forced."""

    t: int


@dataclass(frozen=True)
class Inconclusive:
    t: int
    interval: SearchInterval  # residual interval when t does not divide p-1


def admissible_primes(omega: int, forced: Iterable[int], excluded: Iterable[int]) -> list[int]:
    """The omega smallest primes that contain ``forced`` and avoid ``excluded``."""
    forced = sorted(set(forced))
    excluded = set(excluded)
    if len(forced) > omega:
        raise Infeasible(f"{len(forced)} forced primes exceed omega={omega}")
    chosen = list(forced)
    for q in SMALL_PRIMES:
        if len(chosen) == omega:
            break
        if q >= _SCAN_CAP:
            raise Infeasible(f"fewer than {omega} admissible primes below {_SCAN_CAP}")
        if q not in excluded and q not in forced:
            chosen.append(q)
    return sorted(chosen)


def exclusion_lower_bound(omega: int, forced: Iterable[int], excluded: Iterable[int]) -> int:
    """Least possible p-1 with omega prime factors, all of ``forced``, none of ``excluded``."""
    return math.prod(admissible_primes(omega, forced, excluded))


def adjusted_reciprocal_sum(omega: int, forced: Iterable[int], excluded: Iterable[int]) -> Fraction:
    """Largest possible P under the same constraints."""
    return sum((Fraction(1, q) for q in admissible_primes(omega, forced, excluded)), Fraction(0))


def constrained_interval(omega: int, epsilon, forced, excluded, ceiling: int, k: int = TREE_K) -> SearchInterval:
    """Residual interval of p under the constraints, clipped to ``ceiling``.

    Empty when the constraints are contradictory.  If theta is not positive
    the criterion says nothing and only the ceiling bounds p.
    """
    eps = as_fraction(epsilon)
    lower = exclusion_lower_bound(omega, forced, excluded) + 1
    params = CriterionParams(omega, k, eps, adjusted_reciprocal_sum(omega, forced, excluded))
    D = math.prod(forced)
    if theta_lower_bound(params) <= 0:
        return SearchInterval(omega, lower, ceiling, k, D)
    t = tail_threshold(params)
    return SearchInterval(omega, lower, min(math.ceil(t), ceiling), k, D, t)


def test_exclusion(state: TreeState, t: int, k: int = TREE_K) -> Contradiction | Inconclusive:
    """Assume t does not divide p-1; a contradiction means t is forced."""
    if t in state.forced or t in state.excluded:
        raise ValueError(f"{t} is already decided")
    iv = constrained_interval(state.omega, state.epsilon, state.forced, state.excluded + (t,), state.interval.upper, k)
    return Contradiction(t) if iv.empty else Inconclusive(t, iv)


test_exclusion.__test__ = False  # not a pytest test


def prime_divisor_tree(
    omega: int,
    epsilon=QUARTER,
    max_level: int | None = None,
    k: int = TREE_K,
    cap: int | None = None,
) -> list[DivisorConstraint]:
    """Explore exclusions depth first in increasing prime order, excluded branch first.

    ``cap`` truncates the root interval (used for scaled-down exhaustive
    checks).  Leaves stop at the first inconclusive prime once ``max_level``
    exclusions have been spent, or when all omega primes are forced.
    """
    eps = as_fraction(epsilon)
    if max_level is None:
        max_level = DEFAULT_LEVELS.get(omega, 0)
    root = interval_for_omega(omega, eps)
    if cap is not None:
        root = SearchInterval(omega, root.lower, min(root.upper, cap), root.k_used, 1, root.threshold)
    leaves: list[DivisorConstraint] = []

    def emit(state: TreeState) -> None:
        iv = constrained_interval(omega, eps, state.forced, state.excluded, root.upper, k)
        leaves.append(
            DivisorConstraint(
                omega=omega,
                D=math.prod(state.forced),
                forced=state.forced,
                excluded=state.excluded,
                level=state.level,
                residual_interval=iv,
                root_interval=root,
            )
        )

    def explore(state: TreeState) -> None:
        for t in SMALL_PRIMES:
            if len(state.forced) == omega:
                break
            if t in state.forced or t in state.excluded:
                continue
            if isinstance(test_exclusion(state, t, k), Contradiction):
                state = TreeState(omega, eps, root, tuple(sorted(state.forced + (t,))), state.excluded, state.level)
                continue
            if state.level < max_level:
                explore(TreeState(omega, eps, root, state.forced, state.excluded + (t,), state.level + 1))
                explore(TreeState(omega, eps, root, tuple(sorted(state.forced + (t,))), state.excluded, state.level))
                return
            break
        emit(state)

    base = TreeState(omega, eps, root)
    if root.empty or constrained_interval(omega, eps, base.forced, (), root.upper, k).empty:
        return []
    explore(base)
    return leaves


def forced_product(omega: int, epsilon=QUARTER, k: int = TREE_K) -> int:
    """D from the level-0 tree: the product of every prime forced outright."""
    (leaf,) = prime_divisor_tree(omega, epsilon, 0, k)
    return leaf.D
