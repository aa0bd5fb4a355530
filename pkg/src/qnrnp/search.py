"""Candidate enumeration, criterion filtering and witness verification.

Two enumeration modes share one block-structured executor:

* branch mode walks p = D*n + 1 for a divisor-tree leaf, sieving the n
  range with numpy before any primality test;
* direct mode walks every prime of an interval and keeps those whose p-1
  has the requested number of prime factors.

Work is cut into fixed blocks of consecutive n (or p) values.  Blocks are
independent, so they can be farmed out to worker processes; results are
merged in block order, which makes every report independent of the worker
count.  Checkpoints are written only at merge points.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .checkpoint import CheckpointState, WitnessRecord, checkpoint_resume, checkpoint_save
from .criterion import (
    QUARTER,
    SearchInterval,
    as_fraction,
    interval_for_omega,
    optimal_k,
    prime_reciprocal_sum,
)
from .errors import ConfigError, NoValidK, WitnessNotFound
from .ntheory import (
    SMALL_PRIMES,
    FactoredInteger,
    QnrnpWitness,
    euler_phi,
    factorize,
    is_prime,
    jacobi_symbol,
)
from .sieve import factor_data, prime_segments
from .tree import DivisorConstraint, prime_divisor_tree

HALF = Fraction(1, 2)
DEFAULT_BLOCK = 1 << 16
_FLOAT_SLACK = 1 + 1e-9  # float ratios only pre-filter; exact check follows
_WHEEL = [q for q in SMALL_PRIMES if q < 1000]


@dataclass(frozen=True)
class InitialCandidate:
    p: int
    f: FactoredInteger  # factorization of p - 1
    phi_ratio: Fraction

    @property
    def omega(self) -> int:
        return len(self.f.factors)


# ---------------------------------------------------------------------------
# witness search


def qnrnp_run(p: int, f: FactoredInteger, length: int = 2, scan_limit: int | None = None, start: int = 2) -> int | None:
    """Smallest n in [start, scan_limit] with n, ..., n+length-1 all QNRNPs mod p.

    ``scan_limit`` bounds the first element of the run and defaults to
    (p-1)/2.  Members of the run never exceed p-1.
    """
    if f.value != p - 1:
        raise ValueError(f"factorization is of {f.value}, expected {p - 1}")
    if scan_limit is None:
        scan_limit = (p - 1) // 2
    exps = [(p - 1) // q for q in f.primes if q != 2]
    if not exps:
        return None
    stop = min(scan_limit + length - 1, p - 1)
    run = 0
    for n in range(start, stop + 1):
        if jacobi_symbol(n, p) == -1 and any(pow(n, e, p) == 1 for e in exps):
            run += 1
            if run == length:
                return n - length + 1
        else:
            run = 0
    return None


def find_consecutive_qnrnps(p: int, f: FactoredInteger | None = None, scan_limit: int | None = None) -> tuple[int, int] | None:
    """The smallest pair (n, n+1) of consecutive QNRNPs with n <= scan_limit, if any."""
    if f is None:
        f = factorize(p - 1)
    if scan_limit is not None and scan_limit > p - 2:
        raise ValueError("scan_limit must not exceed p - 2")
    n = qnrnp_run(p, f, 2, scan_limit)
    return None if n is None else (n, n + 1)


def _witness(p: int, f: FactoredInteger, omega: int, k: int, length: int = 2, strict: bool = True) -> WitnessRecord:
    """Scan to (p-1)/2 first and then, failing that, as far as p-2."""
    n = qnrnp_run(p, f, length)
    extended = False
    if n is None:
        n = qnrnp_run(p, f, length, p - length, start=(p - 1) // 2 + 1)
        extended = True
    if n is None:
        if strict:
            raise WitnessNotFound(p)
        return WitnessRecord(p, 0, omega, k, True)
    return WitnessRecord(p, n, omega, k, extended)


def criterion_k(c: InitialCandidate, epsilon) -> tuple[bool, int]:
    """(certified, k) for a candidate, using its exact P and the best k."""
    try:
        k, threshold = optimal_k(c.omega, epsilon, prime_reciprocal_sum(c.f.primes))
    except NoValidK:
        return False, 0
    # above the smallest threshold the guard holds automatically
    return c.p > threshold, k


def apply_criterion_filter(candidates: Iterable[InitialCandidate], epsilon=QUARTER):
    """Split candidates into (certified, final)."""
    eps = as_fraction(epsilon)
    certified, final = [], []
    for c in candidates:
        (certified if criterion_k(c, eps)[0] else final).append(c)
    return certified, final


def verify_final_list(final: Iterable[InitialCandidate], epsilon=QUARTER) -> list[WitnessRecord]:
    """A witness for every prime of a final list; WitnessNotFound aborts."""
    eps = as_fraction(epsilon)
    return [_witness(c.p, c.f, c.omega, criterion_k(c, eps)[1]) for c in final]


# ---------------------------------------------------------------------------
# jobs


@dataclass
class BlockResult:
    initial_count: int = 0
    certified_count: int = 0
    first: int = 0
    last: int = 0
    records: list[WitnessRecord] = field(default_factory=list)


def _fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class BranchJob:
    """All p = D*n + 1 in [lower, upper] for one divisor-tree leaf."""

    omega: int
    D: int
    excluded: tuple[int, ...]
    lower: int
    upper: int
    epsilon: Fraction
    squarefree_only: bool = False
    block: int = DEFAULT_BLOCK

    def __post_init__(self):
        if self.D < 2:
            raise ValueError("branch mode needs D >= 2")

    @property
    def job_id(self) -> str:
        return json.dumps(
            {
                "kind": "branch",
                "omega": self.omega,
                "D": self.D,
                "excluded": list(self.excluded),
                "lower": self.lower,
                "upper": self.upper,
                "epsilon": _fraction_str(self.epsilon),
                "squarefree_only": self.squarefree_only,
                "block": self.block,
            },
            sort_keys=True,
        )

    @property
    def n_first(self) -> int:
        return max(1, -(-(self.lower - 1) // self.D))

    @property
    def n_last(self) -> int:
        return (self.upper - 1) // self.D

    @property
    def block_count(self) -> int:
        width = self.n_last - self.n_first + 1
        return max(0, -(-width // self.block))

    def initial_block(self, i: int) -> list[InitialCandidate]:
        n0 = self.n_first + i * self.block
        n1 = min(n0 + self.block, self.n_last + 1)
        if n1 <= n0:
            return []
        fD = factorize(self.D)
        d_primes = fD.primes
        fd = factor_data(n0, n1, skip=d_primes)
        counts = fd.big_omega if self.squarefree_only else fd.omega
        mask = (counts.astype(np.int64) + len(d_primes)) == self.omega
        if self.squarefree_only:
            # big_omega counts divisions by D's primes too, so this also rejects gcd(n, D) > 1
            mask &= fd.big_omega == fd.omega
        bound = HALF - self.epsilon
        ratio_D = math.prod(1 - 1 / q for q in d_primes)
        mask &= fd.ratio * ratio_D <= float(bound) * _FLOAT_SLACK
        for q in self.excluded:
            mask &= ~_multiples(n0, n1, q)
        if self.D * n0 + 1 > _WHEEL[-1]:
            for q in _WHEEL:
                if self.D % q:
                    r = (-pow(self.D, -1, q)) % q
                    mask &= ~_multiples(n0 - r, n1 - r, q)
        out = []
        for j in np.flatnonzero(mask):
            n = n0 + int(j)
            p = self.D * n + 1
            if p < self.lower or p > self.upper or not is_prime(p):
                continue
            f = fD * factorize(n)
            if len(f.factors) != self.omega or (self.squarefree_only and not f.is_squarefree):
                continue
            ratio = Fraction(euler_phi(f), f.value)
            if ratio <= bound:
                out.append(InitialCandidate(p, f, ratio))
        return out

    def run_block(self, i: int) -> BlockResult:
        res = BlockResult()
        for c in self.initial_block(i):
            _count_initial(res, c.p)
            certified, k = criterion_k(c, self.epsilon)
            if certified:
                res.certified_count += 1
            else:
                res.records.append(_witness(c.p, c.f, c.omega, k))
        return res


@dataclass(frozen=True)
class DirectJob:
    """Every prime p in [lower, upper] with omega(p-1) in range and a small phi ratio.

    ``run_length`` 2 is the property under verification; 3 is used by the
    conjecture scans.  With ``strict`` off a prime without a run is recorded
    with n = 0 instead of aborting.
    """

    omega_lo: int
    omega_hi: int
    lower: int
    upper: int
    epsilon: Fraction
    run_length: int = 2
    strict: bool = True
    block: int = 1 << 20

    @property
    def job_id(self) -> str:
        return json.dumps(
            {
                "kind": "direct",
                "omega_lo": self.omega_lo,
                "omega_hi": self.omega_hi,
                "lower": self.lower,
                "upper": self.upper,
                "epsilon": _fraction_str(self.epsilon),
                "run_length": self.run_length,
                "strict": self.strict,
                "block": self.block,
            },
            sort_keys=True,
        )

    @property
    def block_count(self) -> int:
        lo = max(self.lower, 3)
        return max(0, -(-(self.upper - lo + 1) // self.block))

    def initial_block(self, i: int) -> list[InitialCandidate]:
        p0 = max(self.lower, 3) + i * self.block
        p1 = min(p0 + self.block, self.upper + 1)
        if p1 <= p0:
            return []
        fd = factor_data(p0 - 1, p1 - 1)
        primes = np.concatenate(list(prime_segments(p0, p1)) or [np.empty(0, np.int64)])
        idx = primes - p0
        om = fd.omega[idx]
        bound = HALF - self.epsilon
        keep = (om >= self.omega_lo) & (om <= self.omega_hi) & (fd.ratio[idx] <= float(bound) * _FLOAT_SLACK)
        out = []
        for p in primes[keep]:
            p = int(p)
            f = factorize(p - 1)
            ratio = Fraction(euler_phi(f), p - 1)
            if self.omega_lo <= len(f.factors) <= self.omega_hi and ratio <= bound:
                out.append(InitialCandidate(p, f, ratio))
        return out

    def run_block(self, i: int) -> BlockResult:
        res = BlockResult()
        for c in self.initial_block(i):
            _count_initial(res, c.p)
            k = criterion_k(c, self.epsilon)[1] if self.run_length == 2 else 0
            res.records.append(_witness(c.p, c.f, c.omega, k, self.run_length, self.strict))
        return res


def _multiples(n0: int, n1: int, q: int) -> np.ndarray:
    """Boolean mask over [n0, n1) of multiples of q."""
    mask = np.zeros(n1 - n0, dtype=bool)
    mask[(-n0) % q :: q] = True
    return mask


def _count_initial(res: BlockResult, p: int) -> None:
    res.initial_count += 1
    if not res.first:
        res.first = p
    res.last = p


def job_from_id(job_id: str) -> BranchJob | DirectJob:
    """Rebuild a job from the id stored in its checkpoint."""
    d = json.loads(job_id)
    kind = d.pop("kind")
    d["epsilon"] = Fraction(d["epsilon"])
    if kind == "branch":
        d["excluded"] = tuple(d["excluded"])
        return BranchJob(**d)
    if kind == "direct":
        return DirectJob(**d)
    raise ConfigError(f"unknown job kind {kind!r}")


# ---------------------------------------------------------------------------
# reports and execution


@dataclass
class SearchReport:
    job_id: str
    omega: int
    D: int
    initial_count: int
    certified_count: int
    initial_first: int
    initial_last: int
    records: list[WitnessRecord]
    complete: bool
    constraint: DivisorConstraint | None = field(default=None, compare=False)
    elapsed: float = field(default=0.0, compare=False)
    checkpoint: str | None = field(default=None, compare=False)

    @property
    def final_count(self) -> int:
        return len(self.records)

    @property
    def witnesses(self) -> list[QnrnpWitness]:
        return [QnrnpWitness(r.p, r.n) for r in self.records]

    @property
    def counterexamples(self) -> list[int]:
        return [r.p for r in self.records if r.n == 0]


def _merge(state: CheckpointState, r: BlockResult) -> None:
    state.initial_count += r.initial_count
    state.certified_count += r.certified_count
    if r.first and not state.initial_first:
        state.initial_first = r.first
    if r.last:
        state.initial_last = r.last
    state.records.extend(r.records)
    state.next_block += 1


def execute(
    job: BranchJob | DirectJob,
    workers: int = 1,
    checkpoint_dir=None,
    checkpoint_every: int = 16,
    max_blocks: int | None = None,
    constraint: DivisorConstraint | None = None,
) -> SearchReport:
    """Run (or continue) a job block by block.

    ``max_blocks`` stops after that many new blocks, leaving an incomplete
    report and, with ``checkpoint_dir``, a checkpoint to resume from.
    """
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    t0 = time.perf_counter()
    state = checkpoint_resume(checkpoint_dir, job.job_id) if checkpoint_dir else CheckpointState(job.job_id)
    total = job.block_count
    end = total if max_blocks is None else min(total, state.next_block + max_blocks)
    path = None
    pool = ProcessPoolExecutor(workers) if workers > 1 and end - state.next_block > 1 else None
    try:
        while state.next_block < end:
            chunk = range(state.next_block, min(end, state.next_block + checkpoint_every))
            results = pool.map(job.run_block, chunk) if pool else map(job.run_block, chunk)
            for r in results:
                _merge(state, r)
            if checkpoint_dir:
                path = checkpoint_save(checkpoint_dir, state)
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    if checkpoint_dir and path is None:
        path = checkpoint_save(checkpoint_dir, state)
    omega = job.omega if isinstance(job, BranchJob) else job.omega_hi
    return SearchReport(
        job_id=job.job_id,
        omega=omega,
        D=getattr(job, "D", 1),
        initial_count=state.initial_count,
        certified_count=state.certified_count,
        initial_first=state.initial_first,
        initial_last=state.initial_last,
        records=state.records,
        complete=state.next_block >= total,
        constraint=constraint,
        elapsed=time.perf_counter() - t0,
        checkpoint=str(path) if path else None,
    )


def branch_job(
    constraint: DivisorConstraint,
    epsilon=QUARTER,
    interval: SearchInterval | None = None,
    squarefree_only: bool = False,
    enforce_exclusions: bool = True,
    block: int = DEFAULT_BLOCK,
) -> BranchJob:
    """Job for a tree leaf; ``interval`` defaults to the leaf's residual interval."""
    iv = interval if interval is not None else constraint.residual_interval
    return BranchJob(
        omega=constraint.omega,
        D=constraint.D,
        excluded=tuple(constraint.excluded) if enforce_exclusions else (),
        lower=iv.lower,
        upper=iv.upper,
        epsilon=as_fraction(epsilon),
        squarefree_only=squarefree_only,
        block=block,
    )


def sieve_initial_list(constraint: DivisorConstraint, epsilon=QUARTER, **options) -> Iterator[InitialCandidate]:
    """Stream the initial list of a leaf in ascending order.

    Keyword options are those of :func:`branch_job`.
    """
    job = branch_job(constraint, epsilon, **options)
    for i in range(job.block_count):
        yield from job.initial_block(i)


def run_branch(
    constraint: DivisorConstraint,
    epsilon=QUARTER,
    *,
    interval: SearchInterval | None = None,
    squarefree_only: bool = False,
    enforce_exclusions: bool = True,
    block: int = DEFAULT_BLOCK,
    **execute_options,
) -> SearchReport:
    job = branch_job(constraint, epsilon, interval, squarefree_only, enforce_exclusions, block)
    return execute(job, constraint=constraint, **execute_options)


def run_published_branch(omega: int, D: int, epsilon=QUARTER, block: int = DEFAULT_BLOCK, **execute_options) -> SearchReport:
    """Rerun a branch the way the published lists were produced.

    That run counted prime factors with multiplicity, did not enforce the
    leaf's excluded primes, and used the interval for omega as displayed
    (three significant digits, rounded outward).  D need not be a leaf of
    the recomputed tree.
    """
    eps = as_fraction(epsilon)
    if not factorize(D).is_squarefree:
        raise ConfigError(f"D={D} is not squarefree")
    iv = interval_for_omega(omega, eps).rounded()
    job = BranchJob(omega, D, (), iv.lower, iv.upper, eps, squarefree_only=True, block=block)
    return execute(job, **execute_options)


def direct_scan(
    interval: SearchInterval | tuple[int, int],
    omega_range: tuple[int, int],
    epsilon=QUARTER,
    run_length: int = 2,
    strict: bool = True,
    **execute_options,
) -> SearchReport:
    """Verify every prime of the interval whose p-1 has omega in range and phi ratio <= 1/2 - epsilon."""
    lo, hi = (interval.lower, interval.upper) if isinstance(interval, SearchInterval) else interval
    job = DirectJob(omega_range[0], omega_range[1], lo, hi, as_fraction(epsilon), run_length, strict)
    return execute(job, **execute_options)


@dataclass
class PipelineReport:
    omega: int
    epsilon: Fraction
    mode: str  # "tree", "direct" or "certified"
    interval: SearchInterval
    branches: list[SearchReport]

    @property
    def initial_count(self) -> int:
        return sum(b.initial_count for b in self.branches)

    @property
    def final_count(self) -> int:
        return sum(b.final_count for b in self.branches)

    @property
    def complete(self) -> bool:
        return all(b.complete for b in self.branches)


def run_pipeline(
    omega: int,
    epsilon=QUARTER,
    branches: Sequence[int] | None = None,
    **options,
) -> PipelineReport:
    """Interval, tree, sieve, filter and verify for one value of omega.

    ``branches`` restricts tree mode to leaves with the given D values.  The
    remaining options go to :func:`run_branch` or :func:`execute`.
    """
    eps = as_fraction(epsilon)
    interval = interval_for_omega(omega, eps)
    if interval.empty:
        return PipelineReport(omega, eps, "certified", interval, [])
    if 10 <= omega <= 14:
        leaves = prime_divisor_tree(omega, eps)
        if branches is not None:
            wanted = set(branches)
            leaves = [c for c in leaves if c.D in wanted]
        reports = [run_branch(c, eps, **options) for c in leaves if not c.residual_interval.empty]
        return PipelineReport(omega, eps, "tree", interval, reports)
    if 2 <= omega <= 9:
        return PipelineReport(omega, eps, "direct", interval, [direct_scan(interval, (omega, omega), eps, **options)])
    raise ConfigError(f"no search mode for omega={omega} with a non-empty interval")


@dataclass
class ConjectureReport:
    bound: int
    run_length: int
    ratio_bound: Fraction
    checked: int
    counterexamples: list[int]
    first_examples: list[WitnessRecord]


def conjecture_scan(bound: int, run_length: int, ratio_bound, workers: int = 1, omega_max: int = 64) -> ConjectureReport:
    """Every prime p <= bound with phi(p-1)/(p-1) <= ratio_bound, checked for a run of QNRNPs."""
    ratio_bound = as_fraction(ratio_bound)
    if not 0 < ratio_bound < HALF:
        raise ConfigError("ratio bound must lie in (0, 1/2)")
    report = direct_scan((3, bound), (1, omega_max), HALF - ratio_bound, run_length, strict=False, workers=workers)
    return ConjectureReport(bound, run_length, ratio_bound, report.initial_count, report.counterexamples, report.records[:10])
