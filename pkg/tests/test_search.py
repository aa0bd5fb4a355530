import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import expected
import oracles
from qnrnp import published
from qnrnp.criterion import QUARTER, SearchInterval, interval_for_omega
from qnrnp.errors import ConfigError, WitnessNotFound
from qnrnp.ntheory import euler_phi, factorize, is_prime, is_qnrnp, primes_in_range
from qnrnp.search import (
    BranchJob,
    DirectJob,
    InitialCandidate,
    _witness,
    apply_criterion_filter,
    criterion_k,
    direct_scan,
    execute,
    find_consecutive_qnrnps,
    job_from_id,
    qnrnp_run,
    run_branch,
    run_pipeline,
    run_published_branch,
    sieve_initial_list,
    verify_final_list,
)
from qnrnp.tree import DivisorConstraint, prime_divisor_tree


def candidate(p):
    f = factorize(p - 1)
    return InitialCandidate(p, f, Fraction(euler_phi(f), p - 1))


def assert_pair(p, n):
    f = factorize(p - 1)
    assert is_qnrnp(n, p, f) and is_qnrnp(n + 1, p, f), (p, n)


def flagship_leaf():
    return next(c for c in prime_divisor_tree(13) if c.D == published.FLAGSHIP_D)


# witness search


def test_find_pair_examples():
    assert find_consecutive_qnrnps(300690391) == (14, 15)
    assert find_consecutive_qnrnps(870871) == (6, 7)
    assert find_consecutive_qnrnps(8625906120001171) == (7, 8)
    assert find_consecutive_qnrnps(7) is None
    # 31 has its only pair beyond (p-1)/2
    assert find_consecutive_qnrnps(31) is None
    assert find_consecutive_qnrnps(31, scan_limit=29) == expected.PAIR_AT_31
    with pytest.raises(ValueError):
        find_consecutive_qnrnps(31, scan_limit=30)
    with pytest.raises(ValueError):
        qnrnp_run(31, factorize(28))


def test_run_of_three_at_211():
    assert qnrnp_run(211, factorize(210), 3) == expected.RUN3_AT_211
    assert all(is_qnrnp(n, 211) for n in range(26, 29))


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(list(primes_in_range(3, 5000))), st.integers(min_value=2, max_value=3))
def test_run_matches_naive_scan(p, length):
    stop = (p - 1) // 2
    assert qnrnp_run(p, factorize(p - 1), length) == oracles.naive_run(p, length, stop)


def test_witness_regimes():
    f31 = factorize(30)
    rec = _witness(31, f31, 3, 1)
    assert rec.extended and rec.pair == expected.PAIR_AT_31
    rec = _witness(300690391, factorize(300690390), 9, 2)
    assert not rec.extended and rec.n == 14
    with pytest.raises(WitnessNotFound) as err:
        _witness(7, factorize(6), 1, 1)
    assert err.value.p == 7
    loose = _witness(7, factorize(6), 1, 1, strict=False)
    assert loose.n == 0 and loose.extended


def test_verify_final_list():
    assert verify_final_list([]) == []
    recs = verify_final_list([candidate(300690391), candidate(870871)])
    assert [(r.p, r.n) for r in recs] == [(300690391, 14), (870871, 6)]
    with pytest.raises(WitnessNotFound):
        verify_final_list([candidate(300690391), candidate(7)])


def test_criterion_filter_splits_on_threshold():
    big = candidate(published.FLAGSHIP_INITIAL[-1][1])
    small = candidate(published.FLAGSHIP_INITIAL[0][1])
    certified, final = apply_criterion_filter([small, big])
    assert [c.p for c in certified] == [big.p] and [c.p for c in final] == [small.p]
    assert criterion_k(big, QUARTER) == (True, 2)


# initial lists


def test_empty_stream_when_D_exceeds_interval():
    iv = SearchInterval(13, 1000, 1500)
    c = DivisorConstraint(13, 10**6, (2, 5), (), 0, iv, iv)
    assert list(sieve_initial_list(c)) == []
    assert BranchJob(13, 10**6, (), 1000, 1500, QUARTER).block_count == 0


def test_branch_job_needs_nontrivial_D():
    with pytest.raises(ValueError):
        BranchJob(5, 1, (), 3, 100, QUARTER)


def test_initial_list_against_brute_force():
    # small blocks so that block seams are exercised as well
    D, w = 13370699342, 12
    iv = interval_for_omega(w).rounded()
    job = BranchJob(w, D, (), iv.lower, iv.upper, QUARTER, squarefree_only=True, block=5000)
    mine = [c.p for i in range(job.block_count) for c in job.initial_block(i)]
    brute = []
    for n in range(job.n_first, job.n_last + 1):
        p = D * n + 1
        if not iv.lower <= p <= iv.upper or not is_prime(p):
            continue
        f = factorize(p - 1)
        if f.is_squarefree and len(f.factors) == w and 4 * euler_phi(f) <= p - 1:
            brute.append(p)
    assert mine == brute
    assert len(mine) == expected.PUBLISHED_MODE_COUNTS[(w, D)][0]


def test_flagship_counting_modes():
    leaf = flagship_leaf()
    rounded = interval_for_omega(13).rounded()
    exact = interval_for_omega(13)
    cases = [
        (dict(interval=rounded, enforce_exclusions=False), expected.FLAGSHIP_DISTINCT_ROUNDED),
        (dict(interval=exact, enforce_exclusions=False), expected.FLAGSHIP_DISTINCT_EXACT),
        (dict(interval=rounded), expected.FLAGSHIP_SOUND_ROUNDED),
        ({}, expected.FLAGSHIP_SOUND_RESIDUAL),
    ]
    for opts, counts in cases:
        r = run_branch(leaf, **opts)
        assert (r.initial_count, r.final_count) == counts, opts
        assert r.complete
        for rec in r.records:
            assert_pair(rec.p, rec.n)
            assert (rec.p - 1) % leaf.D == 0
            if opts.get("enforce_exclusions", True):
                assert all((rec.p - 1) % q for q in leaf.excluded)


def test_filter_soundness_distinct_mode():
    """Every certified prime of the distinct-mode flagship run still has a pair."""
    leaf = flagship_leaf()
    cands = list(sieve_initial_list(leaf, interval=interval_for_omega(13).rounded(), enforce_exclusions=False))
    certified, final = apply_criterion_filter(cands)
    assert len(certified) >= 200 and len(final) == expected.FLAGSHIP_DISTINCT_ROUNDED[1]
    for c in certified:
        assert find_consecutive_qnrnps(c.p, c.f) is not None, c.p


@pytest.mark.parametrize("key", sorted(k for k in expected.PUBLISHED_MODE_COUNTS if k[0] == 12))
def test_published_mode_counts_omega12(key):
    w, D = key
    r = run_published_branch(w, D)
    assert (r.initial_count, r.final_count) == expected.PUBLISHED_MODE_COUNTS[key]
    table = next((i, f) for ww, DD, i, f in published.BRANCH_COUNTS if DD == D)
    assert (r.initial_count, r.final_count) == table


@pytest.mark.parametrize("key", sorted(k for k in expected.PUBLISHED_MODE_COUNTS if k[0] == 11))
def test_published_mode_counts_omega11(key):
    r = run_published_branch(*key)
    assert (r.initial_count, r.final_count) == expected.PUBLISHED_MODE_COUNTS[key]


def test_published_branch_rejects_square_D():
    with pytest.raises(ConfigError):
        run_published_branch(12, 4 * 3 * 5)


# published samples that are too costly to regenerate in full


def test_omega14_published_samples():
    D = math.prod([2, 3, 5, 7, 11, 13, 17])
    iv = interval_for_omega(14).rounded()  # the last sample lies above the exact upper bound
    final = {p: n for _, p, n in published.OMEGA14_FINAL}
    for _, p in published.OMEGA14_INITIAL:
        c = candidate(p)
        assert is_prime(p) and (p - 1) % D == 0
        assert c.omega == 14 and c.f.is_squarefree and c.phi_ratio <= QUARTER
        assert iv.lower <= p <= iv.upper
    for p, n in final.items():
        c = candidate(p)
        assert not criterion_k(c, QUARTER)[0]
        assert find_consecutive_qnrnps(p, c.f) == (n, n + 1)
    # the last four initial primes are certified, so the final list stops at 23
    for _, p in published.OMEGA14_INITIAL[-4:]:
        assert p not in final and criterion_k(candidate(p), QUARTER)[0]


def test_d1385670_published_samples():
    for _, p, n in published.D1385670_FINAL:
        c = candidate(p)
        assert is_prime(p) and (p - 1) % 1385670 == 0 and c.omega == 13
        assert not criterion_k(c, QUARTER)[0]
        assert find_consecutive_qnrnps(p, c.f) == (n, n + 1)


# direct mode and the pipeline


def test_direct_scan_small():
    r = direct_scan((2, 1000), (1, 64))
    want = [p for p in primes_in_range(3, 1000) if 4 * oracles.phi_of(p - 1) <= p - 1]
    assert [rec.p for rec in r.records] == want
    assert tuple(want[:5]) == expected.QUALIFYING_FIRST
    assert r.counterexamples == []
    assert direct_scan((2, 10**6), (1, 1)).initial_count == 0


def test_pipeline_certified_range():
    for w in range(15, 48):
        rep = run_pipeline(w)
        assert rep.mode == "certified" and rep.branches == [] and rep.complete


def test_pipeline_direct_modes():
    assert run_pipeline(3).initial_count == 0
    rep = run_pipeline(4)
    assert rep.mode == "direct" and rep.complete
    assert rep.initial_count == rep.final_count > 0
    for rec in rep.branches[0].records:
        assert rec.omega == 4
        assert_pair(rec.p, rec.n)


def test_pipeline_tree_mode_selects_branches():
    rep = run_pipeline(13, branches=[published.FLAGSHIP_D])
    assert rep.mode == "tree" and len(rep.branches) == 1
    assert (rep.initial_count, rep.final_count) == expected.FLAGSHIP_SOUND_RESIDUAL


def test_counts_are_stable():
    a = run_published_branch(12, 13370699342, block=4096)
    b = run_published_branch(12, 13370699342)
    assert a.records == b.records and a.initial_count == b.initial_count


def test_job_ids_round_trip():
    jobs = [
        BranchJob(13, 6, (5,), 10, 10**6, QUARTER, True, 100),
        DirectJob(1, 64, 3, 10**5, Fraction(1, 3), 3, False, 1000),
    ]
    for job in jobs:
        assert job_from_id(job.job_id) == job
    with pytest.raises(ConfigError):
        job_from_id('{"kind": "other", "epsilon": "1/4"}')
    with pytest.raises(ConfigError):
        execute(jobs[1], workers=0)
