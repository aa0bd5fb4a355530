import math
import random
import sys
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from qnrnp import published
from qnrnp.criterion import (
    QUARTER,
    CriterionParams,
    SearchInterval,
    as_fraction,
    binom_sum,
    clod_floor,
    evaluate,
    evaluate_prime,
    first_primes_reciprocal_sum,
    interval_for_omega,
    large_omega_check,
    large_omega_crossover,
    large_omega_detail,
    nth_prime_upper,
    omega_one_check,
    optimal_k,
    prime_reciprocal_sum,
    reciprocal_sum_upper,
    robin_omega_bound,
    sig_round,
    tail_threshold,
    theta_exact,
    theta_lower_bound,
    theta_tail,
)
from qnrnp.errors import NonPositiveTheta
from qnrnp.ntheory import euler_phi, factorize, nth_prime, primes_first, primes_in_range, primorial
from qnrnp.search import BranchJob, apply_criterion_filter, find_consecutive_qnrnps

P14 = first_primes_reciprocal_sum(14)

epsilons = st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(1, 2)).filter(lambda e: 0 < e <= Fraction(1, 2))


def params(omega, k, eps=QUARTER, P=None):
    return CriterionParams(omega, k, eps, first_primes_reciprocal_sum(omega) if P is None else P)


def test_reciprocal_sums():
    assert prime_reciprocal_sum([]) == 0
    assert prime_reciprocal_sum([2, 3]) == Fraction(5, 6)
    assert float(P14) == pytest.approx(sum(1 / q for q in primes_first(14)), rel=1e-15)
    assert round(float(P14), 4) == 1.6404
    assert P14 == sum(Fraction(1, q) for q in primes_first(14))
    with pytest.raises(ValueError):
        prime_reciprocal_sum([2, 2])


def test_theta_tail_examples():
    assert theta_tail(4, 2, Fraction(7, 3)) == 0
    assert theta_tail(5, 2, 1) == Fraction(1, 120)
    assert theta_tail(14, 2, P14) == oracles.tail_termwise(14, 2, P14)
    assert theta_tail(6, 1, 1, odd_only=False) == sum(Fraction(1, math.factorial(n)) for n in range(3, 7))


def test_theta_lower_bound_examples():
    assert theta_lower_bound(params(4, 2)) == QUARTER
    for k in (1, 2, 5):
        assert theta_lower_bound(CriterionParams(1, k, QUARTER, Fraction(1, 2))) == QUARTER
    assert theta_lower_bound(params(47, 3)) > 0


def test_binom_sum_examples():
    assert all(binom_sum(1, k) == 1 for k in range(1, 6))
    assert binom_sum(4, 2) == 15
    assert binom_sum(14, 2) == 1470


def test_tail_threshold_examples():
    assert tail_threshold(CriterionParams(1, 1, QUARTER, 0)) == 1600
    assert omega_one_check(Fraction(1, 2)) == 144
    assert omega_one_check("1/4") == 1600
    assert round(float(tail_threshold(params(14, 2))) / 1e16, 1) == 4.3
    assert round(float(tail_threshold(params(9, 2))) / 1e13, 1) == 1.5
    with pytest.raises(NonPositiveTheta):
        tail_threshold(params(20, 1))


def test_clod_floor_examples():
    assert clod_floor(CriterionParams(1, 1, QUARTER, 0)) == 17
    assert clod_floor(params(47, 3)) < primorial(47)
    assert clod_floor(params(14, 2)) < Fraction(13, 10) * 10**16
    ev = evaluate(params(14, 2))
    assert ev.clod_floor == clod_floor(params(14, 2))
    assert ev.certifies(math.ceil(ev.threshold) + 1) and not ev.certifies(math.floor(ev.threshold))


def test_optimal_k_examples():
    assert optimal_k(14, QUARTER, P14)[0] == 2
    assert optimal_k(20, QUARTER, first_primes_reciprocal_sum(20))[0] == 2
    # the published regime for omega 28..47 is reproduced when all factorial terms are kept
    assert optimal_k(30, QUARTER, first_primes_reciprocal_sum(30), odd_only=False)[0] == 3
    # k = omega always qualifies since its tail is empty, so a best k always exists
    k, _ = optimal_k(60, Fraction(1, 1000), Fraction(30))
    assert theta_tail(60, k, Fraction(30)) < Fraction(1, 1000)


def test_optimal_k_is_the_minimum():
    for w in (2, 8, 14, 30, 47):
        P = first_primes_reciprocal_sum(w)
        k, t = optimal_k(w, QUARTER, P)
        others = []
        for j in range(1, w + 1):
            try:
                others.append((tail_threshold(CriterionParams(w, j, QUARTER, P)), j))
            except NonPositiveTheta:
                pass
        assert min(others) == (t, k)


def test_interval_examples():
    iv = interval_for_omega(47)
    assert iv.empty and iv.lower > 10**84
    assert interval_for_omega(14).display() == ("1.30e16", "4.30e16")
    assert interval_for_omega(11).display() == ("2.00e11", "5.12e14")
    assert interval_for_omega(14).lower == 13082761331670031
    # the published per-omega row for omega = 7 and the merged small-omega row share an upper bound
    lo7, hi7 = published.OMEGA7_INTERVAL
    assert sig_round(interval_for_omega(7).lower, 3, up=False) == sig_round(Fraction(lo7), 3, up=False)
    assert nearest2(interval_for_omega(7).upper) == float(hi7)


def nearest2(x):
    return float(f"{float(x):.1e}")


def test_smaller_thresholds_for_larger_epsilon():
    a, b = interval_for_omega(9, Fraction(1, 3)), interval_for_omega(9, QUARTER)
    assert a.upper < b.upper


def test_search_interval_helpers():
    iv = SearchInterval(5, 10, 20)
    assert not iv.empty and iv.width == 11
    assert SearchInterval(5, 21, 20).empty and SearchInterval(5, 21, 20).width == 0
    big = interval_for_omega(13)
    r = big.rounded()
    assert r.lower <= big.lower and r.upper >= big.upper
    assert (r.lower, r.upper) == (304000000000000, 10700000000000000)


def test_sig_round():
    assert sig_round(Fraction(13082761331670031), 3, up=False) == "1.30e16"
    assert sig_round(Fraction(13082761331670031), 3, up=True) == "1.31e16"
    assert sig_round(999.5, 3, up=True) == "1.00e3"
    assert sig_round(1000, 3) == "1.00e3"
    assert sig_round(Fraction(1, 3), 2, up=False) == "3.3e-1"


def test_epsilon_must_be_exact():
    with pytest.raises(TypeError):
        as_fraction(0.25)
    assert as_fraction("1/4") == QUARTER
    with pytest.raises(ValueError):
        CriterionParams(5, 1, Fraction(3, 4), 1)
    with pytest.raises(ValueError):
        CriterionParams(0, 1, QUARTER, 1)


def test_threshold_round_trip():
    # thresholds can have thousands of digits; lift the str(int) length guard where it exists
    setter = getattr(sys, "set_int_max_str_digits", None)
    limit = sys.get_int_max_str_digits() if setter else 0
    if setter:
        setter(0)
    try:
        for w in range(2, 48):
            t = optimal_k(w, QUARTER, first_primes_reciprocal_sum(w))[1]
            assert Fraction(str(t)) == t
            lo, hi = interval_for_omega(w).display()
            assert Fraction(hi) >= t
    finally:
        if setter:
            setter(limit)


def test_large_omega_examples():
    assert large_omega_check(48)
    assert large_omega_check(200)
    assert not large_omega_check(6)
    assert large_omega_crossover(Fraction(1, 3)) <= large_omega_crossover(QUARTER) == 48
    d = large_omega_detail(48)
    assert d.holds and d.log10_margin > 0
    with pytest.raises(ValueError):
        large_omega_check(5)


def test_closed_form_bounds_are_upper_bounds():
    for n in (6, 10, 48, 100, 1000):
        assert nth_prime_upper(n).b >= nth_prime(n)
    for x in (10, 100, 1000, 10**5):
        assert reciprocal_sum_upper(x) >= sum(1 / q for q in primes_in_range(2, x))
    for m in range(2, 40):
        assert robin_omega_bound(primorial(m)) >= m


def test_theta_exact_against_oracle():
    for p in (211, 331, 30031, 300690391, 870871):
        for k in (1, 2, 3):
            assert theta_exact(p, k) == oracles.theta_by_definition(p, k)


def test_evaluate_prime_uses_exact_P():
    f = factorize(386480064480511 - 1)
    ev = evaluate_prime(13, f.primes)
    assert ev.params.P == prime_reciprocal_sum(f.primes)
    assert ev.params.k == 2
    assert not ev.certifies(386480064480511)


# properties


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=30), st.integers(min_value=1, max_value=6), epsilons, epsilons)
def test_threshold_decreases_as_theta_grows(w, k, e1, e2):
    assume(e1 < e2)
    P = first_primes_reciprocal_sum(w)
    try:
        t1 = tail_threshold(CriterionParams(w, k, e1, P))
    except NonPositiveTheta:
        return
    t2 = tail_threshold(CriterionParams(w, k, e2, P))
    assert t2 < t1


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=30), st.integers(min_value=1, max_value=6),
       st.fractions(min_value=0, max_value=3), st.fractions(min_value=0, max_value=3))
def test_threshold_nondecreasing_in_P(w, k, P1, P2):
    assume(P1 <= P2)
    try:
        t2 = tail_threshold(CriterionParams(w, k, QUARTER, P2))
    except NonPositiveTheta:
        return
    assert tail_threshold(CriterionParams(w, k, QUARTER, P1)) <= t2


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=30), st.integers(min_value=1, max_value=8), st.fractions(min_value=0, max_value=4))
def test_tail_matches_termwise_sum(w, k, P):
    assert theta_tail(w, k, P) == oracles.tail_termwise(w, k, P)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=30), st.integers(min_value=1, max_value=6), epsilons)
def test_guard_below_threshold(w, k, eps):
    try:
        ev = evaluate(CriterionParams(w, k, eps, first_primes_reciprocal_sum(w)))
    except NonPositiveTheta:
        return
    assert ev.clod_floor <= ev.threshold
    assert ev.theta_lower <= eps and ev.binom_sum >= 1 and ev.threshold >= 0


def test_bounding_for_small_primes():
    for p in primes_in_range(3, 20_000):
        f = factorize(p - 1)
        eps = Fraction(1, 2) - Fraction(euler_phi(f), p - 1)
        if eps <= 0:
            continue
        P = prime_reciprocal_sum(f.primes)
        for k in range(1, len(f.factors) + 1):
            assert theta_exact(p, k, f) >= theta_lower_bound(CriterionParams(len(f.factors), k, eps, P))


def test_certified_primes_have_pairs():
    """200 primes certified by the criterion, each checked for a pair anyway."""
    certified = []
    for D, w in ((published.FLAGSHIP_D, 13), (6077590610, 12)):
        rep_certified, _ = apply_criterion_filter(_published_candidates(w, D))
        certified += rep_certified
    assert len(certified) >= 200
    rng = random.Random(2024)
    for c in rng.sample(certified, 200):
        assert find_consecutive_qnrnps(c.p, c.f) is not None, c.p


def _published_candidates(w, D):
    iv = interval_for_omega(w).rounded()
    job = BranchJob(w, D, (), iv.lower, iv.upper, QUARTER, True)
    return [c for i in range(job.block_count) for c in job.initial_block(i)]
