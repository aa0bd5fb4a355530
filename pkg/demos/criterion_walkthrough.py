"""How the sieve criterion shrinks the search.

For each omega the criterion certifies every prime above a threshold, and
no prime with omega(p-1) = omega lies below the primorial.  The gap between
the two is all that needs searching.  Run with ``python3 demos/criterion_walkthrough.py``.
"""

from qnrnp.criterion import QUARTER, first_primes_reciprocal_sum, interval_for_omega, large_omega_crossover, optimal_k

print("omega  k  search interval")
for w in range(8, 16):
    P = first_primes_reciprocal_sum(w)
    k, _ = optimal_k(w, QUARTER, P)
    iv = interval_for_omega(w)
    lo, hi = iv.display()
    span = "empty: every prime is certified" if iv.empty else f"[{lo}, {hi}]"
    print(f"{w:5d}  {k}  {span}")

print()
print("keeping the even terms of the tail moves the k = 3 regime down:")
for w in (27, 28, 42, 43):
    P = first_primes_reciprocal_sum(w)
    print(f"  omega={w}: k={optimal_k(w, QUARTER, P)[0]} (odd terms only), "
          f"k={optimal_k(w, QUARTER, P, odd_only=False)[0]} (all terms)")

print()
print(f"closed-form bounds take over from omega = {large_omega_crossover(QUARTER)}")
