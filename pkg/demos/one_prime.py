"""Classify the residues of one prime and find its first QNRNP pair.

Usage: python3 demos/one_prime.py [p]   (default 300690391)
"""

import sys
from fractions import Fraction

from qnrnp.ntheory import ResidueClass, classify_residue, euler_phi, factorize, is_primitive_root, require_prime
from qnrnp.search import find_consecutive_qnrnps

p = int(sys.argv[1]) if len(sys.argv) > 1 else 300690391
require_prime(p)
f = factorize(p - 1)
ratio = Fraction(euler_phi(f), p - 1)
print(f"p - 1 = {' * '.join(str(q) if e == 1 else f'{q}^{e}' for q, e in f.factors)}")
print(f"phi(p-1)/(p-1) = {ratio} ~ {float(ratio):.4f}")

for n in range(2, min(p, 18)):
    qr = classify_residue(n, p)
    kind = "residue" if qr is ResidueClass.RESIDUE else "non-residue"
    if qr is ResidueClass.NON_RESIDUE:
        kind += ", primitive root" if is_primitive_root(n, p, f) else ", QNRNP"
    print(f"  {n:3d}: {kind}")

pair = find_consecutive_qnrnps(p, f, p - 2)
print(f"first pair of consecutive QNRNPs: {pair}")
