"""One divisor-tree branch end to end: omega = 13, D = 40112098026.

Runs the branch twice.  The sound run uses distinct prime factors, enforces
the excluded prime 5 and stays inside the leaf's residual interval.  The
published-mode run reproduces the published lists.  Takes a few seconds.
"""

from qnrnp import published
from qnrnp.search import run_branch, run_published_branch
from qnrnp.tree import prime_divisor_tree

leaf = next(c for c in prime_divisor_tree(13) if c.D == published.FLAGSHIP_D)
print(f"leaf: forced {leaf.forced}, excluded {leaf.excluded}, D = {leaf.D}")
print(f"residual interval {leaf.residual_interval.display()}")

sound = run_branch(leaf)
print(f"sound mode: {sound.initial_count} initial, {sound.final_count} final")

pub = run_published_branch(13, published.FLAGSHIP_D)
print(f"published mode: {pub.initial_count} initial, {pub.certified_count} certified, {pub.final_count} final")
print(f"initial list runs from {pub.initial_first} to {pub.initial_last}")

print("first final-list rows (p, n, n+1):")
for rec in pub.records[:5]:
    print(f"  {rec.p}  {rec.n}  {rec.n + 1}")
