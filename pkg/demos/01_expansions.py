"""Greedy expansions, the expansion of 1, and bases recovered from digits.

Run: python demos/01_expansions.py
"""
from gmpy2 import mpq

from betashift import Beta, greedy_expand, parse_beta
from betashift.beta_core import GreedyStream, is_admissible, pi_beta, solve_beta_from_digits


def show(beta, label):
    d = beta.expansion_of_one()
    dm = beta.quasi_greedy()
    print(f"{label:>11}: d(1)   = {''.join(map(str, d.prefix(16)))}...")
    print(f"{'':>11}  d_-(1) = {''.join(map(str, dm.prefix(16)))}...")


for name in ("2", "golden", "tribonacci", "1.9", "2.5"):
    show(parse_beta(name), name)

# greedy digits of 0.37 in base 1.9, and the interval they pin down
b = Beta("1.9")
digits = greedy_expand(mpq(37, 100), b, 24)
print("\n0.37 in base 1.9:", "".join(map(str, digits)))
enc = pi_beta(GreedyStream(mpq(37, 100), b), b, 60)
print("depth-60 enclosure:", enc, "width", float(enc.width))

# admissibility is a lexicographic test against d_-(1, beta)
print("\n'11' admissible at golden?", is_admissible((1, 1), Beta.golden_ratio()))
print("'101' admissible at golden?", is_admissible((1, 0, 1), Beta.golden_ratio()))

# the base whose expansion of 1 is a given finite word
for w in [(1, 1), (1, 1, 1), (2, 1)]:
    beta = solve_beta_from_digits(w)
    print(f"d(1, beta) = {w}: beta = {float(beta):.12f}")
