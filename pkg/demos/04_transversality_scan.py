"""Empirical transversality: how small can |g| and -g' be at the same time?

Run: python demos/04_transversality_scan.py
"""
from gmpy2 import mpq

from betashift import parse_beta
from betashift.transversality import a_zero_check, falsify, scan

for name in ("golden", "1.8", "1.9"):
    b = parse_beta(name)
    rep = scan(b, 300, 3000, seed=1)
    mx, _ = a_zero_check(b, 300, 3000, seed=1)
    print(f"{name:>6}: delta_hat = {rep.delta_hat:.4f}  verdict: {rep.verdict}  max g' for a=0: {mx:.3g}")

# free +-1 coefficients are transversal only up to about 0.649, and the
# sampled estimate shrinks as x0 moves past it
for x0 in (mpq(6, 10), mpq(68, 100)):
    rep = scan(None, 400, 3000, seed=2, coefficient_mode="free-pm1", x0=x0)
    print(f"free coefficients on [0, {float(x0)}]: delta_hat = {rep.delta_hat:.4g}")

print("falsify at 1.8:", falsify(parse_beta("1.8"), 20000, seed=0) or "nothing found")
