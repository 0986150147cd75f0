"""Bracketing the open thresholds.

Case two: the least a > 1 above which the per-term bound holds for all
points (known to be at most 2 + 1/(n-1)). Reverse: how far below 1/(1-n)
the reversed inequality S <= 0 survives. Both come out as brackets; a probe
counts as violating only when the search confirms a violation.

Each run takes from a few seconds (coarse) to a couple of minutes.
"""
import sys

from cyclicineq.search import bisect_alpha_n_case2, bisect_alpha_n_reverse

tol = float(sys.argv[1]) if len(sys.argv) > 1 else 0.05
est = bisect_alpha_n_case2(3, tolerance=tol, budget=20_000)
print("case two, n=3:", est.bracket, "witness margin", est.witness_lo.best_margin.value)
est = bisect_alpha_n_reverse(3, tolerance=max(tol, 0.05), budget=20_000)
print("reverse, n=3:", est.bracket, "witness margin", est.witness_lo.best_margin.value)
