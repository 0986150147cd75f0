"""Clearance runs: random fuzzing plus multistart Nelder-Mead.

A clearance is evidence, not proof; the reports carry their budgets.
"""
from cyclicineq.search import fuzz, minimize_margin

s = fuzz("prop1", 4, 2.0, count=100_000, seed=1)
print(f"fuzz: {s.evaluations} points, {s.violations} confirmed violations, "
      f"min margin {s.min_margin.value:.3e}")

out = minimize_margin("prop1", 2.0, 4, budget=20_000, seed=1)
print("search minimum by mode:", out.by_mode)
print("best:", out.best_margin.value, out.best_margin.verdict.value)
