"""Where the power-sum step loses its sign.

On the family (x^(n-1), 1/x, ..., 1/x) the difference sum x_i - sum x_i^b
has a closed form. For b strictly between 1-n and 1/(1-n) it diverges to
+inf as x grows and to -inf as x shrinks, so no sign holds there.
"""
from cyclicineq import families as fam
from cyclicineq.families import RemarkAFamily
from cyclicineq.search import minimize_margin

for x in (0.5, 2.0):
    print(f"D(n=3, b=-1, x={x}) =", fam.remark_a_difference(RemarkAFamily(3, x, -1.0)))

for beta in (-1.0, 0.5, -3.0):
    dirs = fam.remark_a_limit_direction(3, beta)
    print(f"b={beta:g}:", ", ".join(f"{d.value} {fam.remark_a_probe(3, beta, d)}" for d in dirs))

# The adversarial search, seeded with the family, finds the violation.
out = minimize_margin("ineq3", -1.0, 3, budget=10_000, force=True, mode="boundary")
print("search:", out.best_margin.verdict.value, out.best_margin.value, "at x =", out.best_point.x)
