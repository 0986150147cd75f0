"""The normalised case-two inequality fails as a -> 1+.

The family x_2 = (n - 3/2)^(1/g), x_j = (1/(2n))^(1/g) keeps A and G fixed
(A = 5/6, G = 1/2 for n = 3) while the left side collapses to 0, so the
margin tends to -(1/A - 1) = -1/5.
"""
from cyclicineq import families as fam

A, G = fam.remark_b_constants(3)
print(f"A = {A}, G = {G}")
for alpha in (2.5, 1.2, 1.1, 1.05, 1.01):
    m = fam.remark_b_violation(3, alpha, max_log=1e6)
    print(f"a = {alpha:5g}: left {m.lhs:.3e}, right {m.rhs:.6f}, margin {m.value:+.6f} "
          f"{m.verdict.value} ({m.precision})")
