"""The a -> -inf limit on the spike family.

On (x^(n-1), 1/x, ..., 1/x) the sum tends to n - 1 - x^n/(n-1), positive
when x^n < (n-1)^2. The approach is slow: the gap shrinks like x^a, so at
x = 1.2 it is still about 1e-4 at a = -60.
"""
from cyclicineq import families as fam

n, x = 3, 1.2
limit = fam.remark_d_limit(n, x)
print("limit:", limit)
for alpha, value in fam.remark_d_convergence(n, x, [-10, -20, -40, -60, -100, -200]):
    print(f"a = {alpha:6g}: S = {value:.12f}   gap {value - limit:+.3e}")
