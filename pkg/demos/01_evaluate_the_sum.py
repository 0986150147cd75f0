"""Evaluating the cyclic sum.

    S(x, a) = sum_i (x_i^a - x_i) / (x_i^a + sum_{j != i} x_j)

Points live in log-coordinates, so coordinates like e^600 are harmless.
"""
from fractions import Fraction

from cyclicineq import EvalPoint, eval_sum, eval_sum_hp, eval_term, is_feasible, make_point
from cyclicineq.propositions import check_prop1

# A small rational point: the sum is 9/17 exactly.
p = make_point([2, Fraction(1, 2)])
print("terms at a=3:", [eval_term(p, i, 3) for i in range(p.n)])
print("S =", eval_sum(p, 3), "   9/17 =", 9 / 17)
print("extended precision:", eval_sum_hp(p, 3))

# The theorem's hypotheses are checked; the margin is the sum itself.
print(check_prop1(p, 3))

# Extreme coordinates do not overflow.
q = EvalPoint([600.0, -600.0])
print("feasible:", is_feasible(q), " S at a=1.2:", eval_sum(q, 1.2))
