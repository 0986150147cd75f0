"""Every step of the proof, checked at one point.

Below the case split a* = 2 + 1/(n-1) the chain bounds each term and then
compares power sums; above it, each term is bounded through the exponent
gamma = (n-1)(a-1)/n and an AM-GM step. At a* itself both chains apply.
"""
from cyclicineq import make_point
from cyclicineq.numerics import case_split
from cyclicineq.propositions import check_chain

p = make_point([3.0, 0.5, 1.0, 0.9])
split = case_split(p.n)
for alpha in (1.5, split, 4.0):
    print(f"\na = {alpha:g} (split at {split:g})")
    for r in check_chain(p, alpha):
        where = "" if r.inputs.get("i") is None else f" i={r.inputs['i']}"
        print(f"  {r.predicate.value:10s}{where:5s} margin {r.margin.value: .6e}  {r.margin.verdict.value}")
