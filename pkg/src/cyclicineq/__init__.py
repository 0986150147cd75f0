"""Numerical laboratory for the generalized cyclic inequality

    sum_i (x_i^a - x_i) / (x_i^a + sum_{j != i} x_j) >= 0,   prod x_i >= 1, a >= 1,

its proof steps, the counterexample families around it, and the open
thresholds where its variants stop holding.
"""
from .errors import (
    BracketInvalid,
    BudgetExhausted,
    DegenerateGamma,
    HypothesisViolated,
    NonPositiveInput,
    PrecisionExhausted,
)
from .numerics import (
    EvalPoint,
    Exponents,
    Margin,
    Verdict,
    eval_sum,
    eval_sum_hp,
    eval_term,
    is_feasible,
    log_product,
    make_point,
    project_to_boundary,
)
from .propositions import PredicateId, check, check_chain

__version__ = "0.1.0"
