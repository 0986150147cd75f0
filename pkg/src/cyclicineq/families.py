"""Point families behind the counterexamples and limits in the remarks.

All families are built directly in log-coordinates, so the points that are
meant to lie on ``prod x = 1`` do so up to a few ulps of the log-product.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import numerics as nm
from .errors import DegenerateGamma
from .numerics import EvalPoint, Margin
from .propositions import check_ineq9

LOG_BUDGET = 700.0


@dataclass(frozen=True)
class RemarkAFamily:
    n: int
    x: float
    beta: float = 0.0


@dataclass(frozen=True)
class RemarkBFamily:
    n: int
    alpha: float

    @property
    def gamma(self) -> float:
        return nm.gamma_of(self.n, self.alpha)


@dataclass(frozen=True)
class RemarkDFamily:
    n: int
    x: float


class LimitDirection(str, enum.Enum):
    PLUS_INFINITY_AT_LARGE_X = "PlusInfinityAtLargeX"
    MINUS_INFINITY_AT_SMALL_X = "MinusInfinityAtSmallX"
    NOT_APPLICABLE = "NotApplicable"


def _spike_point(n: int, logx: float) -> EvalPoint:
    """(x^(n-1), 1/x, ..., 1/x) from ``ln x``."""
    return EvalPoint([(n - 1) * logx] + [-logx] * (n - 1))


def remark_a_point(f: RemarkAFamily) -> EvalPoint:
    if f.n < 3:
        raise ValueError(f"the family needs n >= 3, got {f.n}")
    if not f.x > 0:
        raise ValueError(f"x must be positive, got {f.x}")
    return _spike_point(f.n, math.log(f.x))


def remark_a_difference(f: RemarkAFamily) -> float:
    """``sum x - sum x^beta`` on the family point, from its closed form."""
    n, x, b = f.n, float(f.x), float(f.beta)
    if n < 3:
        raise ValueError(f"the family needs n >= 3, got {n}")
    return x ** (n - 1) - x ** (b * (n - 1)) + (n - 1) * (1.0 / x - x ** (-b))


def remark_a_limit_direction(n: int, beta: float) -> tuple[LimitDirection, ...]:
    """Which divergence of the family difference applies at this beta.

    Both directions hold inside the band ``(1-n, 1/(1-n))``; this is what
    makes the sign of (3) indeterminate there.
    """
    if n < 3:
        raise ValueError(f"needs n >= 3, got {n}")
    out = []
    if 1 - n < beta < 1:
        out.append(LimitDirection.PLUS_INFINITY_AT_LARGE_X)
    if beta < 1.0 / (1 - n):
        out.append(LimitDirection.MINUS_INFINITY_AT_SMALL_X)
    return tuple(out) or (LimitDirection.NOT_APPLICABLE,)


def remark_a_probe(n: int, beta: float, direction: LimitDirection) -> list[float]:
    """Difference values along x = 10, 100, 1000 (or 0.1, 0.01, 0.001)."""
    xs = [10.0, 100.0, 1000.0]
    if direction is LimitDirection.MINUS_INFINITY_AT_SMALL_X:
        xs = [1 / x for x in xs]
    return [remark_a_difference(RemarkAFamily(n, x, beta)) for x in xs]


def remark_b_point(f: RemarkBFamily, max_log: float = LOG_BUDGET) -> EvalPoint:
    """x_2 .. x_n with x_2 = (n - 3/2)^(1/gamma), x_j = (1/(2n))^(1/gamma)."""
    n, alpha = f.n, f.alpha
    if n < 3:
        raise ValueError(f"the family needs n >= 3, got {n}")
    if not alpha > 1:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    g = f.gamma
    if g == 0.0:
        raise DegenerateGamma(f"gamma vanishes at alpha = {alpha}")
    logs = [math.log(n - 1.5) / g] + [-math.log(2 * n) / g] * (n - 2)
    if max(abs(v) for v in logs) > max_log or not all(map(math.isfinite, logs)):
        raise DegenerateGamma(
            f"alpha = {alpha} puts log-coordinates beyond {max_log}; use a larger alpha"
        )
    return EvalPoint(logs)


def remark_b_full_point(f: RemarkBFamily, max_log: float = LOG_BUDGET) -> EvalPoint:
    """(1, x_2, ..., x_n) rescaled onto prod x = 1, where (8) and (9) agree."""
    rest = remark_b_point(f, max_log)
    return nm.project_to_boundary(EvalPoint(np.concatenate([[0.0], rest.logx])))


def remark_b_constants(n: int) -> tuple[float, float]:
    """A and G of the family, which do not depend on alpha."""
    A = (n - 1.5 + (n - 2) / (2 * n)) / (n - 1)
    G = ((n - 1.5) * (2 * n) ** (2 - n)) ** (1 / (n - 1))
    return A, G


def remark_b_violation(n: int, alpha: float, max_log: float = LOG_BUDGET, **kw) -> Margin:
    """The (9) margin on the family; negative once alpha is close to 1."""
    rest = remark_b_point(RemarkBFamily(n, alpha), max_log)
    return check_ineq9(rest, alpha, force=True, **kw)


def remark_d_point(f: RemarkDFamily) -> EvalPoint:
    if f.n < 2:
        raise ValueError(f"needs n >= 2, got {f.n}")
    if not f.x > 1:
        raise ValueError(f"x must exceed 1, got {f.x}")
    return _spike_point(f.n, math.log(f.x))


def remark_d_limit(n: int, x: float) -> float:
    """Limit of the cyclic sum on the family as alpha -> -infinity."""
    if n < 2:
        raise ValueError(f"needs n >= 2, got {n}")
    return n - 1 - x ** n / (n - 1)


def remark_d_convergence(n: int, x: float, alphas) -> list[tuple[float, float]]:
    """Cyclic sum on the family for each alpha, in the order given."""
    if x == 1:
        p = EvalPoint(np.zeros(n))
    else:
        p = remark_d_point(RemarkDFamily(n, x))
    budget = np.max(np.abs(p.logx))
    out = []
    for a in alphas:
        if abs(a) * budget > LOG_BUDGET:
            raise ValueError(f"|alpha ln x| exceeds {LOG_BUDGET} at alpha = {a}")
        out.append((float(a), nm.eval_sum(p, a)))
    return out
