"""Margin checkers for the two propositions and each step of their proofs.

Each predicate has a vectorised float64 implementation (log-domain) and an
independent mpmath implementation written from the direct formulas. The
float path decides most points; anything it cannot clearly sign is settled
by the mpmath path through :func:`cyclicineq.numerics.adjudicate`.

Checkers refuse inputs outside the hypotheses under which their inequality
is claimed, unless called with ``force=True``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath
import numpy as np
from scipy.special import logsumexp

from . import numerics as nm
from .errors import DegenerateGamma, HypothesisViolated
from .numerics import EPS, HP_DPS, EvalPoint, Margin, Verdict


class PredicateId(str, enum.Enum):
    PROP1 = "Prop1"
    PROP2 = "Prop2"
    INEQ2 = "Ineq2"
    INEQ3 = "Ineq3"
    INEQ4 = "Ineq4"
    INEQ5 = "Ineq5"
    INEQ6 = "Ineq6"
    INEQ7 = "Ineq7"
    INEQ8 = "Ineq8"
    INEQ9 = "Ineq9"
    AMGM_AGEG = "AMGM_AgeG"
    PROP2_STEP = "Prop2Step"
    # sum x^beta >= sum x, the reversal of (3) outside its beta range
    INEQ3_REV = "Ineq3Rev"

    @classmethod
    def parse(cls, name: str) -> "PredicateId":
        key = name.strip().lower().replace("-", "_")
        for member in cls:
            if member.value.lower() == key or member.name.lower() == key:
                return member
        raise ValueError(f"unknown predicate {name!r}")


def _reciprocal_bound(n: int) -> float:
    """``1/(1-n)``, the lower end of the beta range; unbounded for n = 1."""
    return -math.inf if n < 2 else 1.0 / (1 - n)


RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class Hypotheses:
    n: int
    param: str
    lo: float
    hi: float
    lo_open: bool = False
    requires_feasible: bool = False
    requires_boundary: bool = False
    min_n: int = 1

    @property
    def alpha_range(self):
        return (self.lo, self.hi)

    def admits(self, value: float) -> bool:
        # closed ends absorb rounding, e.g. beta = 2 - alpha at the case split
        lo = self.lo if self.lo_open else self.lo - RANGE_SLACK * (1 + abs(self.lo))
        hi = self.hi + RANGE_SLACK * (1 + abs(self.hi))
        above = value > lo if self.lo_open else value >= lo
        return self.n >= self.min_n and above and value <= hi

    def validate(self, value: float, p: Optional[EvalPoint] = None) -> None:
        if self.n < self.min_n:
            raise HypothesisViolated(f"needs n >= {self.min_n}, got n = {self.n}")
        if not self.admits(value):
            bracket = "(" if self.lo_open else "["
            raise HypothesisViolated(
                f"{self.param} = {value} outside {bracket}{self.lo}, {self.hi}]"
            )
        if p is None:
            return
        if self.requires_boundary and not nm.on_boundary(p):
            raise HypothesisViolated("point must satisfy prod x = 1")
        if self.requires_feasible and not nm.is_feasible(p):
            raise HypothesisViolated("point must satisfy prod x >= 1")


# --- float64 sides, shape (m,) or (m, n) when every index is requested --------


def _pick(arr, i):
    return arr if i is None else arr[:, i]


def _sum_exp(L, c=1.0):
    with np.errstate(over="ignore"):
        return nm.neumaier_sum(np.exp(c * L))


def _fast_prop1(L, alpha, i):
    return nm.eval_sum_batch(L, alpha), np.zeros(L.shape[0])


def _fast_prop2(L, alpha, i):
    return np.zeros(L.shape[0]), nm.eval_sum_batch(L, alpha)


def _fast_ineq2(L, alpha, i):
    beta = 2.0 - alpha
    LS = logsumexp(L, axis=1, keepdims=True)
    rhs = -nm._scaled_power_diff(L, LS, (beta - 1.0) * L)
    return _pick(nm.terms_batch(L, alpha), i), _pick(rhs, i)


def _fast_ineq3(L, beta, i):
    return _sum_exp(L), _sum_exp(L, beta)


def _fast_ineq3_rev(L, beta, i):
    return _sum_exp(L, beta), _sum_exp(L)


def _fast_ineq4(L, beta, i):
    log_mean = logsumexp(L, axis=1) - math.log(L.shape[1])
    return np.exp(beta * log_mean), np.exp(logsumexp(beta * L, axis=1) - math.log(L.shape[1]))


def _fast_ineq5(L, beta, i):
    log_mean = logsumexp(L, axis=1) - math.log(L.shape[1])
    return np.exp(log_mean), np.exp(beta * log_mean)


def _fast_ineq6(L, beta, i):
    n = L.shape[1]
    return _sum_exp(L, beta * (1 - n)), _sum_exp(L, beta)


def _fast_ineq7(L, beta, i):
    n = L.shape[1]
    return _sum_exp(L), _sum_exp(L, beta * (1 - n))


def _fast_ineq8(L, alpha, i):
    n = L.shape[1]
    g = nm.gamma_of(n, alpha)
    share = np.exp(g * L - logsumexp(g * L, axis=1, keepdims=True))
    rhs = (n * share - 1.0) / (n - 1)
    return _pick(nm.terms_batch(L, alpha), i), _pick(rhs, i)


def _check_gamma(n, alpha):
    g = nm.gamma_of(n, alpha)
    if g == 0.0:
        raise DegenerateGamma(f"gamma vanishes at alpha = {alpha}")
    return g


def _a_minus_one(R, g):
    """``A - 1`` for ``A = mean(exp(g * R))``, accurate when ``g * R`` is tiny."""
    gR = g * R
    with np.errstate(over="ignore"):
        series = np.mean(np.expm1(np.minimum(gR, 1.0)), axis=1)
        direct = np.expm1(logsumexp(gR, axis=1) - math.log(R.shape[1]))
    return np.where(np.max(np.abs(gR), axis=1) < 1.0, series, direct)


def _fast_ineq9(R, alpha, i):
    n = R.shape[1] + 1
    g = _check_gamma(n, alpha)
    sum_log = nm.neumaier_sum(R)
    inv_g_minus_one = np.expm1(-(alpha - 1.0) / n * sum_log)
    weight = n * np.exp(-np.logaddexp(0.0, logsumexp(R, axis=1)))
    am1 = _a_minus_one(R, g)
    # A underflowing to 0 gives 1/A - 1 = +inf, which is the right answer
    with np.errstate(invalid="ignore", divide="ignore"):
        inv_a_minus_one = np.where(np.isinf(am1), -1.0, -am1 / (1.0 + am1))
    return weight * inv_g_minus_one, inv_a_minus_one


def _fast_amgm(R, alpha, i):
    n = R.shape[1] + 1
    g = _check_gamma(n, alpha)
    log_g = g / (n - 1) * nm.neumaier_sum(R)
    am1 = _a_minus_one(R, g)
    return 1.0 + am1, np.exp(log_g)


def _fast_prop2_step(L, alpha, i):
    LS = logsumexp(L, axis=1, keepdims=True)
    lhs = nm._scaled_power_diff(L, LS, (alpha - 1.0) * L)
    return _pick(lhs, i), _pick(nm.terms_batch(L, alpha), i)


# --- mpmath sides, direct formulas ----------------------------------------------


def _mp(p):
    return nm.hp_coords(p)[1]


def _hp_prop1(p, alpha, i):
    return mpmath.fsum(nm.hp_terms(p, alpha, mpmath.mp.dps)), mpmath.mpf(0)


def _hp_prop2(p, alpha, i):
    return mpmath.mpf(0), mpmath.fsum(nm.hp_terms(p, alpha, mpmath.mp.dps))


def _hp_ineq2(p, alpha, i):
    xs = _mp(p)
    xi = xs[i]
    rhs = (xi - xi ** (2 - nm.to_mpf(alpha))) / mpmath.fsum(xs)
    return nm.hp_terms(p, alpha, mpmath.mp.dps)[i], rhs


def _hp_power_sums(p, c_lhs, c_rhs):
    xs = _mp(p)
    return (mpmath.fsum(x ** c_lhs for x in xs), mpmath.fsum(x ** c_rhs for x in xs))


def _hp_ineq3(p, beta, i):
    return _hp_power_sums(p, 1, nm.to_mpf(beta))


def _hp_ineq3_rev(p, beta, i):
    return _hp_power_sums(p, nm.to_mpf(beta), 1)


def _hp_ineq4(p, beta, i):
    xs = _mp(p)
    b = nm.to_mpf(beta)
    n = len(xs)
    return (mpmath.fsum(xs) / n) ** b, mpmath.fsum(x ** b for x in xs) / n


def _hp_ineq5(p, beta, i):
    xs = _mp(p)
    mean = mpmath.fsum(xs) / len(xs)
    return mean, mean ** nm.to_mpf(beta)


def _hp_ineq6(p, beta, i):
    b = nm.to_mpf(beta)
    return _hp_power_sums(p, b * (1 - len(p)), b)


def _hp_ineq7(p, beta, i):
    return _hp_power_sums(p, 1, nm.to_mpf(beta) * (1 - len(p)))


def _hp_ineq8(p, alpha, i):
    xs = _mp(p)
    n = len(xs)
    g = (n - 1) * (nm.to_mpf(alpha) - 1) / n
    pw = [x ** g for x in xs]
    total = mpmath.fsum(pw)
    rhs = (n * pw[i] - total) / ((n - 1) * total)
    return nm.hp_terms(p, alpha, mpmath.mp.dps)[i], rhs


def _hp_a_g(p, alpha):
    ls, xs = nm.hp_coords(p)
    n = len(xs) + 1
    a1 = nm.to_mpf(alpha) - 1
    g = (n - 1) * a1 / n
    A = mpmath.fsum(x ** g for x in xs) / (n - 1)
    G = mpmath.exp(a1 / n * mpmath.fsum(ls))
    return xs, n, A, G


def _hp_ineq9(p, alpha, i):
    xs, n, A, G = _hp_a_g(p, alpha)
    lhs = n / (1 + mpmath.fsum(xs)) * (1 / G - 1)
    return lhs, 1 / A - 1


def _hp_amgm(p, alpha, i):
    _, _, A, G = _hp_a_g(p, alpha)
    return A, G


def _hp_prop2_step(p, alpha, i):
    xs = _mp(p)
    xi = xs[i]
    lhs = (xi ** nm.to_mpf(alpha) - xi) / mpmath.fsum(xs)
    return lhs, nm.hp_terms(p, alpha, mpmath.mp.dps)[i]


# --- hypotheses ---------------------------------------------------------------------


def _hyp_prop1(n, alpha):
    return Hypotheses(n, "alpha", 1.0, math.inf, requires_feasible=True)


def _hyp_prop2(n, alpha):
    return Hypotheses(n, "alpha", _reciprocal_bound(n), 1.0, requires_feasible=True, min_n=2)


def _hyp_case1(n, alpha):
    return Hypotheses(n, "alpha", 1.0, nm.case_split(n))


def _hyp_ineq3(n, beta):
    return Hypotheses(n, "beta", _reciprocal_bound(n), 1.0, requires_feasible=True)


def _hyp_ineq3_rev(n, beta):
    if beta > 1:
        return Hypotheses(n, "beta", 1.0, math.inf, lo_open=True, requires_feasible=True)
    return Hypotheses(n, "beta", -math.inf, 1.0 - n, requires_boundary=True)


def _hyp_ineq4(n, beta):
    return Hypotheses(n, "beta", 0.0, 1.0)


def _hyp_ineq5(n, beta):
    return Hypotheses(n, "beta", -math.inf, 1.0, requires_feasible=True)


def _hyp_ineq6(n, beta):
    return Hypotheses(n, "beta", _reciprocal_bound(n), 0.0, requires_feasible=True)


def _hyp_ineq7(n, beta):
    # 0 <= beta (1 - n) <= 1
    lo = -math.inf if n < 2 else 1.0 / (1 - n)
    return Hypotheses(n, "beta", lo, 0.0, requires_feasible=True)


def _hyp_ineq8(n, alpha):
    lo = 1.0 if n == 2 else nm.case_split(n)
    return Hypotheses(n, "alpha", lo, math.inf, requires_feasible=True, min_n=2)


def _hyp_ineq9(n, alpha):
    if n == 2:
        return Hypotheses(n, "alpha", 1.0, math.inf, lo_open=True, min_n=2)
    return Hypotheses(n, "alpha", nm.case_split(n), math.inf, min_n=2)


def _hyp_amgm(n, alpha):
    return Hypotheses(n, "alpha", 1.0, math.inf, lo_open=True, min_n=2)


def _hyp_prop2_step(n, alpha):
    return Hypotheses(n, "alpha", _reciprocal_bound(n), 1.0)


@dataclass(frozen=True)
class Predicate:
    id: PredicateId
    param: str
    fast: Callable
    hp: Callable
    hypotheses: Callable[[int, float], Hypotheses]
    indexed: bool = False
    rest_form: bool = False

    def dimension(self, p: EvalPoint) -> int:
        """The n of the inequality; rest-form points carry only x_2..x_n."""
        return p.n + 1 if self.rest_form else p.n


PREDICATES = {
    pred.id: pred
    for pred in [
        Predicate(PredicateId.PROP1, "alpha", _fast_prop1, _hp_prop1, _hyp_prop1),
        Predicate(PredicateId.PROP2, "alpha", _fast_prop2, _hp_prop2, _hyp_prop2),
        Predicate(PredicateId.INEQ2, "alpha", _fast_ineq2, _hp_ineq2, _hyp_case1, indexed=True),
        Predicate(PredicateId.INEQ3, "beta", _fast_ineq3, _hp_ineq3, _hyp_ineq3),
        Predicate(PredicateId.INEQ4, "beta", _fast_ineq4, _hp_ineq4, _hyp_ineq4),
        Predicate(PredicateId.INEQ5, "beta", _fast_ineq5, _hp_ineq5, _hyp_ineq5),
        Predicate(PredicateId.INEQ6, "beta", _fast_ineq6, _hp_ineq6, _hyp_ineq6),
        Predicate(PredicateId.INEQ7, "beta", _fast_ineq7, _hp_ineq7, _hyp_ineq7),
        Predicate(PredicateId.INEQ8, "alpha", _fast_ineq8, _hp_ineq8, _hyp_ineq8, indexed=True),
        Predicate(PredicateId.INEQ9, "alpha", _fast_ineq9, _hp_ineq9, _hyp_ineq9, rest_form=True),
        Predicate(PredicateId.AMGM_AGEG, "alpha", _fast_amgm, _hp_amgm, _hyp_amgm, rest_form=True),
        Predicate(
            PredicateId.PROP2_STEP, "alpha", _fast_prop2_step, _hp_prop2_step,
            _hyp_prop2_step, indexed=True,
        ),
        Predicate(PredicateId.INEQ3_REV, "beta", _fast_ineq3_rev, _hp_ineq3_rev, _hyp_ineq3_rev),
    ]
}


def get_predicate(pred) -> Predicate:
    if isinstance(pred, Predicate):
        return pred
    if isinstance(pred, str) and not isinstance(pred, PredicateId):
        pred = PredicateId.parse(pred)
    return PREDICATES[pred]


def sides_batch(pred, L, param: float, i: Optional[int] = None):
    """Float64 ``(lhs, rhs)`` for every row of ``L``.

    For indexed predicates ``i=None`` returns all n indices as (m, n) arrays.
    Non-indexed predicates ignore ``i``.
    """
    pred = get_predicate(pred)
    L = nm._as_batch(L)
    if pred.indexed and i is not None and not 0 <= i < L.shape[1]:
        raise IndexError(f"index {i} out of range for n={L.shape[1]}")
    return pred.fast(L, param, i)


def margins_batch(pred, L, param: float, i: Optional[int] = None):
    """Margins and their tolerance scales; indexed predicates reduce over i."""
    with np.errstate(over="ignore", invalid="ignore"):
        lhs, rhs = sides_batch(pred, L, param, i)
        value = lhs - rhs
        band = nm.tolerance_band(lhs, rhs, 1.0)
    if value.ndim == 2:
        with np.errstate(invalid="ignore"):
            k = np.argmin(np.where(np.isnan(value), -np.inf, value / band), axis=1)
        rows = np.arange(value.shape[0])
        return value[rows, k], band[rows, k], k
    return value, band, None


def hp_sides(pred, p, param, i=None, dps: int = HP_DPS):
    """``(lhs, rhs)`` as mpf at ``dps`` digits; ``p`` is a point or its log-coordinates."""
    pred = get_predicate(pred)
    if not isinstance(p, EvalPoint):
        p = EvalPoint(p)
    with mpmath.workdps(dps):
        return pred.hp(p, param, i)


def check(
    pred,
    p: EvalPoint,
    param: float,
    i: Optional[int] = None,
    *,
    force: bool = False,
    tol: float = EPS,
    precision: str = "auto",
) -> Margin:
    """Margin of one predicate at one point.

    ``precision`` is ``"auto"`` (fast, escalating anything not clearly
    satisfied), ``"fast"`` (never escalate; Violated stays unconfirmed) or
    ``"extended"`` (always use the mpmath route).
    """
    pred = get_predicate(pred)
    n = pred.dimension(p)
    if pred.indexed:
        if i is None:
            raise TypeError(f"{pred.id.value} needs a term index")
        if not 0 <= i < p.n:
            raise IndexError(f"index {i} out of range for n={p.n}")
    if not force:
        pred.hypotheses(n, param).validate(param, None if pred.rest_form else p)
    if pred.rest_form:
        _check_gamma(n, param)

    def hp(dps):
        return hp_sides(pred, p, param, i, dps)

    if precision == "extended":
        return nm.adjudicate(hp, tol)
    lhs, rhs = (float(np.ravel(s)[0]) for s in sides_batch(pred, p.logx, param, i))
    verdict = nm.classify(lhs, rhs, tol)
    if verdict is Verdict.SATISFIED or precision == "fast":
        return Margin(lhs - rhs, verdict, tol, lhs, rhs, "fast", False)
    return nm.adjudicate(hp, tol)


def check_prop1(p, alpha, **kw):
    return check(PredicateId.PROP1, p, alpha, **kw)


def check_prop2(p, alpha, **kw):
    return check(PredicateId.PROP2, p, alpha, **kw)


def check_ineq2(p, i, alpha, **kw):
    return check(PredicateId.INEQ2, p, alpha, i, **kw)


def check_ineq3(p, beta, **kw):
    return check(PredicateId.INEQ3, p, beta, **kw)


def check_ineq3_reversed(p, beta, **kw):
    return check(PredicateId.INEQ3_REV, p, beta, **kw)


def check_ineq4(p, beta, **kw):
    return check(PredicateId.INEQ4, p, beta, **kw)


def check_ineq5(p, beta, **kw):
    return check(PredicateId.INEQ5, p, beta, **kw)


def check_ineq6(p, beta, **kw):
    return check(PredicateId.INEQ6, p, beta, **kw)


def check_ineq7(p, beta, **kw):
    return check(PredicateId.INEQ7, p, beta, **kw)


def check_ineq8(p, i, alpha, **kw):
    return check(PredicateId.INEQ8, p, alpha, i, **kw)


def check_ineq9(rest, alpha, **kw):
    return check(PredicateId.INEQ9, rest, alpha, **kw)


def check_amgm_AgeG(rest, alpha, **kw):
    return check(PredicateId.AMGM_AGEG, rest, alpha, **kw)


def check_prop2_step(p, i, alpha, **kw):
    return check(PredicateId.PROP2_STEP, p, alpha, i, **kw)


def rotation_rest(p: EvalPoint, k: int) -> EvalPoint:
    """x_j / x_k for j != k: the point normalised so coordinate k equals 1."""
    others = np.delete(p.logx, k)
    return EvalPoint(others - p.logx[k])


@dataclass
class CheckReport:
    predicate: PredicateId
    inputs: dict
    margin: Margin
    precision: str = field(default="fast")

    def to_dict(self) -> dict:
        return {
            "predicate": self.predicate.value,
            "inputs": self.inputs,
            "margin": self.margin.to_dict(),
            "precision": self.precision,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        return cls(
            PredicateId(d["predicate"]), d["inputs"], Margin.from_dict(d["margin"]), d["precision"]
        )


def _report(pred_id, p, param_name, value, margin, index=None, **extra):
    from .reports import encode_logx

    inputs = {"logx": encode_logx(p.logx), param_name: value}
    if index is not None:
        inputs["index"] = index
    inputs.update(extra)
    return CheckReport(pred_id, inputs, margin, margin.precision)


def check_chain(
    p: EvalPoint, alpha: float, *, tol: float = EPS, precision: str = "auto"
) -> list[CheckReport]:
    """Run the proof chain matching alpha's case and finish with Proposition 1.

    At ``alpha = 2 + 1/(n-1)`` both chains run.
    """
    if alpha < 1:
        raise HypothesisViolated(f"the chain needs alpha >= 1, got {alpha}")
    if not nm.is_feasible(p):
        raise HypothesisViolated("point must satisfy prod x >= 1")
    kw = dict(tol=tol, precision=precision)
    n = p.n
    split = nm.case_split(n)
    out = []
    if n >= 2 and alpha <= split:
        beta = 2.0 - alpha
        for i in range(n):
            out.append(_report(PredicateId.INEQ2, p, "alpha", alpha,
                               check_ineq2(p, i, alpha, **kw), i))
        out.append(_report(PredicateId.INEQ3, p, "beta", beta, check_ineq3(p, beta, **kw)))
        if 0.0 <= beta <= 1.0:
            out.append(_report(PredicateId.INEQ4, p, "beta", beta, check_ineq4(p, beta, **kw)))
            out.append(_report(PredicateId.INEQ5, p, "beta", beta, check_ineq5(p, beta, **kw)))
        if _reciprocal_bound(n) <= beta <= 0.0:
            out.append(_report(PredicateId.INEQ6, p, "beta", beta, check_ineq6(p, beta, **kw)))
            out.append(_report(PredicateId.INEQ7, p, "beta", beta, check_ineq7(p, beta, **kw)))
    if n >= 2 and alpha >= split:
        for i in range(n):
            out.append(_report(PredicateId.INEQ8, p, "alpha", alpha,
                               check_ineq8(p, i, alpha, **kw), i))
        for k in range(n):
            rest = rotation_rest(p, k)
            out.append(_report(PredicateId.INEQ9, rest, "alpha", alpha,
                               check_ineq9(rest, alpha, **kw), rotation=k))
            out.append(_report(PredicateId.AMGM_AGEG, rest, "alpha", alpha,
                               check_amgm_AgeG(rest, alpha, **kw), rotation=k))
    out.append(_report(PredicateId.PROP1, p, "alpha", alpha, check_prop1(p, alpha, **kw)))
    return out
