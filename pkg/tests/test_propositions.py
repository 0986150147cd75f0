import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclicineq import numerics as nm
from cyclicineq import propositions as P
from cyclicineq.errors import DegenerateGamma, HypothesisViolated, NonPositiveInput
from cyclicineq.numerics import EvalPoint, Verdict, make_point
from cyclicineq.propositions import PredicateId

from conftest import exact_sum, exact_term

HALF = make_point([2, F(1, 2)])


def power_sum(xs, k):
    return sum(F(x) ** k for x in xs)


def approx(v, tol=1e-12):
    return pytest.approx(float(v), abs=tol)


class TestProp1:
    def test_unit(self):
        m = P.check_prop1(make_point([1, 1, 1]), 2.5)
        assert m.value == 0 and m.verdict is Verdict.SATISFIED

    @pytest.mark.parametrize("xs,alpha", [([2, F(1, 2)], 3), ([4, 1, 1], 2)])
    def test_exact(self, xs, alpha):
        m = P.check_prop1(make_point(xs), alpha)
        assert m.value == approx(exact_sum(xs, alpha))
        assert m.verdict is Verdict.SATISFIED

    def test_refuses_out_of_range(self):
        with pytest.raises(HypothesisViolated):
            P.check_prop1(HALF, 0.5)
        with pytest.raises(HypothesisViolated):
            P.check_prop1(make_point([0.5, 0.5]), 2)

    def test_force_evaluates_anyway(self):
        m = P.check_prop1(make_point([0.5, 0.5]), 2, force=True)
        assert m.value == approx(exact_sum([F(1, 2), F(1, 2)], 2))


class TestProp2:
    def test_unit(self):
        assert P.check_prop2(make_point([1, 1]), 0).value == 0

    @pytest.mark.parametrize("alpha,expected", [(-1, F(9, 8)), (0, F(1, 2))])
    def test_exact(self, alpha, expected):
        assert -exact_sum([2, F(1, 2)], alpha) == expected
        m = P.check_prop2(HALF, alpha)
        assert m.value == approx(expected)
        assert m.verdict is Verdict.SATISFIED

    def test_range(self):
        with pytest.raises(HypothesisViolated):
            P.check_prop2(HALF, -1.5)
        with pytest.raises(HypothesisViolated):
            P.check_prop2(make_point([3]), 0.5)


class TestIneq2:
    def test_unit(self):
        assert P.check_ineq2(make_point([1, 1]), 0, 2.5).value == 0

    def test_large_coordinate_branch(self):
        assert P.check_ineq2(HALF, 0, 2).value == approx(F(2, 45))

    def test_small_coordinate_branch(self):
        xs = [F(1, 2), F(2)]
        expected = exact_term(xs, 0, 2) - (xs[0] - 1) / sum(xs)
        assert expected == F(4, 45)
        assert P.check_ineq2(make_point(xs), 0, 2).value == approx(expected)

    def test_range_is_case_one(self):
        with pytest.raises(HypothesisViolated):
            P.check_ineq2(HALF, 0, 3.5)
        P.check_ineq2(HALF, 0, 3.5, force=True)

    def test_index_required(self):
        with pytest.raises(TypeError):
            P.check(PredicateId.INEQ2, HALF, 2)
        with pytest.raises(IndexError):
            P.check_ineq2(HALF, 2, 2)


class TestPowerSumSteps:
    def test_ineq3(self):
        assert P.check_ineq3(make_point([1, 1, 1]), 0.5).value == 0
        assert P.check_ineq3(HALF, 0).value == approx(F(1, 2))
        assert P.check_ineq3(HALF, -1).value == approx(0)
        with pytest.raises(HypothesisViolated):
            P.check_ineq3(make_point([1, 1, 1]), -1)

    def test_ineq4(self):
        assert P.check_ineq4(make_point([1, 1]), 0.5).value == 0
        with pytest.raises(NonPositiveInput):
            P.check_ineq4(make_point([4, 0]), 0.5)
        assert P.check_ineq4(make_point([4, 1]), 0.5).value == approx(math.sqrt(2.5) - 1.5)
        with pytest.raises(HypothesisViolated):
            P.check_ineq4(make_point([4, 1]), 1.5)

    def test_ineq5(self):
        assert P.check_ineq5(make_point([1, 1, 1]), -3).value == 0
        assert P.check_ineq5(HALF, 0).value == approx(F(1, 4))
        assert P.check_ineq5(HALF, -1).value == approx(F(5, 4) - F(4, 5))

    def test_ineq6(self):
        assert P.check_ineq6(make_point([1, 1, 1]), -0.25).value == 0
        assert P.check_ineq6(HALF, -1).value == approx(0)
        assert P.check_ineq6(make_point([4, 1, 1]), -0.25).value == approx(2 - 2 ** -0.5)

    def test_ineq7(self):
        assert P.check_ineq7(make_point([1, 1, 1]), -0.25).value == 0
        assert P.check_ineq7(HALF, -0.5).value == approx(2.5 - 2 ** 0.5 - 2 ** -0.5)
        assert P.check_ineq7(make_point([4, 1, 1]), -0.5).value == approx(0)

    def test_reversed_power_sum(self):
        p = make_point([4, F(1, 2), F(1, 2)])
        expected = power_sum([4, F(1, 2), F(1, 2)], 2) - 5
        assert P.check_ineq3_reversed(p, 2).value == approx(expected)
        with pytest.raises(HypothesisViolated):
            P.check_ineq3_reversed(p, 0.5)


class TestCaseTwo:
    def test_ineq8_unit(self):
        assert P.check_ineq8(make_point([1, 1, 1]), 1, 3).value == 0

    def test_ineq8_exact(self):
        assert P.check_ineq8(HALF, 0, 3).value == approx(F(9, 85))

    def test_ineq8_range(self):
        with pytest.raises(HypothesisViolated):
            P.check_ineq8(make_point([1, 1, 1]), 0, 2)

    def test_ineq9_unit(self):
        assert P.check_ineq9(make_point([1, 1]), 3).value == 0

    def test_ineq9_remark_b_constants(self):
        rest = EvalPoint([math.log(1.5), -math.log(6)])
        m = P.check_ineq9(rest, 2.5)
        # A = 5/6 and G = 1/2 at gamma = 1
        assert m.rhs == approx(F(6, 5) - 1)
        assert m.lhs == approx(F(3) / (1 + F(3, 2) + F(1, 6)) * (2 - 1))

    def test_ineq9_gamma_zero(self):
        with pytest.raises(DegenerateGamma):
            P.check_ineq9(make_point([2, 3]), 1.0, force=True)

    def test_amgm(self):
        assert P.check_amgm_AgeG(make_point([1, 1]), 2).value == 0
        assert P.check_amgm_AgeG(make_point([4, 1]), 4).value == approx(4.5)
        rest = EvalPoint([math.log(1.5) / 0.5, -math.log(6) / 0.5])
        assert P.check_amgm_AgeG(rest, 1.75).value == approx(F(1, 3))


class TestProp2Step:
    def test_unit(self):
        assert P.check_prop2_step(make_point([1, 1]), 0, 0).value == 0

    @pytest.mark.parametrize("i,expected", [(0, F(4, 15)), (1, F(1, 30))])
    def test_exact(self, i, expected):
        assert P.check_prop2_step(HALF, i, 0).value == approx(expected)


class TestChain:
    def test_unit_point(self):
        reports = P.check_chain(make_point([1, 1, 1]), 2)
        assert all(r.margin.value == 0 for r in reports)
        assert all(r.margin.verdict is Verdict.SATISFIED for r in reports)

    def test_case_two_at_n2(self):
        reports = P.check_chain(HALF, 3)
        by = {}
        for r in reports:
            by.setdefault(r.predicate, []).append(r)
        assert by[PredicateId.INEQ8][0].margin.value == approx(F(9, 85))
        assert reports[-1].predicate is PredicateId.PROP1
        assert reports[-1].margin.value == approx(F(9, 17))

    def test_case_one_only_below_split(self):
        reports = P.check_chain(HALF, 2.5)
        preds = {r.predicate for r in reports}
        assert PredicateId.INEQ8 not in preds and PredicateId.INEQ2 in preds
        assert all(r.margin.verdict is Verdict.SATISFIED for r in reports)

    def test_both_cases_at_split(self):
        reports = P.check_chain(make_point([3, 0.5, 1]), 2.5)
        preds = {r.predicate for r in reports}
        assert {PredicateId.INEQ2, PredicateId.INEQ3, PredicateId.INEQ8, PredicateId.INEQ9} <= preds

    def test_report_round_trip(self):
        for r in P.check_chain(make_point([3, 0.5, 1]), 2.5):
            assert P.CheckReport.from_dict(r.to_dict()) == r


def test_every_predicate_registered():
    assert set(P.PREDICATES) == set(PredicateId)
    assert PredicateId.parse("ineq3") is PredicateId.INEQ3
    assert PredicateId.parse("AMGM_AGEG") is PredicateId.AMGM_AGEG


def test_hypotheses_follow_case_split():
    for n in range(2, 7):
        split = nm.case_split(n)
        assert P.get_predicate("ineq2").hypotheses(n, 1.5).alpha_range == (1.0, split)
        assert P.get_predicate("prop2").hypotheses(n, 0).alpha_range == (1 / (1 - n), 1.0)
        if n >= 3:
            assert P.get_predicate("ineq8").hypotheses(n, 3).alpha_range[0] == split


def test_precision_modes_agree():
    p = make_point([3, 0.25, 2])
    fast = P.check_prop1(p, 2.2, precision="fast")
    ext = P.check_prop1(p, 2.2, precision="extended")
    assert ext.precision == "extended" and ext.confirmed
    assert fast.value == pytest.approx(ext.value, abs=1e-14)


# --- properties ------------------------------------------------------------

boundary = st.lists(st.floats(-6, 6), min_size=2, max_size=6).map(
    lambda L: nm.project_to_boundary(EvalPoint(L)))


@settings(max_examples=150, deadline=None)
@given(boundary, st.floats(0, 1))
def test_case_one_soundness(p, t):
    alpha = 1 + t * (nm.case_split(p.n) - 1)
    steps = [P.check_ineq2(p, i, alpha, precision="fast").value for i in range(p.n)]
    steps.append(P.check_ineq3(p, 2 - alpha, precision="fast").value)
    if min(steps) >= 0:
        assert P.check_prop1(p, alpha, precision="fast").value >= -1e-9


@settings(max_examples=150, deadline=None)
@given(boundary, st.floats(0, 3))
def test_case_two_soundness_and_telescoping(p, t):
    alpha = nm.case_split(p.n) + t
    L = p.logx[None, :]
    _, rhs = P.sides_batch("ineq8", L, alpha)
    assert abs(math.fsum(rhs[0])) <= 1e-12
    margins = [P.check_ineq8(p, i, alpha, precision="fast").value for i in range(p.n)]
    if min(margins) >= 0:
        assert P.check_prop1(p, alpha, precision="fast").value >= -1e-9


@settings(max_examples=150, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=5), st.floats(1.05, 6))
def test_ineq8_and_ineq9_signs_agree(rest, alpha):
    rest = EvalPoint(rest)
    full = nm.project_to_boundary(EvalPoint(np.concatenate([[0.0], rest.logx])))
    m8 = P.check_ineq8(full, 0, alpha, force=True, precision="fast")
    m9 = P.check_ineq9(rest, alpha, force=True, precision="fast")
    if abs(m8.value) > 1e-8 and abs(m9.value) > 1e-8:
        assert math.copysign(1, m8.value) == math.copysign(1, m9.value)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.floats(-6, 6), min_size=2, max_size=6), st.floats(1.0001, 6))
def test_reversal_above_one(L, beta):
    p = nm.project_to_boundary(EvalPoint(L))
    assert P.check_ineq3_reversed(p, beta, precision="fast").value >= -1e-9 * (
        1 + abs(P.check_ineq3_reversed(p, beta, precision="fast").lhs))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=6), st.floats(0, 3))
def test_reversal_reciprocal_regime(L, s):
    p = nm.project_to_boundary(EvalPoint(L))
    beta = 1 - p.n - s
    assert P.check_ineq3_reversed(p, beta).verdict is Verdict.SATISFIED


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-8, 8), min_size=1, max_size=1), st.floats(1.001, 8))
def test_ineq9_holds_for_n2(rest, alpha):
    assert P.check_ineq9(EvalPoint(rest), alpha).verdict is Verdict.SATISFIED


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-8, 8), min_size=1, max_size=6), st.floats(1.001, 8))
def test_amgm_unconditional(rest, alpha):
    assert P.check_amgm_AgeG(EvalPoint(rest), alpha).verdict is Verdict.SATISFIED
