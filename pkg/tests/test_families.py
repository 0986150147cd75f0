import math
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclicineq import families as fam
from cyclicineq import numerics as nm
from cyclicineq import propositions as P
from cyclicineq.errors import DegenerateGamma
from cyclicineq.families import LimitDirection as LD
from cyclicineq.families import RemarkAFamily, RemarkBFamily, RemarkDFamily
from cyclicineq.numerics import Verdict


class TestRemarkA:
    @pytest.mark.parametrize("n,x,expected", [(3, 1, [1, 1, 1]), (3, 2, [4, 0.5, 0.5]),
                                              (4, 2, [8, 0.5, 0.5, 0.5])])
    def test_points(self, n, x, expected):
        p = fam.remark_a_point(RemarkAFamily(n, x))
        np.testing.assert_allclose(p.x, expected, rtol=1e-15)
        assert abs(nm.log_product(p)) <= 1e-12

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            fam.remark_a_point(RemarkAFamily(2, 2.0))

    @pytest.mark.parametrize("x,expected", [(2, F(3, 4)), (F(1, 2), F(-3, 4)), (1, 0)])
    def test_difference_exact(self, x, expected):
        xs = [F(x) ** 2, 1 / F(x), 1 / F(x)]
        assert sum(xs) - sum(v ** -1 for v in xs) == expected
        assert fam.remark_a_difference(RemarkAFamily(3, x, -1)) == pytest.approx(
            float(expected), abs=1e-12)

    @settings(max_examples=200)
    @given(st.integers(3, 8), st.floats(-5, 1), st.floats(0.1, 10))
    def test_difference_matches_point(self, n, beta, x):
        f = RemarkAFamily(n, x, beta)
        m = P.check_ineq3(fam.remark_a_point(f), beta, force=True, precision="fast")
        d = fam.remark_a_difference(f)
        assert d == pytest.approx(m.value, rel=1e-10, abs=1e-10 * (1 + abs(m.lhs) + abs(m.rhs)))

    @settings(max_examples=200)
    @given(st.floats(0.05, 20))
    def test_antisymmetry_at_beta_minus_one(self, x):
        a = fam.remark_a_difference(RemarkAFamily(3, x, -1))
        b = fam.remark_a_difference(RemarkAFamily(3, 1 / x, -1))
        assert a == pytest.approx(-b, abs=1e-12 * (1 + abs(a)))

    def test_limit_labels(self):
        assert fam.remark_a_limit_direction(3, -1) == (LD.PLUS_INFINITY_AT_LARGE_X,
                                                       LD.MINUS_INFINITY_AT_SMALL_X)
        assert fam.remark_a_limit_direction(3, 0.5) == (LD.PLUS_INFINITY_AT_LARGE_X,)
        assert fam.remark_a_limit_direction(3, -3) == (LD.MINUS_INFINITY_AT_SMALL_X,)
        assert fam.remark_a_limit_direction(3, 1.5) == (LD.NOT_APPLICABLE,)

    @pytest.mark.parametrize("beta", [-1, 0.5, -3])
    def test_probes_diverge_monotonically(self, beta):
        for d in fam.remark_a_limit_direction(3, beta):
            vals = fam.remark_a_probe(3, beta, d)
            if d is LD.PLUS_INFINITY_AT_LARGE_X:
                assert vals[0] > 0 and vals[0] < vals[1] < vals[2]
            else:
                assert vals[0] < 0 and vals[0] > vals[1] > vals[2]


class TestRemarkB:
    def test_gamma_one_point(self):
        p = fam.remark_b_point(RemarkBFamily(3, 2.5))
        np.testing.assert_allclose(p.x, [1.5, 1 / 6], rtol=1e-15)

    def test_n4_logs(self):
        p = fam.remark_b_point(RemarkBFamily(4, 3))
        g = 1.5
        np.testing.assert_allclose(p.logx, [math.log(2.5) / g] + [-math.log(8) / g] * 2)

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_alpha_independence(self, n):
        A0, G0 = fam.remark_b_constants(n)
        for alpha in (1.1, 2, 5):
            rest = fam.remark_b_point(RemarkBFamily(n, alpha))
            with mpmath.workdps(30):
                _, _, A, G = P._hp_a_g(rest, alpha)
            assert float(A) == pytest.approx(A0, rel=1e-10)
            assert float(G) == pytest.approx(G0, rel=1e-10)

    def test_n3_constants_exact(self):
        A, G = fam.remark_b_constants(3)
        assert A == pytest.approx(5 / 6, abs=1e-15) and G == pytest.approx(0.5, abs=1e-15)

    def test_violation_and_limit(self):
        margins = [fam.remark_b_violation(3, a) for a in (1.2, 1.1, 1.05)]
        assert margins[-1].verdict is Verdict.VIOLATED and margins[-1].confirmed
        assert margins[-1].rhs == pytest.approx(0.2, abs=1e-12)
        assert 0 <= margins[-1].lhs < 0.01
        values = [m.value for m in margins]
        assert values[0] > values[1] > values[2] > -0.2
        lhs = [m.lhs for m in margins]
        assert lhs[0] > lhs[1] > lhs[2] > 0

    def test_satisfied_at_split(self):
        assert fam.remark_b_violation(3, 2.5).verdict is Verdict.SATISFIED

    def test_degenerate_gamma(self):
        with pytest.raises(DegenerateGamma):
            fam.remark_b_point(RemarkBFamily(3, 1 + 1e-4))
        p = fam.remark_b_point(RemarkBFamily(3, 1 + 1e-4), max_log=1e5)
        assert p.logx.max() > 700

    def test_full_point_is_on_boundary(self):
        p = fam.remark_b_full_point(RemarkBFamily(3, 1.05))
        assert abs(nm.log_product(p)) <= 1e-12
        m = P.check_ineq8(p, 0, 1.05, force=True)
        assert m.verdict is Verdict.VIOLATED and m.confirmed


class TestRemarkD:
    def test_point(self):
        p = fam.remark_d_point(RemarkDFamily(3, 1.2))
        np.testing.assert_allclose(p.x, [1.44, 1 / 1.2, 1 / 1.2])
        with pytest.raises(ValueError):
            fam.remark_d_point(RemarkDFamily(3, 0.9))

    def test_limits(self):
        assert fam.remark_d_limit(3, 1.0) == 1.5
        assert fam.remark_d_limit(3, 4 ** (1 / 3)) == pytest.approx(0, abs=1e-15)
        assert fam.remark_d_limit(2, 1.5) == -1.25
        assert fam.remark_d_limit(3, 1.2) == pytest.approx(1.136, abs=1e-15)

    def test_unit_point(self):
        assert fam.remark_d_convergence(3, 1, [-10, -40]) == [(-10.0, 0.0), (-40.0, 0.0)]

    def test_convergence_is_monotone_and_matches_oracle(self):
        # the gap to the limit shrinks geometrically, but only like x^alpha
        table = fam.remark_d_convergence(3, 1.2, [-10, -20, -40, -60, -100])
        limit = fam.remark_d_limit(3, 1.2)
        gaps = [abs(v - limit) for _, v in table]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        assert all(v > 0 for _, v in table)
        p = fam.remark_d_point(RemarkDFamily(3, 1.2))
        for a, v in table:
            assert v == pytest.approx(float(nm.eval_sum_hp(p, a)), abs=1e-13)

    def test_log_budget(self):
        with pytest.raises(ValueError):
            fam.remark_d_convergence(3, 1.5, [-900])

    @settings(max_examples=100, deadline=None)
    @given(st.integers(3, 6), st.floats(1.01, 1.4))
    def test_positive_where_predicted(self, n, x):
        if x ** n < (n - 1) ** 2:
            [(_, v)] = fam.remark_d_convergence(n, x, [-60])
            assert v > 0
