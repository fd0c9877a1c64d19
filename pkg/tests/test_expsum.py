"""Phases, S_k, bilinear sums, bound reports, Weyl-van der Corput and the regression grid."""
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from psgoldbach.exact_arith import RationalExponent
from psgoldbach.expsum import (
    BoundReport, ExpSumParams, SkEvaluator, TypeRangeClass, bound_sk, bound_second_deriv,
    bound_third_deriv, exp_sum_sk, derivative_test_report, monomial_sum, sk_bound, type_I_sum,
    type_II_sum, type_sum_bound, weyl_vdc_sides,
)
from psgoldbach.expsum.phases import dyadic, linear_phase, smooth_phase
from psgoldbach.expsum.regression import DEFAULT_GRID, run_grid, run_instance, weyl_trials


def mp_e(x):
    return complex(mpmath.expjpi(2 * x))


def mp_phase(m, coeffs, gammas, alpha=0.0):
    with mpmath.workdps(60):
        t = mpmath.mpf(alpha) * m + mpmath.fsum(
            mpmath.mpf(a) * mpmath.mpf(m) ** (mpmath.mpf(g.num) / g.den)
            for a, g in zip(coeffs, gammas))
        return float(t - mpmath.floor(t))


def phase_dist(a, b):
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


class TestPhases:
    def test_dyadic(self):
        assert dyadic(0.375) == (3, 3)
        assert dyadic(5) == (5, 0)

    @given(st.integers(1, 10 ** 9), st.floats(-1e6, 1e6).filter(lambda a: a != 0))
    def test_smooth_phase_mpmath(self, m, a):
        g = RationalExponent.parse("7/10")
        got = smooth_phase([m], [a], [g])[0]
        assert phase_dist(got, mp_phase(m, [a], [g])) < 1e-12

    def test_large_argument_phase(self):
        # float evaluation of a m^g at m ~ 1e15 has no correct fractional digits
        g = RationalExponent.parse("9/10")
        m = 10 ** 15 + 7
        got = smooth_phase([m], [1.0], [g])[0]
        assert phase_dist(got, mp_phase(m, [1.0], [g])) < 1e-12

    @given(st.integers(1, 10 ** 12), st.floats(0, 1))
    def test_linear_phase(self, m, alpha):
        got = linear_phase([m], alpha)[0]
        exact = Fraction(alpha) * m
        assert phase_dist(got, float(exact - math.floor(exact))) < 1e-15


class TestSk:
    def test_against_direct_sum(self):
        gammas = [RationalExponent.parse(g) for g in ("9/10", "4/5", "7/10")]
        coeffs = (1.0, -0.5, 2.0)
        p = ExpSumParams(0.3, coeffs, gammas, 200, 400)
        direct = sum(mp_e(mp_phase(m, coeffs, gammas, 0.3)) for m in range(201, 401))
        assert abs(exp_sum_sk(p) - direct) < 1e-9

    def test_evaluator_reuse(self):
        ev = SkEvaluator((1.0, 1.0, 1.0), ("9/10", "4/5", "7/10"), 100, 200)
        for a in (0.0, 0.25, 0.6180339887):
            p = ExpSumParams(a, (1.0, 1.0, 1.0), ("9/10", "4/5", "7/10"), 100, 200)
            assert ev(a) == exp_sum_sk(p)

    def test_trivial_bound(self):
        p = ExpSumParams(0.1, (1.0, 1.0, 1.0), ("9/10", "4/5", "7/10"), 1000, 2000)
        assert abs(exp_sum_sk(p)) <= p.length

    @pytest.mark.parametrize("kw", [dict(alpha=1.5), dict(M1=5000), dict(coeffs=(0.0, 1.0, 1.0)),
                                    dict(coeffs=(1.0, 1.0))])
    def test_params_validation(self, kw):
        base = dict(alpha=0.1, coeffs=(1.0, 1.0, 1.0), gammas=("9/10", "4/5", "7/10"), M=1000, M1=2000)
        base.update(kw)
        with pytest.raises(ValueError):
            ExpSumParams(**base)

    def test_R(self):
        p = ExpSumParams(0.0, (2.0, -1.0, 1.0), ("9/10", "4/5", "7/10"), 1000, 2000)
        assert p.R == pytest.approx(2 * 1000 ** 0.9 + 1000 ** 0.8 + 1000 ** 0.7)


class TestBilinear:
    def brute(self, M, N, a, b, h, gammas, alpha):
        gs = [RationalExponent.parse(g) for g in gammas]
        tot = 0j
        for i, m in enumerate(range(M + 1, 2 * M + 1)):
            for j, n in enumerate(range(N + 1, 2 * N + 1)):
                l = m * n
                tot += a[i] * b[j] * mp_e(mp_phase(l, h, gs, alpha))
        return tot

    def test_type_I(self):
        rng = np.random.default_rng(3)
        M, N = 12, 20
        a = rng.random(M)
        h = (1, -2, 3)
        gs = ("9/10", "4/5", "7/10")
        got = type_I_sum(M, N, a, h, gs, 0.37)
        assert abs(got - self.brute(M, N, a, np.ones(N), [float(x) for x in h], gs, 0.37)) < 1e-9

    def test_type_II(self):
        rng = np.random.default_rng(4)
        M, N = 10, 15
        a = rng.random(M) * 2 - 1
        b = np.exp(2j * np.pi * rng.random(N))
        h = (2, 1, 1)
        gs = ("19/20", "9/10", "3/4")
        got = type_II_sum(M, N, a, b, h, gs, 0.123)
        assert abs(got - self.brute(M, N, a, b, [float(x) for x in h], gs, 0.123)) < 1e-9

    def test_callable_coefficients(self):
        gs = ("9/10", "4/5", "7/10")
        arr = np.array([math.log(m) for m in range(11, 21)])
        assert type_I_sum(10, 10, math.log, (1, 1, 1), gs, 0.2) == type_I_sum(10, 10, arr, (1, 1, 1), gs, 0.2)

    def test_bad_h(self):
        with pytest.raises(ValueError):
            type_I_sum(5, 5, np.ones(5), (1, 0, 1), ("9/10", "4/5", "7/10"), 0.1)


class TestTypeRanges:
    def test_k3(self):
        c = TypeRangeClass.build(1e12, (1, 1, 1), ("9/10", "4/5", "7/10"))
        r = 1e12 ** 0.9 + 1e12 ** 0.8 + 1e12 ** 0.7
        assert c.script_r == pytest.approx(r)
        assert c.x_k == pytest.approx(1e12 ** (1 / 48 - 1 / 2) * r)
        assert c.x_k_star == pytest.approx(1e12 ** (1 / 2 + 49 / 144) * r ** (-1 / 3))
        assert c.type_ii_floor == pytest.approx(100.0)
        assert c.classify(50.0)["small"]

    def test_k4(self):
        c = TypeRangeClass.build(1e12, (1, 1, 1, 1), ("19/20", "9/10", "4/5", "7/10"))
        assert c.x_k_star == pytest.approx(1e12 ** (0.5 + 1 / 64))

    def test_bound(self):
        assert type_sum_bound(1e6, Fraction(1, 10), 3, 0.01) == pytest.approx(1e6 ** (1 - 0.1 - 0.04))


class TestBounds:
    def test_formulas(self):
        assert bound_second_deriv(100, 0.01) == pytest.approx(100 * 0.1 + 10)
        assert bound_third_deriv(100, 1e-6) == pytest.approx(100 * 0.1 + 100)
        with pytest.raises(ValueError):
            bound_second_deriv(10, 0)

    def test_report_ratio(self):
        r = BoundReport(2.0, 4.0, "x", {"a": 1})
        assert r.ratio == 0.5
        assert r.as_row() == {"formula": "x", "a": 1, "observed": 2.0, "bound": 4.0, "ratio": 0.5}
        with pytest.raises(ValueError):
            BoundReport(1.0, 0.0, "x")

    def test_monomial_sum_direct(self):
        beta = 1e-4
        direct = sum(mp_e(float(mpmath.frac(mpmath.mpf(beta) * n * n))) for n in range(301, 601))
        assert abs(monomial_sum(beta, 2, 300) - direct) < 1e-9

    @pytest.mark.parametrize("variant", ["second", "third"])
    def test_derivative_test_ratio_bounded(self, variant):
        beta = 1e-4 if variant == "second" else 1e-8
        r = derivative_test_report(beta, 2000, variant)
        assert 0 < r.ratio < 1.0

    def test_sk_bound_values(self):
        assert sk_bound(100.0, 1e4, 3, "second") == pytest.approx(100 + 100 * 1e4 ** -0.25)
        p = ExpSumParams(0.2, (1.0, 1.0, 1.0), ("9/10", "4/5", "7/10"), 512, 1024)
        r = bound_sk(p, "third")
        assert r.formula == "sk-third" and r.observed <= 512


class TestWeyl:
    def test_constant_sequence(self):
        # z = 1 is the extremal case; the sharp inequality has the factor (N + Q)/Q,
        # i.e. rhs * (1 + Q/N)
        z = np.ones(100)
        lhs, rhs = weyl_vdc_sides(z, 100, 10)
        assert lhs == pytest.approx(1e4)
        assert rhs == pytest.approx(10 * (100 + 2 * sum((1 - q / 10) * (100 - q) for q in range(1, 10))))
        assert lhs <= rhs * (1 + 10 / 100)

    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 40))
    def test_sharp_form_random(self, seed, Q):
        rng = np.random.default_rng(seed)
        N = 80
        z = rng.random(N) * np.exp(2j * np.pi * rng.random(N))
        lhs, rhs = weyl_vdc_sides(z, N, Q)
        assert lhs <= rhs * (1 + Q / N) * (1 + 1e-12) + 1e-12

    def test_trials(self):
        worst = max(lhs / rhs for _, _, lhs, rhs in weyl_trials(60, seed=5))
        assert worst <= 4.0

    def test_bad_Q(self):
        with pytest.raises(ValueError):
            weyl_vdc_sides(np.ones(10), 10, 11)


class TestRegression:
    def test_grid_does_not_regress(self, bound_ratios):
        _, summary = run_grid(DEFAULT_GRID)
        tol = bound_ratios["tolerance"]
        for formula, pinned in bound_ratios["max_ratio"].items():
            assert summary["max_ratio"][formula] <= tol * pinned, formula

    def test_grid_deterministic(self):
        inst = {"kind": "sk", "M": 1024, "coeffs": [1.0, 1.0, 1.0],
                "gammas": ["9/10", "4/5", "7/10"], "alphas": 8, "seed": 0}
        a = [r.ratio for r in run_instance(inst)]
        b = [r.ratio for r in run_instance(inst)]
        assert a == b

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            run_instance({"kind": "nope"})
