import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpc, mpf

from zlab.errors import DomainError
from zlab.integral_engine import SplitParams
from zlab.numerics import PrecisionContext
from zlab.parallel import fixed_chunks, ordered_map
from zlab.sums import (
    IndexSet,
    appendix_b_monitor,
    brute_force_members,
    crude_bound_monitor,
    double_sum_full,
    euler_maclaurin_identity,
    exact_identity_report,
    floor_T,
    decomposition_report,
    decomposition_sweep,
    closed_single_sum,
    lemma72_transform,
    partition_check,
    row_sum,
    s1_scaled_monitor,
    sa_inner_ratio,
    sawtooth,
    sawtooth_series,
    sum_IS,
    sum_S1,
    sum_SA_SB,
    tail_sum_formula,
)

P = SplitParams()
P_WIDE = SplitParams(delta2=0.2, delta3=0.45, delta4=0.1)
TWO_PI = 2 * math.pi


class TestIndexSets:
    @pytest.mark.parametrize("t", [100, 4 * math.pi + 0.1, 1000])
    @pytest.mark.parametrize("kind", ["M", "M_swapped", "N", "full_square"])
    @pytest.mark.parametrize("closed", [False, True])
    def test_enumeration_matches_brute_force(self, t, kind, closed):
        s = IndexSet(kind, t, P_WIDE, allow_equality=closed, m2_inclusive=closed)
        assert list(s.enumerate()) == brute_force_members(s)
        assert s.size() == len(brute_force_members(s))

    def test_full_square_small(self):
        s = IndexSet("full_square", 4 * math.pi + 0.1, P)
        assert list(s.enumerate()) == [(1, 1), (1, 2), (2, 1), (2, 2)]

    def test_N_inside_M_when_c_positive(self):
        t = 2000
        n_set = set(IndexSet("N", t, P).enumerate())
        lo = (1 + P.c(t)) / (mpf(t) ** (1 - mpf(P.delta3)) - 1)
        for m1, m2 in n_set:
            assert mpf(m2) / m1 > lo

    def test_singles(self):
        t = 1000
        for kind in ("N_tilde", "M_tilde", "M_hat"):
            ms = IndexSet(kind, t, P).singles()
            assert ms == sorted(ms)
            assert not ms or ms[-1] == floor_T(t)
        assert len(IndexSet("M_tilde", t, P).singles()) >= len(IndexSet("M_hat", t, P).singles())

    def test_domain(self):
        with pytest.raises(DomainError):
            IndexSet("Q", 100)
        with pytest.raises(DomainError):
            IndexSet("M", 5)
        with pytest.raises(DomainError):
            IndexSet("N_tilde", 100).rows()
        with pytest.raises(DomainError):
            IndexSet("M", 100).singles()


class TestPartition:
    @pytest.mark.parametrize("t", [100, 300, 1000, 3000])
    @pytest.mark.parametrize("params", [P, P_WIDE])
    def test_both_orientations_cover(self, t, params):
        assert partition_check(t, params, "M")
        assert partition_check(t, params, "M_swapped")

    def test_literal_strict_box_fails_to_cover(self):
        assert not partition_check(1000, P_WIDE, "M", strict_box=True)

    def test_mutation_detected(self):
        def drop_first(rows):
            return [(m1, first + 1, last) for m1, first, last in rows]

        def overshoot(rows):
            return [(m1, first, last + 1) for m1, first, last in rows]

        # S1 is nonempty in this orientation
        assert partition_check(1000, P_WIDE, "M_swapped", mutate=lambda rows: rows)
        assert not partition_check(1000, P_WIDE, "M_swapped", mutate=drop_first)
        assert not partition_check(1000, P_WIDE, "M_swapped", mutate=overshoot)

    def test_bad_orientation(self):
        with pytest.raises(DomainError):
            partition_check(100, P, "N")


class TestSums:
    def test_double_sum_full_is_modulus_squared(self, ctx128):
        t = 300
        v = double_sum_full(ctx128, 0.5, t).value
        with ctx128.workprec():
            z = mpmath.fsum(mpmath.power(m, -mpc(0.5, t)) for m in range(1, floor_T(t) + 1))
            assert abs(v - abs(z) ** 2) <= 100 * ctx128.rel_tol * abs(v)
            assert abs(v.imag) <= 100 * ctx128.rel_tol * abs(v)

    def test_double_sum_single_term(self, ctx):
        assert double_sum_full(ctx, 0.5, 7).value == 1

    def test_sum_IS_two_pairs(self, ctx):
        # [T] = 2 at t = 13 and the literal m2 < [T] leaves (1, 1) and (2, 1)
        t = 13
        s = IndexSet("M", t, P)
        assert list(s.enumerate()) == [(1, 1), (2, 1)]
        v = sum_IS(ctx, 0.5, t, P).value
        with ctx.workprec():
            sb = mpc(0.5, -t)
            exact = 2 * (mpmath.power(2, -sb) + mpmath.power(2, -mpc(0.5, t)) * mpmath.power(3, -sb)).real
            assert abs(v - exact) <= 10 * ctx.rel_tol

    @pytest.mark.parametrize("sigma", [0.3, 0.5, 0.75])
    @pytest.mark.parametrize("t", [7, TWO_PI * 3.5, 100, 500])
    def test_exact_identity(self, ctx, sigma, t):
        r = exact_identity_report(ctx, sigma, t)
        assert r.residual <= 1000 * mpf(2) ** -256 * r.abs_terms

    def test_exact_identity_one_term(self, ctx):
        # [T] = 1: 2 Re 2^{-conj s} = 1 - 1 + 2 Re 2^{-s}
        r = exact_identity_report(ctx, 0.5, 7)
        with ctx.workprec():
            assert abs(r.lhs - 2 * mpmath.power(2, -mpc(0.5, -7)).real) <= 10 * ctx.rel_tol

    @pytest.mark.parametrize("orientation", ["M", "M_swapped"])
    @pytest.mark.parametrize("t", [100, 1000])
    def test_decomposition(self, ctx, orientation, t):
        r = decomposition_report(ctx, 0.5, t, P_WIDE, orientation)
        assert r.residual <= 1000 * mpf(2) ** -256 * r.abs_terms

    def test_decomposition_sweep_small(self):
        assert decomposition_sweep(0.5, range(1, 61), P_WIDE) == []
        assert decomposition_sweep(0.5, range(1, 61), P, "M_swapped") == []

    def test_SA_SB_add_up(self, ctx128):
        t = 1000
        a, b = sum_SA_SB(ctx128, 0.5, t, 0.45)
        s1 = sum_S1(ctx128, 0.5, t, 0.45).value
        with ctx128.workprec():
            assert abs(a.value + b.value - s1) <= 1000 * ctx128.rel_tol * (a.abs_total + b.abs_total)

    def test_empty_S1(self, ctx):
        v = row_sum(ctx, "IS", 0.5, 100, [])
        assert v.value == 0 and v.term_count == 0

    def test_threads_do_not_change_bits(self, ctx128):
        t = 2000
        rows = IndexSet("M", t, P_WIDE).rows()
        a = row_sum(ctx128, "IS", 0.5, t, rows, threads=1)
        b = row_sum(ctx128, "IS", 0.5, t, rows, threads=4)
        assert a.value == b.value and a.kahan_error_bound == b.kahan_error_bound

    def test_unknown_form(self, ctx):
        with pytest.raises(ValueError):
            row_sum(ctx, "bogus", 0.5, 100, [(1, 1, 1)])


class TestParallel:
    def test_fixed_chunks(self):
        assert fixed_chunks(0, 10, 4) == [(0, 4), (4, 8), (8, 10)]
        assert fixed_chunks(0, 0, 4) == []

    def test_ordered_map(self):
        assert ordered_map(abs, [-3, 2, -1], threads=2) == [3, 2, 1]


class TestTransforms:
    @pytest.mark.parametrize("t", [TWO_PI * 50, 100, 1000])
    def test_diagonal_tail_transform_band(self, ctx128, t):
        lhs, rhs = lemma72_transform(ctx128, 0.5, t)
        assert abs(lhs - rhs) <= 5

    def test_diagonal_tail_transform_domain(self, ctx128):
        with pytest.raises(DomainError):
            lemma72_transform(ctx128, 1, 100)

    @pytest.mark.parametrize("n", [50, 100, 200])
    def test_closed_single_sum(self, ctx128, n):
        t = TWO_PI * n
        a, b = closed_single_sum(ctx128, 0.5, t)
        assert abs(a - b) <= 1 / mpf(t)

    def test_harmonic_law(self, ctx128):
        # sum_{m<=N} 1/m - ln N -> Euler's constant
        with ctx128.workprec():
            n = 10 ** 4
            h = mpmath.fsum(mpf(1) / m for m in range(1, n + 1))
            assert abs(h - mpmath.log(n) - ctx128.euler_gamma - mpf(1) / (2 * n)) <= mpf(1) / n ** 2

    def test_euler_maclaurin_linear(self, ctx128):
        total, formula = euler_maclaurin_identity(ctx128, lambda x: x, 0, 10, lambda x: 1)
        assert total == 55
        assert abs(formula - 55) <= mpf(10) ** -30

    def test_euler_maclaurin_reciprocal(self, ctx128):
        total, formula = euler_maclaurin_identity(ctx128, lambda x: 1 / x, 1, 79)
        assert abs(total - formula) <= mpf(10) ** -20

    def test_euler_maclaurin_fractional_ends(self, ctx128):
        f = lambda x: mpmath.cos(x) / x
        total, formula = euler_maclaurin_identity(ctx128, f, mpf("1.3"), mpf("12.7"), lambda x: -mpmath.sin(x) / x - mpmath.cos(x) / x ** 2)
        assert abs(total - formula) <= mpf(10) ** -20

    def test_euler_maclaurin_domain(self, ctx128):
        with pytest.raises(DomainError):
            euler_maclaurin_identity(ctx128, lambda x: x, 2, 1)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.01, 0.99))
    def test_sawtooth_series(self, x):
        n = 10 ** 5
        gap = min(x, 1 - x)
        assert abs(sawtooth_series(x, n) - float(sawtooth(x))) <= 1 / (n * math.pi * math.sin(math.pi * gap)) + 1e-12

    def test_sawtooth(self):
        assert sawtooth(mpf("2.25")) == mpf("-0.25")

    @pytest.mark.parametrize("t", [500, 1000])
    def test_tail_formula_first_term(self, ctx128, t):
        s, f = tail_sum_formula(ctx128, 0.5, t, 1)
        assert abs(s - f) <= 5 / mpmath.sqrt(t)

    def test_tail_formula_domain(self, ctx128):
        with pytest.raises(DomainError):
            tail_sum_formula(ctx128, 0.5, 100, 0)
        with pytest.raises(DomainError):
            tail_sum_formula(ctx128, 0.5, 100, floor_T(100) + 1)


class TestMonitors:
    def test_tiling_monitor_single_term(self, ctx):
        r = appendix_b_monitor(ctx, 1000, (3, 4), (5, 6))
        assert abs(r.modulus - 1) <= 10 * ctx.rel_tol

    def test_tiling_monitor_conjugation(self, ctx128):
        a = appendix_b_monitor(ctx128, 1000, (10, 30), (20, 50))
        b = appendix_b_monitor(ctx128, -1000, (10, 30), (20, 50))
        with ctx128.workprec():
            assert abs(a.value - mpmath.conj(b.value)) <= 100 * ctx128.rel_tol * a.modulus

    def test_tiling_monitor_tiles_and_ratio(self, ctx128):
        r = appendix_b_monitor(ctx128, 10 ** 4, (200, 400), (300, 600))
        assert r.ratio <= 1
        with ctx128.workprec():
            assert abs(mpmath.fsum(r.tile_sums) - r.value) <= 1000 * ctx128.rel_tol * 200 * 300

    def test_tiling_monitor_domain(self, ctx128):
        with pytest.raises(DomainError):
            appendix_b_monitor(ctx128, 100, (5, 5), (1, 3))

    def test_crude_bound_small_t_is_false(self, ctx128):
        r = crude_bound_monitor(ctx128, 0.5, 10)
        assert not r.single_holds
        assert r.single == 1

    @pytest.mark.parametrize("t", [20, 100, 1000, 3000])
    def test_crude_bound_holds(self, ctx128, t):
        r = crude_bound_monitor(ctx128, 0.5, t)
        assert r.single_holds and r.double_holds

    @pytest.mark.parametrize("t", [100, 400, 1600])
    def test_sa_inner_ratio_bounded(self, ctx64, t):
        assert sa_inner_ratio(ctx64, 0.5, t) <= 1

    def test_s1_scaled_bounded(self, ctx64):
        vals = [s1_scaled_monitor(ctx64, 0.5, t, 0.45) for t in (100, 200, 400, 800, 1600)]
        assert max(vals) <= 10
