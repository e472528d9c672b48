"""The log-weighted double sum over N and its comparison with |zeta|^2.

For (m1, m2) in N the term is

    m1^{-(s - i t^d3)} m2^{-(conj s + i t^d3)} / ln((m2/m1) L3),   L3 = t^(1-d3) - 1,

and the weight 1/ln((m2/m1) L3) is recorded for every term.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp, mpc, mpf

from .errors import DomainError, EmptySetError
from .integral_engine import SplitParams
from .numerics import GUARD_BITS, PrecisionContext, zeta_oracle
from .quadrature import QuadratureSpec
from .records import ExperimentRecord
from .sums import IndexSet, row_sum, split_level

_HALF = mpf(1) / 2


@dataclass(frozen=True)
class VariantSumReport:
    sum_value: mpc
    weight_min: mpf
    weight_max: mpf
    bound_ratio: mpf
    term_count: int
    kahan_error_bound: mpf
    on_critical_line: bool

    @property
    def bound_ratio_half(self) -> Optional[mpf]:
        """|sum|/(t^d3 ln t) when sigma = 1/2, else None."""
        return self.bound_ratio if self.on_critical_line else None

    def weights_within(self, t, delta3) -> bool:
        """1/(2 ln t) < weight_min and weight_max < t^(d3/2)."""
        with mp.workprec(mp.prec + GUARD_BITS):
            t = mpf(t)
            return bool(self.weight_min > 1 / (2 * mpmath.log(t)) and self.weight_max < t ** (mpf(delta3) / 2))


def _weight_extremes(t, params: SplitParams, rows) -> Tuple[mpf, mpf]:
    # the weight decreases in m2/m1, so the row ends give the extremes
    l3 = split_level(t, params.delta3)
    lo_ratio = min(mpf(first) / m1 for m1, first, _ in rows)
    hi_ratio = max(mpf(last) / m1 for m1, _, last in rows)
    return 1 / mpmath.log(hi_ratio * l3), 1 / mpmath.log(lo_ratio * l3)


def variant_sum(ctx: PrecisionContext, sigma, t, params: SplitParams, threads: int = 1) -> VariantSumReport:
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        if not (_HALF <= sigma < 1):
            raise DomainError("sigma must lie in [1/2, 1)")
    rows = IndexSet("N", t, params).rows()
    if not rows:
        raise EmptySetError(f"the set N is empty at t={mpmath.nstr(t, 8)}, delta3={params.delta3}")
    with ctx.workprec():
        d3 = mpf(params.delta3)
        shift = t ** d3
        log_level = mpmath.log(split_level(t, d3))
    total = row_sum(ctx, "variant", sigma, t, rows, extra=(shift, log_level), threads=threads)
    with ctx.workprec():
        w_min, w_max = _weight_extremes(t, params, rows)
        modulus = abs(total.value)
        if sigma == _HALF:
            ratio = modulus / (shift * mpmath.log(t))
        else:
            ratio = modulus / t ** (d3 / 2)
        return VariantSumReport(
            total.value, +w_min, +w_max, +ratio, total.term_count, total.kahan_error_bound, sigma == _HALF
        )


def residual_841(
    ctx: PrecisionContext,
    sigma,
    t,
    params: SplitParams,
    quad: Optional[QuadratureSpec] = None,
    threads: int = 1,
) -> Tuple[mpf, mpf]:
    """(lhs - leading rhs, stated error scale) for the final relation.

    lhs = t^{-d/2} (sqrt 2/pi) Re{e^{i pi/4} (t^{d-1})^{i t^d}
          (1 - t^{d-1})^{sigma - 1/2 + i(t - t^d)} * variant sum},  d = d3,
    leading rhs = -ln t at sigma = 1/2 and -zeta(2 sigma) otherwise.  Only
    explicit parts enter, so ``quad`` is accepted for a uniform signature
    and not used.  The scale is t^{d/2} ln t at sigma = 1/2 and 1 otherwise.
    """
    report = variant_sum(ctx, sigma, t, params, threads)
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        d = mpf(params.delta3)
        td = t ** d
        base = t ** (d - 1)
        prefactor = (
            mpmath.expj(mp.pi / 4)
            * mpmath.power(base, 1j * td)
            * mpmath.power(1 - base, mpc(sigma - _HALF, t - td))
        )
        lhs = t ** (-d / 2) * mpmath.sqrt(2) / mp.pi * (prefactor * report.sum_value).real
        if sigma == _HALF:
            leading = -mpmath.log(t)
            scale = t ** (d / 2) * mpmath.log(t)
        else:
            leading = -zeta_oracle(ctx, 2 * sigma).real
            scale = mpf(1)
        return +(lhs - leading), +scale


def prefactor_phase(ctx: PrecisionContext, t, delta) -> mpc:
    """(t^{d-1})^{i t^d}, unimodular for real t > 1."""
    with ctx.workprec():
        t = mpf(t)
        d = mpf(delta)
        return +mpmath.power(t ** (d - 1), 1j * t ** d)


@dataclass(frozen=True)
class ComparisonSummary:
    median_ratio: mpf
    iqr: mpf


def compare_with_zeta_sq(
    ctx: PrecisionContext,
    sigma,
    t_grid: Sequence,
    params: SplitParams,
    threads: int = 1,
) -> Tuple[List[ExperimentRecord], ComparisonSummary]:
    """|zeta(sigma+it)|^2 against |variant sum| ln t on a grid of t.

    One record per t: value_re = |variant| ln t, reference = |zeta|^2,
    residual = |value_re - reference|, scale = value_re/reference (the
    ratio).  This is exploratory output; nothing is asserted.
    """
    records = []
    ratios = []
    deltas = (params.delta1, params.delta2, params.delta3, params.delta4)
    for t in t_grid:
        report = variant_sum(ctx, sigma, t, params, threads)
        with ctx.workprec():
            tt = mpf(t)
            lhs = abs(report.sum_value) * mpmath.log(tt)
            ref = abs(zeta_oracle(ctx, mpc(sigma, tt))) ** 2
            ratio = lhs / ref
        ratios.append(float(ratio))
        records.append(
            ExperimentRecord("variant_compare", mpf(sigma), tt, deltas, "abs_variant_log_t", lhs, mpf(0), ref, abs(lhs - ref), ratio)
        )
    if len(ratios) >= 2:
        q = statistics.quantiles(ratios, n=4)
        iqr = q[2] - q[0]
    else:
        iqr = 0.0
    return records, ComparisonSummary(mpf(statistics.median(ratios)), mpf(iqr))
