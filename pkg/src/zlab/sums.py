"""Constrained index sets and the exact finite Dirichlet-type sums built on them.

Pairs (m1, m2) live in the box 1 <= m1, m2 <= [T], T = t/(2 pi).  With
L2 = t^(1-d2) - 1 and L3 = t^(1-d3) - 1 the sets are

    M          1/L3 < m2/m1 < L2
    M_swapped  1/L2 < m2/m1 < L3
    N          m2/m1 > (1 + c(t))/L3
    full_square   the whole box

and for single indices 1 <= m <= [T]:

    N_tilde  m > T (1 + c(t))/L3,   M_tilde  m > T/L2,   M_hat  m > T/L3.

The literal definitions of M and N keep m2 < [T]; ``m2_inclusive`` widens
this to m2 <= [T].  ``allow_equality`` turns the strict ratio bounds into
non-strict ones.  Sums are accumulated m1-major with compensated summation,
in fixed chunks of rows, so results do not depend on the worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from mpmath import mp, mpc, mpf

from .errors import DomainError
from .integral_engine import SplitParams
from .numerics import GUARD_BITS, CompensatedSum, PrecisionContext
from .parallel import fixed_chunks, ordered_map

PAIR_KINDS = ("M", "M_swapped", "N", "full_square")
SINGLE_KINDS = ("N_tilde", "M_tilde", "M_hat")
ROW_CHUNK = 32

# Threshold arithmetic is done at this precision so that floor/ceil of
# products like L*m1 are exact for every m1 in range.
_THRESHOLD_BITS = 192


def _floor_int(x: mpf) -> int:
    return int(mpmath.floor(x))


def _ceil_int(x: mpf) -> int:
    return int(mpmath.ceil(x))


def big_t(t) -> mpf:
    with mp.workprec(_THRESHOLD_BITS):
        return mpf(t) / (2 * mp.pi)


def floor_T(t) -> int:
    with mp.workprec(_THRESHOLD_BITS):
        return _floor_int(big_t(t))


def split_level(t, delta) -> mpf:
    """t^(1 - delta) - 1."""
    with mp.workprec(_THRESHOLD_BITS):
        return mpf(t) ** (1 - mpf(delta)) - 1


@dataclass(frozen=True)
class IndexSet:
    kind: str
    t: float
    params: SplitParams = field(default_factory=SplitParams)
    allow_equality: bool = False
    m2_inclusive: bool = False

    def __post_init__(self) -> None:
        if self.kind not in PAIR_KINDS + SINGLE_KINDS:
            raise DomainError(f"unknown index-set kind {self.kind!r}")
        if floor_T(self.t) < 1:
            raise DomainError("t/2pi must be at least 1")

    @property
    def T(self) -> mpf:
        return big_t(self.t)

    @property
    def n(self) -> int:
        return floor_T(self.t)

    @property
    def is_pair(self) -> bool:
        return self.kind in PAIR_KINDS

    def _ratio_bounds(self) -> Tuple[Optional[mpf], Optional[mpf]]:
        p = self.params
        with mp.workprec(_THRESHOLD_BITS):
            l2 = split_level(self.t, p.delta2)
            l3 = split_level(self.t, p.delta3)
            if self.kind == "M":
                return 1 / l3, l2
            if self.kind == "M_swapped":
                return 1 / l2, l3
            if self.kind == "N":
                return (1 + p.c(self.t)) / l3, None
            return None, None

    def rows(self) -> List[Tuple[int, int, int]]:
        """(m1, first m2, last m2) for each nonempty row, m1 ascending."""
        if not self.is_pair:
            raise DomainError("rows() applies to pair sets only")
        n = self.n
        top = n if (self.m2_inclusive or self.kind == "full_square") else n - 1
        lo, hi = self._ratio_bounds()
        out = []
        with mp.workprec(_THRESHOLD_BITS):
            for m1 in range(1, n + 1):
                first = 1
                last = top
                if lo is not None:
                    x = lo * m1
                    first = max(first, _ceil_int(x) if self.allow_equality else _floor_int(x) + 1)
                if hi is not None:
                    x = hi * m1
                    last = min(last, _floor_int(x) if self.allow_equality else _ceil_int(x) - 1)
                if first <= last:
                    out.append((m1, first, last))
        return out

    def singles(self) -> List[int]:
        if self.is_pair:
            raise DomainError("singles() applies to single-index sets only")
        p = self.params
        with mp.workprec(_THRESHOLD_BITS):
            T = self.T
            if self.kind == "N_tilde":
                x = T * (1 + p.c(self.t)) / split_level(self.t, p.delta3)
            elif self.kind == "M_tilde":
                x = T / split_level(self.t, p.delta2)
            else:
                x = T / split_level(self.t, p.delta3)
            first = _ceil_int(x) if self.allow_equality else _floor_int(x) + 1
        return list(range(max(first, 1), self.n + 1))

    def enumerate(self) -> Iterator[tuple]:
        """Index tuples in m1-major, then m2, order."""
        if self.is_pair:
            for m1, first, last in self.rows():
                for m2 in range(first, last + 1):
                    yield (m1, m2)
        else:
            for m in self.singles():
                yield (m,)

    def size(self) -> int:
        if self.is_pair:
            return sum(last - first + 1 for _, first, last in self.rows())
        return len(self.singles())

    def mask(self) -> np.ndarray:
        """Boolean [T] x [T] membership array, entry [m1-1, m2-1]."""
        n = self.n
        out = np.zeros((n, n), dtype=bool)
        for m1, first, last in self.rows():
            out[m1 - 1, first - 1:last] = True
        return out


def enumerate_indices(index_set: IndexSet) -> Iterator[tuple]:
    return index_set.enumerate()


def brute_force_members(index_set: IndexSet) -> List[tuple]:
    """Membership by testing each box point against the defining inequalities."""
    n = index_set.n
    top = n if (index_set.m2_inclusive or index_set.kind == "full_square") else n - 1
    lo, hi = index_set._ratio_bounds()
    out = []
    with mp.workprec(_THRESHOLD_BITS):
        for m1 in range(1, n + 1):
            for m2 in range(1, top + 1):
                r = mpf(m2) / m1
                if lo is not None and not (r >= lo if index_set.allow_equality else r > lo):
                    continue
                if hi is not None and not (r <= hi if index_set.allow_equality else r < hi):
                    continue
                out.append((m1, m2))
    return out


# ---------------------------------------------------------------------------
# S1, S2 row layouts
# ---------------------------------------------------------------------------

def s1_rows(t, delta) -> List[Tuple[int, int, int]]:
    """Rows of S1(delta): m1 < [T]/L, m2 from (largest integer <= L m1) + 1 to [T]."""
    n = floor_T(t)
    with mp.workprec(_THRESHOLD_BITS):
        level = split_level(t, delta)
        top_m1 = _ceil_int(n / level) - 1
        out = []
        for m1 in range(1, top_m1 + 1):
            first = _floor_int(level * m1) + 1
            if first <= n:
                out.append((m1, first, n))
    return out


def s2_rows(t, delta) -> List[Tuple[int, int, int]]:
    """Rows of S2(delta): m1 > L, m2 from 1 to (smallest integer >= m1/L) - 1.

    The lower m1 limit is read as the successor of L = t^(1-delta) - 1, which
    is what makes S2 the exact complement below the ratio 1/L.
    """
    n = floor_T(t)
    with mp.workprec(_THRESHOLD_BITS):
        level = split_level(t, delta)
        out = []
        for m1 in range(_floor_int(level) + 1, n + 1):
            last = min(_ceil_int(m1 / level) - 1, n)
            if last >= 1:
                out.append((m1, 1, last))
    return out


def rows_mask(rows: Sequence[Tuple[int, int, int]], n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=bool)
    for m1, first, last in rows:
        out[m1 - 1, first - 1:last] = True
    return out


def _pairing(orientation: str, params: SplitParams) -> Tuple[str, float, float]:
    """Index-set kind and the (S1, S2) exponents that complete it to the box."""
    if orientation == "M":
        return "M", params.delta2, params.delta3
    if orientation == "M_swapped":
        return "M_swapped", params.delta3, params.delta2
    raise DomainError("orientation must be 'M' or 'M_swapped'")


def partition_check(
    t,
    params: SplitParams,
    orientation: str = "M_swapped",
    strict_box: bool = False,
    mutate: Optional[Callable[[List[Tuple[int, int, int]]], List[Tuple[int, int, int]]]] = None,
) -> bool:
    """True iff M, S1 and S2 are pairwise disjoint and cover the [T] x [T] box.

    M uses closed ratio bounds and m2 <= [T] (``strict_box`` restores the
    literal m2 < [T]).  ``mutate`` rewrites the S1 rows before the check and
    exists to test the checker itself.
    """
    kind, d1, d2 = _pairing(orientation, params)
    n = floor_T(t)
    m_set = IndexSet(kind, t, params, allow_equality=True, m2_inclusive=not strict_box)
    a = m_set.mask()
    r1 = s1_rows(t, d1)
    if mutate is not None:
        r1 = mutate(r1)
    try:
        b = rows_mask(r1, n)
    except (IndexError, ValueError):
        return False
    if any(first < 1 or last > n for _, first, last in r1):
        return False
    c = rows_mask(s2_rows(t, d2), n)
    count = a.astype(np.int8) + b.astype(np.int8) + c.astype(np.int8)
    return bool(np.all(count == 1))


# ---------------------------------------------------------------------------
# Compensated row sums (parallel over fixed chunks of rows)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SumValue:
    """Compensated sum with its term count, rounding bound and sum of |terms|."""

    value: mpc
    term_count: int
    kahan_error_bound: mpf
    abs_total: mpf = mpf(0)
    max_abs: mpf = mpf(0)


def _to_sum_value(acc: CompensatedSum) -> SumValue:
    return SumValue(acc.value, acc.count, acc.error_bound(), acc.abs_total, acc.max_abs)


def _pair_term_factory(form: str, sigma: mpf, t: mpf, extra: tuple):
    s = mpc(sigma, t)
    cache = {}

    def pw(n: int) -> mpc:
        v = cache.get(n)
        if v is None:
            v = mpmath.power(n, -s)
            cache[n] = v
        return v

    if form == "IS":
        return lambda m1, m2: pw(m1) * mpmath.conj(pw(m1 + m2))
    if form == "plain":
        return lambda m1, m2: pw(m1) * mpmath.conj(pw(m2))
    if form == "nm":
        # rows index (m, n): m^{-s} n^{-conj(s)}
        return lambda m, n: pw(m) * mpmath.conj(pw(n))
    if form == "variant":
        shift, log_level = extra
        a_cache = {}
        b_cache = {}
        a_exp = mpc(sigma, t - shift)
        b_exp = mpc(sigma, -t + shift)

        def term(m1, m2):
            a = a_cache.get(m1)
            if a is None:
                a = mpmath.power(m1, -a_exp)
                a_cache[m1] = a
            b = b_cache.get(m2)
            if b is None:
                b = mpmath.power(m2, -b_exp)
                b_cache[m2] = b
            return a * b / (mpmath.log(mpf(m2) / m1) + log_level)

        return term
    raise ValueError(f"unknown term form {form!r}")


def _chunk_job(job) -> CompensatedSum:
    bits, form, sigma, t, extra, rows = job
    with mp.workprec(bits):
        term = _pair_term_factory(form, mpf(sigma), mpf(t), extra)
        acc = CompensatedSum(bits)
        for m1, first, last in rows:
            for m2 in range(first, last + 1):
                acc.add(term(m1, m2))
    return acc


def row_sum(
    ctx: PrecisionContext,
    form: str,
    sigma,
    t,
    rows: Sequence[Tuple[int, int, int]],
    extra: tuple = (),
    threads: int = 1,
) -> SumValue:
    """Compensated sum of a term form over rows, reduced in row-chunk order."""
    bits = ctx.precision_bits + GUARD_BITS
    with mp.workprec(bits):
        sigma = mpf(sigma)
        t = mpf(t)
    chunks = [rows[a:b] for a, b in fixed_chunks(0, len(rows), ROW_CHUNK)]
    jobs = [(bits, form, sigma, t, extra, chunk) for chunk in chunks]
    total = CompensatedSum(bits)
    for part in ordered_map(_chunk_job, jobs, threads):
        total.merge(part)
    return _to_sum_value(total)


def _full_rows(n: int) -> List[Tuple[int, int, int]]:
    return [(m1, 1, n) for m1 in range(1, n + 1)]


def double_sum_full(ctx: PrecisionContext, sigma, t, threads: int = 1) -> SumValue:
    """sum_{m1, m2 <= [T]} m1^{-s} m2^{-conj(s)} by enumeration (equals |sum m^{-s}|^2)."""
    n = floor_T(t)
    if n < 1:
        raise DomainError("t/2pi must be at least 1")
    return row_sum(ctx, "plain", sigma, t, _full_rows(n), threads=threads)


def sum_over_set(ctx: PrecisionContext, sigma, t, index_set: IndexSet, threads: int = 1) -> SumValue:
    """sum over a pair set of m1^{-s} (m1+m2)^{-conj(s)}."""
    return row_sum(ctx, "IS", sigma, t, index_set.rows(), threads=threads)


def sum_IS(
    ctx: PrecisionContext,
    sigma,
    t,
    params: SplitParams,
    orientation: str = "M",
    threads: int = 1,
) -> SumValue:
    """2 Re sum over M of m1^{-s} (m1+m2)^{-conj(s)}."""
    inner = sum_over_set(ctx, sigma, t, IndexSet(orientation, t, params), threads)
    with mp.workprec(ctx.precision_bits + GUARD_BITS):
        value = mpc(2 * inner.value.real, 0)
    return SumValue(value, inner.term_count, 2 * inner.kahan_error_bound, 2 * inner.abs_total, 2 * inner.max_abs)


def sum_S1(ctx: PrecisionContext, sigma, t, delta, threads: int = 1) -> SumValue:
    return row_sum(ctx, "IS", sigma, t, s1_rows(t, delta), threads=threads)


def sum_S2(ctx: PrecisionContext, sigma, t, delta, threads: int = 1) -> SumValue:
    return row_sum(ctx, "IS", sigma, t, s2_rows(t, delta), threads=threads)


def s1_split_rows(t, delta):
    """Rows (m, first n, last n) of S_A (n <= [T]) and S_B (n > [T]) with n = m1 + m2."""
    n_top = floor_T(t)
    a_rows = []
    b_rows = []
    for m, first, last in s1_rows(t, delta):
        lo = m + first
        hi = m + last
        if lo <= n_top:
            a_rows.append((m, lo, min(hi, n_top)))
        if hi > n_top:
            b_rows.append((m, max(lo, n_top + 1), hi))
    return a_rows, b_rows


def sum_SA_SB(ctx: PrecisionContext, sigma, t, delta, threads: int = 1) -> Tuple[SumValue, SumValue]:
    """S_A and S_B of S1 written as sums of m^{-s} n^{-conj(s)}; S_A + S_B = S1."""
    a_rows, b_rows = s1_split_rows(t, delta)
    return (
        row_sum(ctx, "nm", sigma, t, a_rows, threads=threads),
        row_sum(ctx, "nm", sigma, t, b_rows, threads=threads),
    )


# ---------------------------------------------------------------------------
# Exact identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityReport:
    lhs: mpc
    rhs: mpc
    abs_terms: mpf
    error_bound: mpf

    @property
    def residual(self) -> mpf:
        return abs(self.lhs - self.rhs)


def exact_identity_report(ctx: PrecisionContext, sigma, t, threads: int = 1) -> IdentityReport:
    """Both sides of

        2 Re sum_{m1,m2<=[T]} m1^{-s}(m1+m2)^{-conj s}
          = sum_{m1,m2<=[T]} m1^{-s} m2^{-conj s} - sum_{m<=[T]} m^{-2 sigma}
            + 2 Re sum_{m<=[T]} sum_{n=[T]+1}^{[T]+m} m^{-conj s} n^{-s}
    """
    n = floor_T(t)
    if n < 1:
        raise DomainError("t/2pi must be at least 1")
    bits = ctx.precision_bits + GUARD_BITS
    box = _full_rows(n)
    lhs_inner = row_sum(ctx, "IS", sigma, t, box, threads=threads)
    plain = row_sum(ctx, "plain", sigma, t, box, threads=threads)
    # m^{-conj s} n^{-s} = conj(m^{-s} n^{-conj s})
    tail_rows = [(m, n + 1, n + m) for m in range(1, n + 1)]
    tail = row_sum(ctx, "nm", sigma, t, tail_rows, threads=threads)
    with mp.workprec(bits):
        sig = mpf(sigma)
        diag = CompensatedSum(bits)
        for m in range(1, n + 1):
            diag.add(mpmath.power(m, -2 * sig))
        lhs = mpc(2 * lhs_inner.value.real, 0)
        rhs = plain.value - diag.value + mpc(2 * tail.value.real, 0)
        abs_terms = 2 * lhs_inner.abs_total + plain.abs_total + diag.abs_total + 2 * tail.abs_total
        bound = 2 * lhs_inner.kahan_error_bound + plain.kahan_error_bound + diag.error_bound() + 2 * tail.kahan_error_bound
    return IdentityReport(lhs, rhs, abs_terms, bound)


def exact_identity_lhs_rhs(ctx: PrecisionContext, sigma, t) -> Tuple[mpc, mpc]:
    r = exact_identity_report(ctx, sigma, t)
    return r.lhs, r.rhs


def decomposition_report(
    ctx: PrecisionContext,
    sigma,
    t,
    params: SplitParams,
    orientation: str = "M",
    threads: int = 1,
) -> IdentityReport:
    """Full-box sum of m1^{-s}(m1+m2)^{-conj s} against M-sum + S1 + S2.

    With the M of orientation "M" (ratio between 1/L3 and L2) the complement
    is S1(delta2) + S2(delta3); with "M_swapped" it is S1(delta3) + S2(delta2).
    M is taken with closed ratio bounds and m2 <= [T] so the cover is exact.
    """
    kind, d1, d2 = _pairing(orientation, params)
    n = floor_T(t)
    full = row_sum(ctx, "IS", sigma, t, _full_rows(n), threads=threads)
    m_part = sum_over_set(ctx, sigma, t, IndexSet(kind, t, params, allow_equality=True, m2_inclusive=True), threads)
    s1 = sum_S1(ctx, sigma, t, d1, threads)
    s2 = sum_S2(ctx, sigma, t, d2, threads)
    with mp.workprec(ctx.precision_bits + GUARD_BITS):
        rhs = m_part.value + s1.value + s2.value
        abs_terms = full.abs_total + m_part.abs_total + s1.abs_total + s2.abs_total
        bound = full.kahan_error_bound + m_part.kahan_error_bound + s1.kahan_error_bound + s2.kahan_error_bound
    return IdentityReport(full.value, rhs, abs_terms, bound)


def decomposition_sweep(sigma: float, n_values: Sequence[int], params: SplitParams, orientation: str = "M") -> List[dict]:
    """Exhaustive float64 check of the M + S1 + S2 decomposition for each [T].

    For each [T] = n the point t = 2 pi (n + 1/2) is used.  The three pieces
    are enumerated independently (ratio filter for M, loop limits for S1 and
    S2) and summed with math.fsum; a violation is a residual above
    1000 * 2^-53 * sum|terms|, or a pair counted twice or not at all.
    """
    kind, d1, d2 = _pairing(orientation, params)
    violations = []
    for n in n_values:
        t = 2 * math.pi * (n + 0.5)
        m_mask = IndexSet(kind, t, params, allow_equality=True, m2_inclusive=True).mask()
        s1_mask = rows_mask(s1_rows(t, d1), n)
        s2_mask = rows_mask(s2_rows(t, d2), n)
        m1 = np.arange(1, n + 1, dtype=np.float64)[:, None]
        m2 = np.arange(1, n + 1, dtype=np.float64)[None, :]
        s = complex(sigma, t)
        terms = np.exp(-s * np.log(m1) - s.conjugate() * np.log(m1 + m2))
        count = m_mask.astype(np.int8) + s1_mask + s2_mask
        parts = []
        for mask in (None, m_mask, s1_mask, s2_mask):
            sel = terms if mask is None else terms[mask]
            parts.append(complex(math.fsum(sel.real.ravel()), math.fsum(sel.imag.ravel())))
        abs_total = float(np.abs(terms).sum()) * 2
        residual = abs(parts[0] - (parts[1] + parts[2] + parts[3]))
        tol = 1e3 * 2.0 ** -53 * abs_total
        if residual > tol or not np.all(count == 1):
            violations.append({"n": n, "residual": residual, "tol": tol, "cover": bool(np.all(count == 1))})
    return violations


# ---------------------------------------------------------------------------
# Transformations of the diagonal-tail sums
# ---------------------------------------------------------------------------

def lemma72_transform(ctx: PrecisionContext, sigma, t) -> Tuple[mpf, mpf]:
    """Both sides of the diagonal-plus-tail transformation.

    lhs = -sum_{m<=[T]} m^{-2 sigma} + 2 Re sum_m sum_{n=[T]+1}^{[T]+m} m^{-conj s} n^{-s}
    rhs = -[T]^{1-2 sigma}/(1-2 sigma) (or -ln t at sigma = 1/2)
          - (1/pi) Im{T^{-s} sum_m m^{1-2 sigma} (1/T + 1/m)^{1-s}}
    The difference is O(1) plus O(t^-sigma) |sum m^{-conj s}|.
    """
    n = floor_T(t)
    if n < 1:
        raise DomainError("t/2pi must be at least 1")
    tail = row_sum(ctx, "nm", sigma, t, [(m, n + 1, n + m) for m in range(1, n + 1)])
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        if not (0 < sigma < 1):
            raise DomainError("sigma must lie in (0, 1)")
        s = mpc(sigma, t)
        T = t / (2 * mp.pi)
        diag = mpmath.fsum(mpmath.power(m, -2 * sigma) for m in range(1, n + 1))
        lhs = -diag + 2 * tail.value.real
        if sigma == mpf(1) / 2:
            head = -mpmath.log(t)
        else:
            head = -mpf(n) ** (1 - 2 * sigma) / (1 - 2 * sigma)
        inner = mpmath.fsum(mpmath.power(m, 1 - 2 * sigma) * mpmath.power(1 / T + mpf(1) / m, 1 - s) for m in range(1, n + 1))
        rhs = head - (mpmath.power(T, -s) * inner).imag / mp.pi
        return +lhs, +rhs


def sawtooth(x) -> mpf:
    x = mpf(x)
    return x - mpmath.floor(x) - mpf(1) / 2


def sawtooth_series(x: float, n_terms: int) -> float:
    """Partial Fourier series -sum_{n<=N} sin(2 n pi x)/(n pi) of the sawtooth."""
    k = np.arange(1, n_terms + 1, dtype=np.float64)
    return -math.fsum(np.sin(2 * np.pi * k * x) / (k * np.pi))


def euler_maclaurin_identity(
    ctx: PrecisionContext,
    f: Callable,
    a,
    b,
    fprime: Optional[Callable] = None,
) -> Tuple[mpf, mpf]:
    """sum_{a<n<=b} f(n) against the first-order Euler-Maclaurin formula with the sawtooth.

    formula = int_a^b f + int_a^b (x - [x] - 1/2) f'(x) dx
              + (a - [a] - 1/2) f(a) - (b - [b] - 1/2) f(b)
    """
    with ctx.workprec():
        a = mpf(a)
        b = mpf(b)
        if not a < b:
            raise DomainError("need a < b")
        df = fprime if fprime is not None else (lambda x: mpmath.diff(f, x))
        total = mpmath.fsum(f(mpf(k)) for k in range(_floor_int(a) + 1, _floor_int(b) + 1))
        cuts = [a] + [mpf(k) for k in range(_floor_int(a) + 1, _ceil_int(b))] + [b]
        cuts = sorted(set(cuts))
        integral = mpf(0)
        saw = mpf(0)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            base = mpmath.floor(lo)
            integral += mpmath.quad(f, [lo, hi])
            saw += mpmath.quad(lambda x: (x - base - mpf(1) / 2) * df(x), [lo, hi])
        formula = integral + saw + sawtooth(a) * f(a) - sawtooth(b) * f(b)
        return +total, +formula


def tail_sum_formula(ctx: PrecisionContext, sigma, t, m: int) -> Tuple[mpc, mpc]:
    """sum_{n=[T]+1}^{[T]+m} n^{-s} and the closed form (eta/2pi)^{1-s}/(1-s), eta/2pi = [T]+m."""
    n = floor_T(t)
    if not (1 <= m <= max(n, 1)):
        raise DomainError("m must lie in 1..[T]")
    with ctx.workprec():
        s = mpc(sigma, t)
        acc = CompensatedSum(ctx.precision_bits + GUARD_BITS)
        for k in range(n + 1, n + m + 1):
            acc.add(mpmath.power(k, -s))
        formula = mpmath.power(n + m, 1 - s) / (1 - s)
        return acc.value, +formula


def closed_single_sum(ctx: PrecisionContext, sigma, t) -> Tuple[mpc, mpc]:
    """The tail sum with its closed form inserted, against the single-sum rewriting.

    Returns (2 Re sum_m m^{-conj s} (T+m)^{1-s}/(1-s), -(1/pi) Im{T^{-s} sum_m m^{1-2 sigma}(1/T+1/m)^{1-s}}).
    The two agree up to a relative O(1/t) when T is an integer.
    """
    n = floor_T(t)
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        s = mpc(sigma, t)
        T = t / (2 * mp.pi)
        closed = mpmath.fsum(mpmath.power(m, -mpmath.conj(s)) * mpmath.power(T + m, 1 - s) / (1 - s) for m in range(1, n + 1))
        inner = mpmath.fsum(mpmath.power(m, 1 - 2 * sigma) * mpmath.power(1 / T + mpf(1) / m, 1 - s) for m in range(1, n + 1))
        return +(2 * closed.real), +(-(mpmath.power(T, -s) * inner).imag / mp.pi)


# ---------------------------------------------------------------------------
# Monitors
# ---------------------------------------------------------------------------

@dataclass
class TilingReport:
    value: mpc
    modulus: mpf
    ratio: mpf
    tile_sums: List[mpc]


def appendix_b_monitor(ctx: PrecisionContext, t, M_range: Tuple[int, int], N_range: Tuple[int, int]) -> TilingReport:
    """sum_{m in M_range} sum_{n in N_range, n > m} m^{-it} n^{it}, its ratio to t ln t,
    and the partial sums over rectangles of side ~ M^2/t by ~ N^2/t."""
    m_lo, m_hi = M_range
    n_lo, n_hi = N_range
    if not (m_lo < m_hi and n_lo < n_hi and m_lo >= 1 and n_lo >= 1):
        raise DomainError("ranges must be nonempty half-open intervals of positive integers")
    with ctx.workprec():
        t = mpf(t)
        ns = list(range(n_lo, n_hi))
        b = [mpmath.expj(t * mpmath.log(k)) for k in ns]
        # suffix[i] = sum_{j >= i} b[j]
        suffix = [mpc(0)] * (len(ns) + 1)
        for i in range(len(ns) - 1, -1, -1):
            suffix[i] = suffix[i + 1] + b[i]
        total = mpc(0)
        a_vals = {}
        for m in range(m_lo, m_hi):
            a = mpmath.expj(-t * mpmath.log(m))
            a_vals[m] = a
            start = max(m + 1, n_lo) - n_lo
            if start < len(ns):
                total += a * suffix[start]
        l1 = max(1, _ceil_int(mpf(m_hi) ** 2 / t))
        l2 = max(1, _ceil_int(mpf(n_hi) ** 2 / t))
        prefix = [mpc(0)]
        for v in b:
            prefix.append(prefix[-1] + v)
        tiles = []
        for p in range(m_lo, m_hi, l1):
            for q in range(n_lo, n_hi, l2):
                q_end = min(q + l2, n_hi)
                tile = mpc(0)
                for m in range(p, min(p + l1, m_hi)):
                    first = max(m + 1, q)
                    if first < q_end:
                        tile += a_vals[m] * (prefix[q_end - n_lo] - prefix[first - n_lo])
                tiles.append(tile)
        modulus = abs(total)
        return TilingReport(+total, +modulus, +(modulus / (t * mpmath.log(t))), tiles)


@dataclass
class CrudeBoundReport:
    single: mpf
    double: mpf
    bound: mpf
    single_holds: bool
    double_holds: bool


def crude_bound_monitor(ctx: PrecisionContext, sigma, t) -> CrudeBoundReport:
    """|sum_{m<=[T]} m^{-s}| and |double sum| against int_1^T x^{-sigma} dx (and its square)."""
    n = floor_T(t)
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        T = t / (2 * mp.pi)
        s = mpc(sigma, t)
        z = mpmath.fsum(mpmath.power(m, -s) for m in range(1, n + 1))
        bound = mpmath.quad(lambda x: x ** (-sigma), [1, T])
        single = abs(z)
        double = single ** 2
        return CrudeBoundReport(+single, +double, +bound, bool(single <= bound), bool(double <= bound ** 2))


def s1_scaled_monitor(ctx: PrecisionContext, sigma, t, delta) -> mpf:
    """|S1| t^{sigma - 1/2 - delta/2} / ln t."""
    v = sum_S1(ctx, sigma, t, delta).value
    with ctx.workprec():
        t = mpf(t)
        return +(abs(v) * t ** (mpf(sigma) - mpf(1) / 2 - mpf(delta) / 2) / mpmath.log(t))


def sa_inner_ratio(ctx: PrecisionContext, sigma, t) -> mpf:
    """max_m |sum_{n=m+1}^{m+[T]} n^{1-sigma-it}| / t^{3/2 - sigma}."""
    n = floor_T(t)
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        expo = mpc(1 - sigma, -t)
        prefix = [mpc(0)]
        for k in range(1, 2 * n + 1):
            prefix.append(prefix[-1] + mpmath.power(k, expo))
        worst = max(abs(prefix[m + n] - prefix[m]) for m in range(1, n + 1))
        return +(worst / t ** (mpf(3) / 2 - sigma))
