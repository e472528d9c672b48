"""Precision context and reference special functions.

Everything here is a self-contained oracle: no routine in this module calls
the asymptotic formulas of :mod:`zlab.gamma_asymptotics` or
:mod:`zlab.zeta_expansion`.  Values are mpmath ``mpc`` numbers; the
``ComplexValue`` alias names that role in signatures.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Union

import mpmath
from mpmath import mp, mpc, mpf

from .errors import DivergenceError, PoleError

ComplexValue = mpc
Number = Union[int, float, complex, mpf, mpc]

# Extra bits carried internally so that results are good to the requested
# precision after cancellation in shifts, reflections and sums.
GUARD_BITS = 32


@functools.lru_cache(maxsize=None)
def _euler_gamma(bits: int) -> mpf:
    with mp.workprec(bits):
        return +mp.euler


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision and tolerances for all special-function evaluation.

    ``rel_tol`` defaults to ``2**(-precision_bits/2)``.  The context is
    immutable and safe to share between workers.
    """

    precision_bits: int = 256
    rel_tol: Union[float, mpf, None] = None
    series_max_terms: int = 200_000

    def __post_init__(self) -> None:
        if int(self.precision_bits) != self.precision_bits or self.precision_bits < 64:
            raise ValueError("precision_bits must be an integer >= 64")
        if int(self.series_max_terms) <= 0:
            raise ValueError("series_max_terms must be positive")
        tol = self.rel_tol
        if tol is None:
            tol = mpmath.ldexp(1, -(self.precision_bits // 2))
        tol = mpf(tol)
        if not tol > 0:
            raise ValueError("rel_tol must be positive")
        if tol < mpmath.ldexp(1, -self.precision_bits):
            raise ValueError("rel_tol must be at least 2**-precision_bits")
        object.__setattr__(self, "rel_tol", tol)

    @property
    def dps(self) -> int:
        return mpmath.libmp.prec_to_dps(self.precision_bits)

    @property
    def unit_roundoff(self) -> mpf:
        return mpmath.ldexp(1, -self.precision_bits)

    @property
    def euler_gamma(self) -> mpf:
        """Euler's constant at full context precision (computed once)."""
        return _euler_gamma(self.precision_bits + GUARD_BITS)

    def workprec(self, extra: int = GUARD_BITS):
        return mp.workprec(self.precision_bits + extra)


DEFAULT_CONTEXT = PrecisionContext()


def as_mpc(z: Number) -> mpc:
    return mpc(z)


def _is_nonpositive_integer(z: mpc) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == mpmath.floor(z.real)


# ---------------------------------------------------------------------------
# Gamma and digamma: recurrence-shifted Stirling series with explicit bound
# ---------------------------------------------------------------------------

def _shift_target(bits: int) -> int:
    # Stirling terms bottom out near exp(-2*pi*|w|); 0.3*bits leaves margin
    # for the sec(arg/2) growth factor near the imaginary axis.
    return max(12, int(0.3 * bits) + 4)


def _stirling_log_gamma(w: mpc, tol: mpf, max_terms: int) -> mpc:
    """log Gamma(w) (not branch-normalised) for Re w large, with remainder bound."""
    lw = mpmath.log(w)
    res = (w - mpf(0.5)) * lw - w + mpmath.log(2 * mp.pi) / 2
    inv = 1 / w
    inv2 = inv * inv
    sec = 1 / mpmath.cos(mpmath.arg(w) / 2)
    absw = abs(w)
    pw = inv
    for k in range(1, max_terms + 1):
        b = mpmath.bernoulli(2 * k)
        res += b / ((2 * k) * (2 * k - 1)) * pw
        pw *= inv2
        bn = abs(mpmath.bernoulli(2 * k + 2))
        bound = bn / ((2 * k + 2) * (2 * k + 1) * absw ** (2 * k + 1)) * sec ** (2 * k + 2)
        if bound < tol:
            return res
    raise DivergenceError("Stirling series did not reach tolerance; shift too small")


def _digamma_series(w: mpc, tol: mpf, max_terms: int) -> mpc:
    res = mpmath.log(w) - 1 / (2 * w)
    inv2 = 1 / (w * w)
    sec = 1 / mpmath.cos(mpmath.arg(w) / 2)
    absw = abs(w)
    pw = inv2
    for k in range(1, max_terms + 1):
        res -= mpmath.bernoulli(2 * k) / (2 * k) * pw
        pw *= inv2
        bn = abs(mpmath.bernoulli(2 * k + 2))
        bound = bn / ((2 * k + 2) * absw ** (2 * k + 2)) * sec ** (2 * k + 3)
        if bound < tol:
            return res
    raise DivergenceError("digamma asymptotic series did not reach tolerance")


def _guard_for(z: mpc) -> int:
    # |log Gamma| grows like |z| log|z|; its absolute error becomes the
    # relative error of Gamma, so carry that many extra bits.
    size = abs(z) + 2
    return GUARD_BITS + int(mpmath.log(size * mpmath.log(size) + 2, 2)) + 4


def gamma(ctx: PrecisionContext, z: Number) -> mpc:
    """Gamma(z) to relative accuracy ``ctx.rel_tol``."""
    z = as_mpc(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z}")
    with ctx.workprec(_guard_for(z)):
        return _gamma_work(ctx, z)


def _gamma_work(ctx: PrecisionContext, z: mpc) -> mpc:
    if z.real < 0.5:
        # reflection keeps the shifted argument in the right half-plane
        return mp.pi / (mpmath.sin(mp.pi * z) * _gamma_work(ctx, 1 - z))
    target = _shift_target(mp.prec)
    n = max(0, int(mpmath.ceil(target - z.real)))
    prod = mpc(1)
    for k in range(n):
        prod *= z + k
    tol = mpmath.ldexp(1, -mp.prec + 8)
    lg = _stirling_log_gamma(z + n, tol, ctx.series_max_terms)
    return mpmath.exp(lg) / prod


def log_gamma(ctx: PrecisionContext, z: Number) -> mpc:
    """A logarithm of Gamma(z) for Re z >= 1/2 (imaginary part not reduced)."""
    z = as_mpc(z)
    if z.real < 0.5:
        raise ValueError("log_gamma is only provided for Re z >= 1/2")
    with ctx.workprec(_guard_for(z)):
        target = _shift_target(mp.prec)
        n = max(0, int(mpmath.ceil(target - z.real)))
        acc = mpc(0)
        for k in range(n):
            acc += mpmath.log(z + k)
        tol = mpmath.ldexp(1, -mp.prec + 8)
        return _stirling_log_gamma(z + n, tol, ctx.series_max_terms) - acc


def digamma(ctx: PrecisionContext, z: Number) -> mpc:
    """Psi(z) = Gamma'(z)/Gamma(z) to ``ctx.rel_tol``."""
    z = as_mpc(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"digamma has a pole at {z}")
    with ctx.workprec(_guard_for(z)):
        return _digamma_work(ctx, z)


def _digamma_work(ctx: PrecisionContext, z: mpc) -> mpc:
    if z.real < 0.5:
        return _digamma_work(ctx, 1 - z) - mp.pi / mpmath.tan(mp.pi * z)
    target = _shift_target(mp.prec)
    n = max(0, int(mpmath.ceil(target - z.real)))
    acc = mpc(0)
    for k in range(n):
        acc += 1 / (z + k)
    tol = mpmath.ldexp(1, -mp.prec + 8)
    return _digamma_series(z + n, tol, ctx.series_max_terms) - acc


# ---------------------------------------------------------------------------
# Zeta via Euler-Maclaurin with a proven remainder bound
# ---------------------------------------------------------------------------

def _em_cutoff(s: mpc, bits: int) -> int:
    return int(mpmath.ceil(1.2 * (abs(s) + bits * mpmath.log(2)) / (2 * mp.pi))) + 2


def zeta_oracle(ctx: PrecisionContext, s: Number) -> mpc:
    """Riemann zeta by Euler-Maclaurin summation.

    The remainder after K correction terms obeys
    |R_K| <= |s+2K+1| / (Re s + 2K + 1) * |T_{K+1}|, and K is increased until
    that bound is below ``rel_tol/10`` of the running value.
    """
    s = as_mpc(s)
    if s == 1:
        raise PoleError("zeta has a pole at s=1")
    with ctx.workprec(GUARD_BITS + int(mpmath.log(abs(s) + 2, 2))):
        tol = ctx.rel_tol / 10
        n_cut = _em_cutoff(s, ctx.precision_bits)
        for _ in range(8):
            val = _zeta_em(s, n_cut, tol, ctx.series_max_terms)
            if val is not None:
                return val
            n_cut = int(n_cut * 1.5) + 1
    raise DivergenceError(f"Euler-Maclaurin did not converge for s={s}")


def _zeta_em(s: mpc, n_cut: int, tol: mpf, max_terms: int):
    head = mpmath.fsum(mpf(n) ** (-s) for n in range(1, n_cut))
    nn = mpf(n_cut)
    n_s = nn ** (-s)
    val = head + nn * n_s / (s - 1) + n_s / 2
    sigma = s.real
    poch = s  # s(s+1)...(s+2k-2)
    npow = n_s / nn  # N^{-s-2k+1} for k=1
    fact = mpf(2)  # (2k)!
    term = mpmath.bernoulli(2) / fact * poch * npow
    prev_abs = abs(term)
    for k in range(1, max_terms):
        val += term
        # next term T_{k+1}
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        npow /= nn * nn
        fact *= (2 * k + 1) * (2 * k + 2)
        nxt = mpmath.bernoulli(2 * k + 2) / fact * poch * npow
        denom = sigma + 2 * k + 1
        if denom > 0:
            bound = abs(s + 2 * k + 1) / denom * abs(nxt)
            if bound < tol * abs(val) or val == 0 and bound < tol:
                return val
        if k > 4 and abs(nxt) > prev_abs:
            return None  # asymptotic terms started growing: raise the cutoff
        prev_abs = abs(nxt)
        term = nxt
    return None


# ---------------------------------------------------------------------------
# Polylogarithm on the unit circle
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _zeta_int(n: int, bits: int) -> mpf:
    """zeta at an integer n != 1, exact through Bernoulli numbers when n <= 0."""
    with mp.workprec(bits):
        if n == 0:
            return mpf(-0.5)
        if n < 0:
            m = -n
            return -mpmath.bernoulli(m + 1) / (m + 1)
        ctx = PrecisionContext(max(64, bits - GUARD_BITS), rel_tol=mpmath.ldexp(1, -(bits - GUARD_BITS)))
        return zeta_oracle(ctx, n).real


def polylog(ctx: PrecisionContext, m: int, theta: Number) -> mpc:
    """Li_m(e^{i theta}) for integer m >= 1 and real theta.

    Uses the expansion in powers of theta about the singular point 1,
    Li_m(e^{iθ}) = Σ_{k != m-1} ζ(m-k)(iθ)^k/k! + (iθ)^{m-1}/(m-1)! (H_{m-1} - log(-iθ)),
    after reducing θ to (-π, π]; the tail is bounded by 4 (2π)^{m-1} r^{k+1}/(1-r)
    with r = |θ|/2π <= 1/2.
    """
    if int(m) != m or m < 1:
        raise ValueError("polylog order must be an integer >= 1")
    m = int(m)
    with ctx.workprec():
        th = mpf(theta)
        th = th - 2 * mp.pi * mpmath.nint(th / (2 * mp.pi))
        # a multiple of 2 pi given in floating point reduces to rounding noise
        if abs(th) <= mpmath.ldexp(max(1, abs(mpf(theta))), -mp.prec + 8):
            th = mpf(0)
        if th == 0:
            if m == 1:
                raise DivergenceError("Li_1(1) diverges")
            return mpc(_zeta_int(m, mp.prec))
        if m == 1:
            return -mpmath.log(1 - mpmath.expj(th))
        tol = ctx.rel_tol / 100
        r = abs(th) / (2 * mp.pi)
        ith = mpc(0, th)
        harmonic = mpmath.fsum(mpf(1) / j for j in range(1, m))
        total = mpc(0)
        power = mpc(1)  # (iθ)^k / k!
        k = 0
        while True:
            if k == m - 1:
                total += power * (harmonic - mpmath.log(-ith))
            else:
                total += _zeta_int(m - k, mp.prec) * power
            k += 1
            power *= ith / k
            if k > m + 2:
                tail = 4 * (2 * mp.pi) ** (m - 1) * r ** (k + 1) / (1 - r)
                if tail < tol * abs(total):
                    return total
            if k > ctx.series_max_terms:
                raise DivergenceError("polylog series did not converge")


# ---------------------------------------------------------------------------
# Compensated accumulation
# ---------------------------------------------------------------------------

class CompensatedSum:
    """Neumaier-compensated accumulator for real or complex mpmath terms.

    Accumulation runs at ``bits`` of precision.  ``error_bound`` returns
    u|S| + 2 n u^2 Σ|x| with u = 2^-bits, the standard bound for this scheme
    on each of the real and imaginary parts.
    """

    def __init__(self, bits: int) -> None:
        self.bits = bits
        self._sr = mpf(0)
        self._cr = mpf(0)
        self._si = mpf(0)
        self._ci = mpf(0)
        self.count = 0
        self.abs_total = mpf(0)
        self.max_abs = mpf(0)

    @staticmethod
    def _step(s: mpf, c: mpf, x: mpf):
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        return t, c

    def add(self, x: Number) -> None:
        with mp.workprec(self.bits):
            x = mpc(x)
            self._sr, self._cr = self._step(self._sr, self._cr, x.real)
            self._si, self._ci = self._step(self._si, self._ci, x.imag)
            ax = abs(x)
            self.abs_total += ax
            if ax > self.max_abs:
                self.max_abs = ax
        self.count += 1

    def extend(self, xs) -> None:
        for x in xs:
            self.add(x)

    def merge(self, other: "CompensatedSum") -> None:
        """Fold another accumulator into this one (ordered reduction)."""
        with mp.workprec(self.bits):
            self._sr, self._cr = self._step(self._sr, self._cr, other._sr)
            self._sr, self._cr = self._step(self._sr, self._cr, other._cr)
            self._si, self._ci = self._step(self._si, self._ci, other._si)
            self._si, self._ci = self._step(self._si, self._ci, other._ci)
            self.abs_total += other.abs_total
            if other.max_abs > self.max_abs:
                self.max_abs = other.max_abs
        self.count += other.count

    @property
    def value(self) -> mpc:
        with mp.workprec(self.bits):
            return mpc(self._sr + self._cr, self._si + self._ci)

    def error_bound(self) -> mpf:
        with mp.workprec(self.bits):
            u = mpmath.ldexp(1, -self.bits)
            return u * abs(self.value) + 2 * self.count * u * u * self.abs_total
