"""Explicit asymptotic expansions of zeta and |zeta|^2, and the reflection factor chi."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp, mpc, mpf

from .errors import DivergenceError, DomainError, PoleError
from .numerics import PrecisionContext, gamma, polylog


@dataclass(frozen=True)
class ExpansionResult:
    """Explicit part of an expansion plus the magnitude of its dropped O-term."""

    value: mpc
    stated_error_scale: mpf

    def __post_init__(self) -> None:
        if self.stated_error_scale < 0:
            raise ValueError("stated_error_scale must be nonnegative")


def _dirichlet_partial(s: mpc, n: int) -> mpc:
    return mpmath.fsum(mpmath.power(m, -s) for m in range(1, n + 1))


def _arg_one_minus_expi(t: mpf) -> mpf:
    w = 1 - mpmath.expj(t)
    if w == 0:
        raise DivergenceError("arg(1 - e^{it}) is undefined at t = 0 mod 2*pi")
    return mpmath.arg(w)


def _on_unit_root(t: mpf) -> bool:
    r = t / (2 * mp.pi)
    return abs(r - mpmath.nint(r)) < mpmath.ldexp(1, -mp.prec + 8)


def zeta_main_expansion(ctx: PrecisionContext, sigma, xi, eta) -> ExpansionResult:
    """zeta(sigma+i xi) from a Dirichlet sum up to eta/2pi plus polylog corrections.

    Valid for eta > xi > 0 and 0 <= sigma <= 1.  The dropped term has size
    xi^3 / eta^(3+sigma).
    """
    with ctx.workprec():
        sigma = mpf(sigma)
        xi = mpf(xi)
        eta = mpf(eta)
        if not (0 <= sigma <= 1):
            raise DomainError("sigma must lie in [0, 1]")
        if not (xi > 0):
            raise DomainError("xi must be positive")
        if not (eta > xi):
            raise DomainError("eta must exceed xi")
        if _on_unit_root(eta):
            raise DivergenceError("e^{i eta} = 1: polylog terms degenerate")
        s = mpc(sigma, xi)
        big_t = eta / (2 * mp.pi)
        partial = _dirichlet_partial(s, int(mpmath.floor(big_t)))
        head = -mpmath.power(big_t, 1 - s) / (1 - s)
        li2 = polylog(ctx, 2, eta)
        li3 = polylog(ctx, 3, eta)
        bracket = (
            -1j * _arg_one_minus_expi(eta)
            + (xi - 1j * sigma) / eta * li2.real
            + (1j * xi ** 2 + (2 * sigma + 1) * xi - 1j * sigma * (sigma + 1)) / eta ** 2 * li3.imag
        )
        corr = 1j / mp.pi * mpmath.power(big_t, -s) * bracket
        value = partial + head + corr
        scale = xi ** 3 / eta ** (3 + sigma)
        return ExpansionResult(+value, +scale)


def g_factor(ctx: PrecisionContext, t) -> mpc:
    """G(e^{it}) = arg(1-e^{it}) - Im Li3(e^{it}) - i/2 + i Re Li2(e^{it})."""
    with ctx.workprec():
        t = mpf(t)
        if _on_unit_root(t):
            raise DivergenceError("G(e^{it}) is undefined at t = 0 mod 2*pi")
        li2 = polylog(ctx, 2, t)
        li3 = polylog(ctx, 3, t)
        value = _arg_one_minus_expi(t) - li3.imag + 1j * (li2.real - mpf(1) / 2)
        return +value


def zeta_sq_pieces(ctx: PrecisionContext, sigma, t, x):
    """The four explicit terms of the |zeta(sigma+it-ix)|^2 expansion.

    Returns (double_sum, cross_left, cross_right, g_square).  The two cross
    terms are complex conjugates of each other (swap of the summation
    indices), and the double sum and g_square are real.
    """
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        x = mpf(x)
        big_t = t / (2 * mp.pi)
        if big_t < 1:
            raise DomainError("t/2pi must be at least 1")
        if abs(x) >= t:
            raise DomainError("|x| must be smaller than t")
        n = int(mpmath.floor(big_t))
        s = mpc(sigma, t)
        # sum_m m^{-s+ix}: the double sum factorises into |.|^2
        z = mpmath.fsum(mpmath.power(m, -s + 1j * x) for m in range(1, n + 1))
        g = g_factor(ctx, t)
        w = g * mpmath.power(big_t, -sigma - 1j * t + 1j * x) / mp.pi
        double_sum = mpc(abs(z) ** 2, 0)
        cross_left = z * mpmath.conj(w)
        cross_right = mpmath.conj(z) * w
        g_square = mpc(abs(g) ** 2 * big_t ** (-2 * sigma) / mp.pi ** 2, 0)
        return +double_sum, +cross_left, +cross_right, +g_square


def zeta_sq_expansion(ctx: PrecisionContext, sigma, t, x) -> mpc:
    """Explicit part of the |zeta(sigma+it-ix)|^2 expansion for |x| small against t."""
    d, cl, cr, g2 = zeta_sq_pieces(ctx, sigma, t, x)
    with ctx.workprec():
        return +(d + cl + cr + g2)


def chi(ctx: PrecisionContext, s) -> mpc:
    """chi(s) = (2pi)^s/pi sin(pi s/2) Gamma(1-s), so that zeta(s) = chi(s) zeta(1-s)."""
    with ctx.workprec():
        s = mpc(s)
        if s.imag == 0 and s.real >= 1 and s.real == mpmath.floor(s.real):
            k = int(s.real)
            if k % 2 == 1:
                raise PoleError("chi has a pole at odd positive integers")
            # sin zero cancels the Gamma pole at even positive integers
            half = k // 2
            value = (2 * mp.pi) ** k * (-1) ** half / (2 * mpmath.factorial(k - 1))
            return mpc(+value)
        value = (2 * mp.pi) ** s / mp.pi * mpmath.sin(mp.pi * s / 2) * gamma(ctx, 1 - s)
        return +value
