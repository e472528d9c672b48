"""Stirling-type factors, gamma ratios, Hankel-contour integrals and the J4 kernel."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import mpmath
from mpmath import mp, mpc, mpf

from .errors import ConvergenceError, DomainError, PoleError
from .numerics import PrecisionContext
from .quadrature import integrate_panels, uniform_edges


@dataclass(frozen=True)
class HankelSpec:
    """Hankel contour: two rays along the negative axis joined by a circle.

    The lower ray carries arg z = -pi, the upper ray arg z = +pi, and the
    contour runs counterclockwise around the origin.
    """

    circle_radius: float = 1.0
    truncation_radius: float = 100.0
    nodes_per_unit: int = 20

    def __post_init__(self) -> None:
        if self.circle_radius != 1:
            raise ValueError("circle_radius must be 1")
        if self.truncation_radius < 10:
            raise ValueError("truncation_radius must be at least 10")
        if self.nodes_per_unit < 2:
            raise ValueError("nodes_per_unit must be at least 2")

    @classmethod
    def for_tolerance(cls, tol, max_im_exponent: float = 0.0, nodes_per_unit: int = 20) -> "HankelSpec":
        """Cut the rays where e^{-r} r^{max|Im exponent|} < tol/100."""
        tol = mpf(tol) / 100
        r = mpf(10)
        while mpmath.exp(-r) * r ** max_im_exponent >= tol:
            r += 1
        return cls(1.0, float(r), nodes_per_unit)


def stirling_plus(ctx: PrecisionContext, sigma, xi) -> mpc:
    """Leading Stirling factor for Gamma(sigma + i xi), xi > 0."""
    return _stirling(ctx, sigma, xi, +1)


def stirling_minus(ctx: PrecisionContext, sigma, xi) -> mpc:
    """Leading Stirling factor for Gamma(sigma - i xi), xi > 0."""
    return _stirling(ctx, sigma, xi, -1)


def _stirling(ctx: PrecisionContext, sigma, xi, sign: int) -> mpc:
    with ctx.workprec():
        sigma = mpf(sigma)
        xi = mpf(xi)
        if not xi > 0:
            raise DomainError("xi must be positive")
        modulus = mpmath.sqrt(2 * mp.pi) * xi ** (sigma - mpf(1) / 2) * mpmath.exp(-mp.pi * xi / 2)
        phase = sign * (-mp.pi / 4 - xi + xi * mpmath.log(xi) + mp.pi * sigma / 2)
        return +(modulus * mpmath.expj(phase))


def gamma_ratio_shift(ctx: PrecisionContext, sigma, t, x) -> mpc:
    """Leading form of Gamma(sigma+it-ix)/Gamma(sigma+it) for t - |x| large."""
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        x = mpf(x)
        if abs(x) >= t:
            raise DomainError("|x| must be smaller than t")
        if t - abs(x) < 10:
            raise DomainError("t - |x| must be at least 10")
        r = 1 - x / t
        log_value = (
            -1j * x * mpmath.log(t)
            + mp.pi * x / 2
            + (sigma - mpf(1) / 2) * mpmath.log(r)
            + 1j * x
            + 1j * (t - x) * mpmath.log(r)
        )
        return +mpmath.exp(log_value)


def gamma_ratio_tau(ctx: PrecisionContext, sigma, t, tau, delta2=None, delta3=None) -> mpc:
    """Leading form of Gamma(it-it tau)/Gamma(sigma+it).

    Requires t^delta2 <= t tau <= t - t^delta3 when the two exponents are
    given, and 0 < tau < 1 otherwise.
    """
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        tau = mpf(tau)
        if not (0 < tau < 1):
            raise DomainError("tau must lie in (0, 1)")
        if delta2 is not None and t * tau < t ** mpf(delta2):
            raise DomainError("t*tau below t^delta2")
        if delta3 is not None and t * tau > t - t ** mpf(delta3):
            raise DomainError("t*tau above t - t^delta3")
        one_minus = 1 - tau
        log_value = (
            -sigma * mpmath.log(t)
            - 1j * mp.pi * sigma / 2
            + 1j * one_minus * t * mpmath.log(one_minus)
            - 1j * tau * t * mpmath.log(t)
            - mpmath.log(one_minus) / 2
            + 1j * tau * t
            + mp.pi * tau * t / 2
        )
        return +mpmath.exp(log_value)


def hankel_integral(
    ctx: PrecisionContext,
    spec: HankelSpec,
    f: Callable[[mpc, mpc], mpc],
) -> mpc:
    """Integral of f over the Hankel contour.

    ``f(z, log_z)`` receives the point and the branch-correct logarithm
    (imaginary part -pi on the lower ray, +pi on the upper ray), so
    multivalued integrands such as z^{ix-1} = exp((ix-1) log_z) are
    evaluated on the right sheet.
    """
    n = spec.nodes_per_unit
    with ctx.workprec():
        big_r = mpf(spec.truncation_radius)
        ray_edges = uniform_edges(mpf(1), big_r, mpf(1))
        ipi = mpc(0, mp.pi)

        def lower(r):
            return f(mpc(-r), mpmath.log(r) - ipi)

        def upper(r):
            return -f(mpc(-r), mpmath.log(r) + ipi)

        def circle(theta):
            z = mpmath.expj(theta)
            return f(z, mpc(0, theta)) * 1j * z

        circle_edges = uniform_edges(-mp.pi, mp.pi, mpf(1) / 2)
        total = (
            integrate_panels(lower, ray_edges, n)
            + integrate_panels(upper, ray_edges, n)
            + integrate_panels(circle, circle_edges, n)
        )
        # Tail beyond the cut: integrands decay at least like e^{-r}, so the
        # integral past R is bounded by the endpoint modulus (times 1/(1-eps)).
        tail = abs(lower(big_r)) + abs(upper(big_r))
        scale = max(abs(total), mpf(1))
        if tail > ctx.rel_tol * scale:
            raise ConvergenceError(
                f"Hankel ray tail {mpmath.nstr(tail, 5)} exceeds tolerance; increase truncation_radius"
            )
        return +total


def jtilde4_closed(ctx: PrecisionContext, A) -> mpc:
    """(i/2)(-1 + 2/(1 - iA)): the large-t value of the J4 kernel integral."""
    with ctx.workprec():
        A = mpc(A)
        den = 1 - 1j * A
        if den == 0:
            raise PoleError("1 - iA vanishes at A = -i")
        return +(0.5j * (-1 + 2 / den))


def _jtilde4_integrand(A: mpc) -> Callable:
    log_a = mpmath.log(A)

    def f(x):
        return mpmath.exp(mp.pi * x / 2 + 1j * x * log_a) / (mpmath.exp(-mp.pi * x) - mpmath.exp(mp.pi * x))

    return f


def _jtilde4_regular(A: mpc) -> Callable:
    """g(x) = x f(x), analytic at 0 with g(0) = -1/(2 pi)."""
    f = _jtilde4_integrand(A)

    def g(x):
        if x == 0:
            return mpc(-1 / (2 * mp.pi))
        return x * f(x)

    return g


def jtilde4_quadrature(
    ctx: PrecisionContext,
    t,
    delta3,
    delta4,
    A,
    excision: Optional[float] = None,
) -> mpc:
    """Principal value of the J4 kernel integral over [-t^delta3, t^delta4].

    The simple pole at 0 is handled by folding: on [-c, c] with
    c = min(t^delta3, t^delta4) the integrand g(x)/x is replaced by
    (g(x) - g(-x))/x on [0, c], which is regular.  The rest of the range is
    integrated directly.  With ``excision`` = eps the folded part starts at
    eps instead of 0 and the excised piece is taken from the Taylor term
    2 g'(0) eps; the value for eps and eps/2 must agree to ctx.rel_tol.
    """
    with ctx.workprec():
        t = mpf(t)
        if t < 10:
            raise DomainError("t must be at least 10")
        A = mpc(A)
        if A == 0:
            raise DomainError("A must be nonzero")
        a = t ** mpf(delta3)
        b = t ** mpf(delta4)
        c = min(a, b)
        f = _jtilde4_integrand(A)
        g = _jtilde4_regular(A)

        def folded(x):
            return (g(x) - g(-x)) / x

        def value_with(eps):
            if eps == 0:
                core = mpmath.quad(folded, [0, c])
            else:
                gp0 = mpmath.diff(g, 0)
                core = 2 * gp0 * eps + mpmath.quad(folded, [eps, c])
            rest = 0
            if b > c:
                rest += mpmath.quad(f, mpmath.linspace(c, b, 4))
            if a > c:
                rest += mpmath.quad(f, mpmath.linspace(-a, -c, 4))
            return core + rest

        if excision is None or excision == 0:
            return +value_with(0)
        eps = mpf(excision)
        v1 = value_with(eps)
        v2 = value_with(eps / 2)
        if abs(v1 - v2) > mpf(excision) ** 3 * 10 + ctx.rel_tol * max(abs(v2), 1):
            raise ConvergenceError("principal-value excision study did not converge")
        return +v2
