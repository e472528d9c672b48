"""Stationary-phase evaluation of the oscillatory integrals J1..J6 and the
boundary integrals J_B with their uniform (Fresnel) asymptotics.

Notation: G(sigma, tau) = (1-tau)^(-1/2) tau^(sigma-1/2),
F(tau, lam) = (1-tau) ln(1-tau) + tau ln tau + tau ln lam, and

    J_j(lam) = int_{t^(d2-1)}^{1-t^(d3-1)} G e^{i t F(tau, lam)} A D_j d tau

with D_1 = 1, D_2 = 1/(tau - i(1-sigma)/t), D_3 = 1/(tau + i(1-sigma)/t),
D_4 = conj(B), D_5 = B, and J6 using F(tau, 1) and D = C.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import mpmath
from mpmath import mp, mpc, mpf

from .errors import BoundaryStationaryWarning, ConvergenceError, DomainError
from .integral_engine import SplitParams
from .numerics import PrecisionContext, gamma, polylog
from .quadrature import QuadratureSpec, adaptive_edges, panel_nodes
from .zeta_expansion import _arg_one_minus_expi


# ---------------------------------------------------------------------------
# Phase and amplitude
# ---------------------------------------------------------------------------

def phase_F(tau, lam) -> mpf:
    """F(tau, lam) = (1-tau) ln(1-tau) + tau ln tau + tau ln lam for 0 < tau < 1."""
    tau = mpf(tau)
    lam = mpf(lam)
    if not (0 < tau < 1):
        raise DomainError("tau must lie strictly between 0 and 1")
    if not lam > 0:
        raise DomainError("lambda must be positive")
    return (1 - tau) * mpmath.log(1 - tau) + tau * mpmath.log(tau) + tau * mpmath.log(lam)


def phase_F_prime(tau, lam) -> mpf:
    tau = mpf(tau)
    return mpmath.log(tau * mpf(lam) / (1 - tau))


def phase_F_second(tau) -> mpf:
    tau = mpf(tau)
    return 1 / (tau * (1 - tau))


def _phase_F_complex(z: mpc, log_lam: mpf) -> mpc:
    return (1 - z) * mpmath.log(1 - z) + z * mpmath.log(z) + z * log_lam


def amplitude_G(sigma, tau):
    return (1 - tau) ** (-mpf(1) / 2) * tau ** (mpf(sigma) - mpf(1) / 2)


@dataclass(frozen=True)
class PhasePoint:
    """Stationary point tau1 = 1/(1+lam) of F(., lam), with F and F'' there."""

    tau1: mpf
    F_at: mpf
    Fpp_at: mpf

    @classmethod
    def from_lambda(cls, lam) -> "PhasePoint":
        lam = mpf(lam)
        if not lam > 0:
            raise DomainError("lambda must be positive")
        tau1 = 1 / (1 + lam)
        return cls(tau1, -mpmath.log(1 + 1 / lam), (1 + lam) ** 2 / lam)


@dataclass(frozen=True)
class BoundaryScale:
    """Rescaling near the coalescence of the stationary point with 1 - t^(delta-1)."""

    lambda_c: mpf
    Lambda: mpf
    omega: mpf

    @classmethod
    def from_params(cls, t, delta, lam) -> "BoundaryScale":
        t = mpf(t)
        e = t ** (mpf(delta) - 1)
        lam_c = e / (1 - e)
        big_lambda = mpf(lam) / lam_c - 1
        if big_lambda < 0 and -big_lambda < mpmath.ldexp(1, -mp.prec + 16):
            big_lambda = mpf(0)
        if big_lambda < 0:
            raise DomainError("lambda must be at least lambda_c")
        omega = mpmath.sqrt(lam_c * t / 2) * mpmath.log(1 + big_lambda) / (1 + lam_c)
        return cls(lam_c, big_lambda, omega)


# ---------------------------------------------------------------------------
# Correction factors A, B, C
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _PolyData:
    arg: mpf
    re_li2: mpf
    im_li3: mpf


def _poly_data(ctx: PrecisionContext, t: mpf) -> _PolyData:
    return _PolyData(_arg_one_minus_expi(t), polylog(ctx, 2, t).real, polylog(ctx, 3, t).imag)


def _B_from(data: _PolyData, sigma: mpf, t: mpf, z) -> mpc:
    bracket = (
        -1j * data.arg
        + (z - 1j * sigma / t) * data.re_li2
        + (1j * z ** 2 + (2 * sigma + 1) * z / t - 1j * sigma * (sigma + 1) / t ** 2) * data.im_li3
    )
    return 1j / mp.pi * bracket


def _B_bar_from(data: _PolyData, sigma: mpf, t: mpf, z) -> mpc:
    # analytic continuation of conj(B(tau)) off the real axis
    return mpmath.conj(_B_from(data, sigma, t, mpmath.conj(mpc(z))))


def B_function(ctx: PrecisionContext, sigma, t, tau) -> mpc:
    """Polylog correction B(sigma, t, tau) in the expansion of zeta(sigma + i t tau)."""
    with ctx.workprec():
        return +_B_from(_poly_data(ctx, mpf(t)), mpf(sigma), mpf(t), tau)


def _C_from(data: _PolyData, sigma: mpf, t: mpf, tau) -> mpc:
    b = _B_from(data, sigma, t, tau)
    bb = _B_bar_from(data, sigma, t, tau)
    a = (1 - sigma) / t
    return (
        1 / ((2 * mp.pi) ** 2 * (tau ** 2 + a ** 2))
        + b * bb
        + 1j / (2 * mp.pi) * b / (tau - 1j * a)
        - 1j / (2 * mp.pi) * bb / (tau + 1j * a)
    )


def C_function(ctx: PrecisionContext, sigma, t, tau) -> mpc:
    with ctx.workprec():
        return +_C_from(_poly_data(ctx, mpf(t)), mpf(sigma), mpf(t), tau)


def C_leading(sigma, t, tau) -> mpf:
    a = (1 - mpf(sigma)) / mpf(t)
    return 1 / ((2 * mp.pi) ** 2 * (mpf(tau) ** 2 + a ** 2))


def exact_A(ctx: PrecisionContext, sigma, t, tau) -> mpc:
    """True A(t, tau): exact gamma product divided by its leading form."""
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        tau = mpf(tau)
        exact = gamma(ctx, mpc(0, t - t * tau)) * gamma(ctx, mpc(sigma, t * tau)) / gamma(ctx, mpc(sigma, t))
        lead = (
            mpmath.sqrt(2 * mp.pi / t)
            * mpmath.expj(-mp.pi / 4)
            * amplitude_G(sigma, tau)
            * mpmath.expj(t * phase_F(tau, 1))
        )
        return +(exact / lead)


def _D_factory(ctx: PrecisionContext, j: int, sigma: mpf, t: mpf) -> Callable:
    a = (1 - sigma) / t
    if j == 1:
        return lambda z: mpf(1)
    if j == 2:
        return lambda z: 1 / (z - 1j * a)
    if j == 3:
        return lambda z: 1 / (z + 1j * a)
    data = _poly_data(ctx, t)
    if j == 4:
        return lambda z: _B_bar_from(data, sigma, t, z)
    if j == 5:
        return lambda z: _B_from(data, sigma, t, z)
    if j == 6:
        return lambda z: _C_from(data, sigma, t, z)
    raise DomainError("j must be between 1 and 6")


# ---------------------------------------------------------------------------
# Stationary-point contribution
# ---------------------------------------------------------------------------

def lambda_window(t, params: SplitParams):
    t = mpf(t)
    return 1 / (t ** (1 - mpf(params.delta3)) - 1), t ** (1 - mpf(params.delta2)) - 1


def P_factor(ctx: PrecisionContext, j: int, sigma, t, lam) -> mpc:
    sigma = mpf(sigma)
    t = mpf(t)
    lam = mpf(lam)
    if j == 1:
        return mpc(1)
    if j == 2:
        return (1 + lam) / (1 - 1j * (1 - sigma) / t * (1 + lam))
    if j == 3:
        return (1 + lam) / (1 + 1j * (1 - sigma) / t * (1 + lam))
    tau1 = 1 / (1 + lam)
    data = _poly_data(ctx, t)
    if j == 4:
        return _B_bar_from(data, sigma, t, tau1)
    if j == 5:
        return _B_from(data, sigma, t, tau1)
    raise DomainError("j must be between 1 and 5")


def stationary_prefactor(sigma, t, lam) -> mpc:
    """sqrt(2 pi/t) e^{i pi/4} lam^{it} (1+lam)^{-sigma-it}."""
    sigma = mpf(sigma)
    t = mpf(t)
    lam = mpf(lam)
    return (
        mpmath.sqrt(2 * mp.pi / t)
        * mpmath.expj(mp.pi / 4)
        * mpmath.expj(t * mpmath.log(lam))
        * mpmath.power(1 + lam, mpc(-sigma, -t))
    )


def stationary_eval_Jj(ctx: PrecisionContext, j: int, sigma, t, params: SplitParams, lam) -> mpc:
    """Stationary-point contribution to J_j at lam (boundary integrals excluded).

    At an endpoint of the admissible lam-window the stationary point sits on
    the end of the integration range and only half the contribution counts.
    """
    if j not in (1, 2, 3, 4, 5):
        raise DomainError("j must be between 1 and 5")
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        lam = mpf(lam)
        if sigma < mpf(1) / 2:
            raise DomainError("sigma must be at least 1/2")
        lo, hi = lambda_window(t, params)
        tol = ctx.rel_tol
        value = stationary_prefactor(sigma, t, lam) * P_factor(ctx, j, sigma, t, lam)
        if abs(lam - lo) <= tol * lo or abs(lam - hi) <= tol * hi:
            warnings.warn("stationary point on an endpoint: half contribution", BoundaryStationaryWarning, stacklevel=2)
            return +(value / 2)
        if not (lo < lam < hi):
            raise DomainError("lambda lies outside the admissible window")
        return +value


# ---------------------------------------------------------------------------
# Direct quadrature of J1..J6 on the real interval
# ---------------------------------------------------------------------------

def direct_Jj(
    ctx: PrecisionContext,
    j: int,
    sigma,
    t,
    params: SplitParams,
    lam=1,
    quad: Optional[QuadratureSpec] = None,
    verification: bool = False,
) -> mpc:
    """Gauss-Legendre panel quadrature of J_j; A = 1 unless ``verification``."""
    quad = quad or QuadratureSpec(panels_per_wavelength=4, gl_nodes=16)
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        lam = mpf(1) if j == 6 else mpf(lam)
        log_lam = mpmath.log(lam)
        a = t ** (mpf(params.delta2) - 1)
        b = 1 - t ** (mpf(params.delta3) - 1)
        D = _D_factory(ctx, j, sigma, t)
        sqrt_t = mpmath.sqrt(t)

        def width(x):
            freq = t * abs(mpmath.log(x / (1 - x)) + log_lam) + sqrt_t
            return min(2 * mp.pi / (quad.panels_per_wavelength * freq), min(x, 1 - x) / 4)

        def integrand(x):
            val = amplitude_G(sigma, x) * mpmath.expj(t * phase_F(x, lam)) * D(x)
            if verification:
                val *= exact_A(ctx, sigma, t, x)
            return val

        edges = adaptive_edges(a, b, width)
        total = mpc(0)
        for lo, hi in zip(edges[:-1], edges[1:]):
            xs, ws = panel_nodes(lo, hi, quad.gl_nodes)
            total += mpmath.fsum(w * integrand(x) for x, w in zip(xs, ws))
        return +total


def eval_J6(ctx: PrecisionContext, sigma, t, params: SplitParams, quad: Optional[QuadratureSpec] = None, verification: bool = False) -> mpc:
    """J6 by direct quadrature (amplitude C, phase F(tau, 1))."""
    return direct_Jj(ctx, 6, sigma, t, params, 1, quad, verification)


# ---------------------------------------------------------------------------
# Fresnel tail and boundary integrals
# ---------------------------------------------------------------------------

def fresnel_tail(ctx: PrecisionContext, omega) -> mpc:
    """int_omega^{infinity e^{i pi/4}} e^{i xi^2} d xi.

    On xi = omega + u e^{i pi/4} the integrand is
    e^{i omega^2} e^{-u^2 - sqrt(2) omega (1 - i) u}, a damped Gaussian.  After
    u = v/(a+1), a = sqrt(2) omega, the v-integrand decays at unit rate or
    faster and is integrated on unit Gauss-Legendre panels up to V; the
    neglected tail is bounded by e^{-phi(V)}/phi'(V) with phi the (convex)
    exponent of the modulus.
    """
    with ctx.workprec():
        omega = mpf(omega)
        if omega < 0:
            raise DomainError("omega must be nonnegative")
        a = mpmath.sqrt(2) * omega
        k = a + 1
        tol = ctx.unit_roundoff * mpmath.ldexp(1, -8)

        def phi(v):
            return (v / k) ** 2 + a * v / k

        def dphi(v):
            return 2 * v / k ** 2 + a / k

        v_max = mpf(1)
        while mpmath.exp(-phi(v_max)) / dphi(v_max) > tol:
            v_max += 1
        c = a * (1 - 1j) / k

        def f(v):
            return mpmath.exp(-(v / k) ** 2 - c * v)

        n = 24
        total = mpc(0)
        for i in range(int(v_max)):
            xs, ws = panel_nodes(mpf(i), mpf(i + 1), n)
            total += mpmath.fsum(w * f(x) for x, w in zip(xs, ws))
        return +(mpmath.expj(omega ** 2) * mpmath.expj(mp.pi / 4) * total / k)


def fresnel_far_field(omega) -> mpc:
    """Leading large-omega form of e^{-i omega^2} times the Fresnel tail: -1/(2 i omega)."""
    return -1 / (2j * mpf(omega))


def default_ray_angle(lam) -> mpf:
    lam = mpf(lam)
    if lam == 1:
        return mp.pi / 4
    return min(mp.pi / 4, mpf("0.9") * mpmath.atan(mp.pi / abs(mpmath.log(lam))))


def _check_ray(lam: mpf, phi: mpf) -> None:
    if not phi > 0:
        raise ConvergenceError("ray angle must be positive")
    if lam != 1 and not phi < mpmath.atan(mp.pi / abs(mpmath.log(lam))):
        raise ConvergenceError("ray angle violates 0 < phi < arctan(pi/|ln lambda|): Im F does not grow")
    if not mpmath.log(lam) * mpmath.sin(phi) + mp.pi * mpmath.cos(phi) > 0:
        raise ConvergenceError("Im F does not grow along the ray")


def _boundary_D(ctx: PrecisionContext, j: int, sigma: mpf, t: mpf) -> Callable:
    if j not in (1, 2, 3, 4, 5):
        raise DomainError("j must be between 1 and 5")
    return _D_factory(ctx, j, sigma, t)


def boundary_JB_uniform(ctx: PrecisionContext, j: int, sigma, t, delta, lam) -> mpc:
    """Leading uniform asymptotics of J_B through the Fresnel tail."""
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        lam = mpf(lam)
        bs = BoundaryScale.from_params(t, delta, lam)
        lc = bs.lambda_c
        f0 = mpmath.log(lc * (1 + bs.Lambda) / (1 + lc)) - lc * mpmath.log((1 + lc) / lc)
        pref = mpmath.sqrt(lc / (1 + lc)) * (1 / (1 + lc)) ** (sigma - mpf(1) / 2) * mpmath.expj(t * f0 / (1 + lc))
        jt = mpmath.sqrt(2 / (lc * t)) * mpmath.expj(-bs.omega ** 2) * fresnel_tail(ctx, bs.omega)
        endpoint = 1 - t ** (mpf(delta) - 1)
        return +(pref * jt * _boundary_D(ctx, j, sigma, t)(endpoint))


def boundary_JB_far(ctx: PrecisionContext, j: int, sigma, t, delta, lam) -> mpc:
    """Closed far-field form of J_B, valid when omega is large."""
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        lam = mpf(lam)
        delta = mpf(delta)
        e = t ** (delta - 1)
        td = t ** delta
        endpoint = 1 - e
        weight = mpmath.log(lam * (1 / e - 1))
        if not weight > 0:
            raise DomainError("the far-field form needs lambda > lambda_c")
        value = (
            1j
            * mpmath.power(lam, 1j * (t - td))
            * t ** (-(delta + 1) / 2)
            * mpmath.power(t, 1j * (delta - 1) * td)
            * mpmath.power(endpoint, mpc(sigma - mpf(1) / 2, t - td))
            / weight
        )
        return +(value * _boundary_D(ctx, j, sigma, t)(endpoint))


def boundary_JB_direct(ctx: PrecisionContext, j: int, sigma, t, delta, lam, phi=None) -> mpc:
    """J_B by Gauss-Legendre quadrature along the ray 1 - t^(delta-1) + rho e^{i phi}."""
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        lam = mpf(lam)
        phi = default_ray_angle(lam) if phi is None else mpf(phi)
        _check_ray(lam, phi)
        log_lam = mpmath.log(lam)
        start = 1 - t ** (mpf(delta) - 1)
        direction = mpmath.expj(phi)
        D = _boundary_D(ctx, j, sigma, t)
        im0 = _phase_F_complex(mpc(start), log_lam).imag
        cutoff = (ctx.precision_bits + 20) * mpmath.log(2)

        def z_of(rho):
            return start + rho * direction

        def integrand(rho):
            z = z_of(rho)
            return (1 - z) ** (-mpf(1) / 2) * z ** (sigma - mpf(1) / 2) * mpmath.exp(1j * t * _phase_F_complex(z, log_lam)) * D(z)

        def width(rho):
            z = z_of(rho)
            fp = abs(mpmath.log(z * lam / (1 - z)))
            fpp = abs(1 / (z * (1 - z)))
            osc = 2 * mp.pi / (4 * (t * fp + mpmath.sqrt(t * fpp) + 1))
            return min(osc, abs(1 - z) / 4, abs(z) / 4)

        growth = log_lam * mpmath.sin(phi) + mp.pi * mpmath.cos(phi)
        total = mpc(0)
        rho = mpf(0)
        max_rho = 1000 * cutoff / (t * growth) + 10
        while True:
            h = width(rho)
            xs, ws = panel_nodes(rho, rho + h, 16)
            total += mpmath.fsum(w * integrand(x) for x, w in zip(xs, ws))
            rho += h
            decay = t * (_phase_F_complex(z_of(rho), log_lam).imag - im0)
            if decay > cutoff:
                break
            if rho > max_rho:
                raise ConvergenceError("Im F fails to grow along the ray")
        return +(total * direction)


def boundary_JB(ctx: PrecisionContext, j: int, sigma, t, delta, lam, phi=None, method: str = "uniform") -> mpc:
    """Boundary integral J_B: uniform asymptotics by default, direct ray quadrature on request."""
    if method == "uniform":
        if phi is not None:
            _check_ray(mpf(lam), mpf(phi))
        return boundary_JB_uniform(ctx, j, sigma, t, delta, lam)
    if method == "direct":
        return boundary_JB_direct(ctx, j, sigma, t, delta, lam, phi)
    if method == "far":
        return boundary_JB_far(ctx, j, sigma, t, delta, lam)
    raise ValueError(f"unknown method {method!r}")


def fit_omega(ctx: PrecisionContext, j: int, sigma, t, delta, lam, phi=None) -> mpc:
    """Observed constant Omega = J_B / (sqrt(2/t) lam^{i(t - t^delta)} D at the endpoint)."""
    with ctx.workprec():
        t = mpf(t)
        lam = mpf(lam)
        jb = boundary_JB_direct(ctx, j, sigma, t, delta, lam, phi)
        endpoint = 1 - t ** (mpf(delta) - 1)
        d = _boundary_D(ctx, j, mpf(sigma), t)(endpoint)
        return +(jb / (mpmath.sqrt(2 / t) * mpmath.power(lam, 1j * (t - t ** mpf(delta))) * d))
