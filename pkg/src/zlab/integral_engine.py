"""The singular integral equation for |zeta|^2: kernel, inhomogeneous term, I1..I4.

The equation reads

    (t/pi) PV int_R Re{Gamma(it-i tau t) Gamma(sigma+i tau t)/Gamma(sigma+it)}
        |zeta(sigma+i tau t)|^2 d tau + G(sigma, t) = 0,

and the tau-line is cut into L1 = [-t^(d1-1), 0], L2 = [0, t^(d2-1)],
L3 = [t^(d2-1), 1-t^(d3-1)], L4 = [1-t^(d3-1), 1+t^(d4-1)].  Outside
L1..L4 the kernel is exponentially small.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import mpmath
from mpmath import mp, mpc, mpf

from .errors import DomainError, PoleError
from .gamma_asymptotics import gamma_ratio_shift, gamma_ratio_tau, stirling_plus
from .numerics import PrecisionContext, digamma, gamma, zeta_oracle
from .quadrature import QuadratureSpec, adaptive_edges, panel_nodes
from .zeta_expansion import zeta_main_expansion, zeta_sq_expansion

REFERENCE_T_MAX = 1000

_POLICY_RE = re.compile(r"^power:(?P<a>[0-9.eE+-]+)$")
_NAMED_POLICIES = {"quarter": mpf(1) / 4, "third": mpf(1) / 3}


@dataclass(frozen=True)
class SplitParams:
    """Exponents that split the tau-line, and the c(t) policy for the set N.

    c_of_t is "quarter" (c = t^(-d3/4), the default), "third" (t^(-d3/3)) or
    "power:a" for c = t^(-a d3) with 0 < a < 1/2, which keeps
    t^(-d3/2) << c(t) << 1.
    """

    delta1: float = 0.1
    delta2: float = 0.05
    delta3: float = 0.2
    delta4: float = 0.1
    c_of_t: str = "quarter"
    _c_exponent: mpf = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        errors = validate_deltas(self.delta1, self.delta2, self.delta3, self.delta4)
        if errors:
            raise DomainError("; ".join(errors))
        object.__setattr__(self, "_c_exponent", _parse_policy(self.c_of_t))

    def c(self, t) -> mpf:
        return mpf(t) ** (-self._c_exponent * mpf(self.delta3))

    def intervals(self, t) -> List[Tuple[mpf, mpf]]:
        t = mpf(t)
        return [
            (-t ** (mpf(self.delta1) - 1), mpf(0)),
            (mpf(0), t ** (mpf(self.delta2) - 1)),
            (t ** (mpf(self.delta2) - 1), 1 - t ** (mpf(self.delta3) - 1)),
            (1 - t ** (mpf(self.delta3) - 1), 1 + t ** (mpf(self.delta4) - 1)),
        ]

    @property
    def delta14(self) -> float:
        return min(self.delta1, self.delta4)

    @property
    def delta34(self) -> float:
        return max(self.delta3, self.delta4)


def _parse_policy(name: str) -> mpf:
    if name in _NAMED_POLICIES:
        return _NAMED_POLICIES[name]
    m = _POLICY_RE.match(name)
    if not m:
        raise DomainError(f"unknown c(t) policy {name!r}")
    a = mpf(m.group("a"))
    if not (0 < a < mpf(1) / 2):
        raise DomainError("c(t) = t^(-a delta3) needs 0 < a < 1/2 so that t^(-delta3/2) << c(t) << 1")
    return a


def validate_deltas(d1, d2, d3, d4) -> List[str]:
    """Human-readable violations of the splitting constraints (empty if valid)."""
    out = []
    for name, d in (("delta1", d1), ("delta2", d2), ("delta3", d3), ("delta4", d4)):
        if not (0 < d < 0.5):
            out.append(f"{name}={d} must lie in (0, 1/2)")
    if not d3 > 2 * d2:
        out.append(f"delta3={d3} must exceed 2*delta2={2 * d2} (removes the t^delta2 (ln t)^3 error term)")
    if not d3 > d4:
        out.append(f"delta3={d3} must exceed delta4={d4} (the larger exponent governs the neighbourhood of tau=1)")
    return out


@dataclass(frozen=True)
class KernelPoint:
    sigma: mpf
    t: mpf
    tau: mpf
    kernel_value: mpc


def _kernel_complex_reference(ctx: PrecisionContext, sigma, t, tau, den=None) -> mpc:
    if den is None:
        den = gamma(ctx, mpc(sigma, t))
    return gamma(ctx, mpc(0, t - tau * t)) * gamma(ctx, mpc(sigma, tau * t)) / den


def _kernel_complex_fast(ctx: PrecisionContext, sigma, t, tau, params: SplitParams, den=None) -> mpc:
    x = t - tau * t
    if t ** mpf(params.delta2) <= tau * t <= t - t ** mpf(params.delta3):
        return gamma_ratio_tau(ctx, sigma, t, tau) * stirling_plus(ctx, sigma, tau * t)
    if abs(x) <= t ** mpf(params.delta3) and t - abs(x) >= 10:
        return gamma(ctx, mpc(0, x)) * gamma_ratio_shift(ctx, sigma, t, x)
    # near tau = 0 neither expansion applies; use the exact gammas
    return _kernel_complex_reference(ctx, sigma, t, tau, den)


def kernel_point(ctx: PrecisionContext, sigma, t, tau, mode: str = "reference", params: Optional[SplitParams] = None) -> KernelPoint:
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        tau = mpf(tau)
        if not t > 0:
            raise DomainError("t must be positive")
        if tau == 1:
            raise PoleError("the kernel has a pole at tau = 1")
        if mode == "reference":
            k = _kernel_complex_reference(ctx, sigma, t, tau)
        elif mode == "fast":
            k = _kernel_complex_fast(ctx, sigma, t, tau, params or SplitParams())
        else:
            raise ValueError(f"unknown mode {mode!r}")
        return KernelPoint(sigma, t, tau, +k)


def kernel(ctx: PrecisionContext, sigma, t, tau, mode: str = "reference", params: Optional[SplitParams] = None) -> mpf:
    """Re{Gamma(it - i tau t) Gamma(sigma + i tau t) / Gamma(sigma + it)}."""
    return kernel_point(ctx, sigma, t, tau, mode, params).kernel_value.real


def g_term(ctx: PrecisionContext, sigma, t) -> mpf:
    """The inhomogeneous term of the integral equation."""
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        if not (0 < sigma < 1):
            raise DomainError("sigma must lie in (0, 1)")
        if sigma == mpf(1) / 2:
            psi = digamma(ctx, mpc(0.5, t)).real
            return +(psi + 2 * ctx.euler_gamma - mpmath.log(2 * mp.pi) + 2 / (1 + 4 * t ** 2))
        if abs(sigma - mpf(1) / 2) < mpf("1e-3"):
            raise DomainError("|sigma - 1/2| must be at least 1e-3 off the critical line")
        s = mpc(sigma, t)
        sb = mpmath.conj(s)
        z2 = zeta_oracle(ctx, 2 * sigma).real
        z21 = zeta_oracle(ctx, 2 * sigma - 1).real
        g21 = gamma(ctx, 2 * sigma - 1).real
        ratio = gamma(ctx, 1 - sb) / gamma(ctx, s) + gamma(ctx, 1 - s) / gamma(ctx, sb)
        value = z2 + ratio.real * g21 * z21 + 2 * (sigma - 1) * z21 / ((sigma - 1) ** 2 + t ** 2)
        return +value


def _local_frequency(t: mpf, tau: mpf) -> mpf:
    """Upper estimate of the local angular frequency of the tau-integrand."""
    floor = 1 / t
    a = max(abs(tau), floor)
    b = max(abs(1 - tau), floor)
    kern = abs(mpmath.log(a / b))
    zeta_part = max(mpf(0), mpmath.log(abs(tau) * t / (2 * mp.pi))) if tau != 0 else mpf(0)
    return t * (1 + kern + zeta_part)


def _zeta_sq(ctx: PrecisionContext, sigma, t, tau, mode: str, params: SplitParams) -> mpf:
    xi = tau * t
    if mode == "fast":
        if t ** mpf(params.delta2) <= xi <= t - t ** mpf(params.delta3):
            return abs(zeta_main_expansion(ctx, sigma, xi, t).value) ** 2
        x = t - xi
        if abs(x) <= t ** mpf(params.delta3) and t / (2 * mp.pi) >= 1:
            return zeta_sq_expansion(ctx, sigma, t, x).real
    return abs(zeta_oracle(ctx, mpc(sigma, xi))) ** 2


def _integrate_range(ctx, sigma, t, a, b, quad: QuadratureSpec, mode, params, den) -> mpf:
    def width(x):
        return 2 * mp.pi / (quad.panels_per_wavelength * _local_frequency(t, x))

    edges = adaptive_edges(a, b, width)
    total = mpf(0)
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs, ws = panel_nodes(lo, hi, quad.gl_nodes)
        for x, w in zip(xs, ws):
            if mode == "reference":
                k = _kernel_complex_reference(ctx, sigma, t, x, den)
            else:
                k = _kernel_complex_fast(ctx, sigma, t, x, params, den)
            total += w * k.real * _zeta_sq(ctx, sigma, t, x, mode, params)
    return total


def _check_reference_t(t, mode: str) -> None:
    if mode == "reference" and t > REFERENCE_T_MAX:
        raise DomainError(f"reference mode is limited to t <= {REFERENCE_T_MAX}")


def integral_Ij(
    ctx: PrecisionContext,
    j: int,
    sigma,
    t,
    params: SplitParams,
    quad: Optional[QuadratureSpec] = None,
    mode: str = "reference",
) -> mpf:
    """(t/pi) times the integral of kernel |zeta|^2 over L_j (principal value on L4)."""
    if j not in (1, 2, 3, 4):
        raise DomainError("j must be 1, 2, 3 or 4")
    quad = quad or QuadratureSpec()
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        if t < 50:
            raise DomainError("t must be at least 50")
        _check_reference_t(t, mode)
        den = gamma(ctx, mpc(sigma, t))
        a, b = params.intervals(t)[j - 1]
        if j == 4:
            eps = mpf(quad.pv_excision)
            val = _integrate_range(ctx, sigma, t, a, 1 - eps, quad, mode, params, den)
            val += _integrate_range(ctx, sigma, t, 1 + eps, b, quad, mode, params, den)
        else:
            val = _integrate_range(ctx, sigma, t, a, b, quad, mode, params, den)
        return +(t / mp.pi * val)


@dataclass
class ResidualReport:
    sigma: mpf
    t: mpf
    pieces: Dict[str, mpf]
    g_value: mpf
    residual: mpf
    tail_scale: mpf


def residual_report(
    ctx: PrecisionContext,
    sigma,
    t,
    params: SplitParams,
    quad: Optional[QuadratureSpec] = None,
    mode: str = "reference",
) -> ResidualReport:
    """I1 + I2 + I3 + I4 + G, plus optional integrals over a widened window."""
    quad = quad or QuadratureSpec()
    with ctx.workprec():
        sigma = mpf(sigma)
        t = mpf(t)
        pieces = {f"I{j}": integral_Ij(ctx, j, sigma, t, params, quad, mode) for j in (1, 2, 3, 4)}
        if quad.window_extension > 0:
            w = mpf(quad.window_extension) / t
            (l1a, _), _, _, (_, l4b) = params.intervals(t)
            den = gamma(ctx, mpc(sigma, t))
            pieces["left_ext"] = t / mp.pi * _integrate_range(ctx, sigma, t, l1a - w, l1a, quad, mode, params, den)
            pieces["right_ext"] = t / mp.pi * _integrate_range(ctx, sigma, t, l4b, l4b + w, quad, mode, params, den)
        g = g_term(ctx, sigma, t)
        residual = mpmath.fsum(pieces.values()) + g
        tail = mpmath.exp(-mp.pi * t ** mpf(params.delta14))
        return ResidualReport(sigma, t, pieces, g, +residual, tail)


def residual_full_equation(
    ctx: PrecisionContext,
    sigma,
    t,
    params: SplitParams,
    quad: Optional[QuadratureSpec] = None,
    mode: str = "reference",
) -> mpf:
    """R = I1 + I2 + I3 + I4 + G(sigma, t); zero up to tails and quadrature error."""
    return residual_report(ctx, sigma, t, params, quad, mode).residual
