"""Command-line driver: every subcommand writes ExperimentRecord rows as CSV."""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from contextlib import contextmanager
from typing import Iterator, List, Optional

import mpmath
from mpmath import mp, mpc, mpf

from .config import ConfigError, RunConfig, build_config, geometric_grid, parse_t_grid
from .errors import ConvergenceError, DomainError, EmptySetError
from .gamma_asymptotics import HankelSpec, gamma_ratio_shift, gamma_ratio_tau, hankel_integral, stirling_plus
from .integral_engine import residual_report
from .numerics import gamma, zeta_oracle
from .records import ExperimentRecord, write_csv
from .stationary_phase import direct_Jj, lambda_window, stationary_eval_Jj
from .sums import (
    IdentityReport,
    IndexSet,
    _full_rows,
    _pairing,
    exact_identity_report,
    floor_T,
    decomposition_report,
    partition_check,
    row_sum,
    s1_rows,
    s2_rows,
)
from .variant import compare_with_zeta_sq, residual_841
from .zeta_expansion import zeta_main_expansion

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONVERGENCE = 2
EXIT_EMPTY_SET = 3
EXIT_USAGE = 64

IDENTITY_SLACK = 1000
EXPANSION_C = 10
STATIONARY_C = 20


class Run:
    """Collects records, timing each one only when asked to."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.ctx = cfg.context()
        self.records: List[ExperimentRecord] = []
        self.failures: List[str] = []
        self._start = 0.0

    @contextmanager
    def timed(self) -> Iterator[None]:
        self._start = time.perf_counter()
        yield

    def wall_ms(self) -> int:
        if not self.cfg.record_timing:
            return 0
        return int(round((time.perf_counter() - self._start) * 1000))

    def add(self, experiment, t, quantity, value, reference, residual, scale, ok=True, sigma=None, deltas=None) -> None:
        with self.ctx.workprec():
            value = mpc(value)
            rec = ExperimentRecord(
                experiment,
                mpf(self.cfg.sigma if sigma is None else sigma),
                mpf(t),
                deltas or self.cfg.deltas,
                quantity,
                value.real,
                value.imag,
                mpf(reference),
                abs(mpf(residual)),
                abs(mpf(scale)),
                self.wall_ms(),
            )
        self.records.append(rec)
        if not ok:
            self.failures.append(f"{experiment} {quantity} at t={mpmath.nstr(mpf(t), 10)}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _off_by_one(rows):
    # widen the first S1 row by one column on the right
    if not rows:
        return [(1, 1, 1)]
    m1, first, last = rows[0]
    return [(m1, first, last + 1)] + list(rows[1:])


def cmd_verify_identities(run: Run) -> int:
    cfg = run.cfg
    params = cfg.params()
    mutate = _off_by_one if cfg.inject_off_by_one else None
    for t in cfg.t_values([100.0]):
        if t > cfg.identity_t_max:
            raise ConfigError(f"t={t} exceeds identity_t_max={cfg.identity_t_max}")
        if floor_T(t) < 1:
            raise ConfigError("t/2pi must be at least 1")
        with run.timed():
            r = exact_identity_report(run.ctx, cfg.sigma, t, cfg.threads)
            tol = IDENTITY_SLACK * run.ctx.unit_roundoff * r.abs_terms
            run.add("verify_identities", t, "exact_identity", r.lhs, r.rhs.real, r.residual, tol, r.residual <= tol)
        for orientation in ("M", "M_swapped"):
            with run.timed():
                r = decomposition_report(run.ctx, cfg.sigma, t, params, orientation, cfg.threads)
                if mutate is not None:
                    r = _mutated_decomposition(run, t, params, orientation)
                tol = IDENTITY_SLACK * run.ctx.unit_roundoff * r.abs_terms
                run.add("verify_identities", t, f"identity_full_box_{orientation}", r.lhs, abs(r.rhs), r.residual, tol, r.residual <= tol)
        for orientation in ("M_swapped", "M"):
            with run.timed():
                ok = partition_check(t, params, orientation, mutate=mutate)
                run.add("verify_identities", t, f"partition_{orientation}", 1 if ok else 0, 1, 0 if ok else 1, 0, ok)
    return EXIT_OK if not run.failures else EXIT_CHECK_FAILED


def _mutated_decomposition(run: Run, t, params, orientation):
    """The full-box decomposition with the first S1 row widened by one column."""
    kind, d1, d2 = _pairing(orientation, params)
    ctx, sigma = run.ctx, run.cfg.sigma
    full = row_sum(ctx, "IS", sigma, t, _full_rows(floor_T(t)))
    parts = [
        row_sum(ctx, "IS", sigma, t, IndexSet(kind, t, params, allow_equality=True, m2_inclusive=True).rows()),
        row_sum(ctx, "IS", sigma, t, _off_by_one(s1_rows(t, d1))),
        row_sum(ctx, "IS", sigma, t, s2_rows(t, d2)),
    ]
    with ctx.workprec():
        rhs = parts[0].value + parts[1].value + parts[2].value
        abs_terms = full.abs_total + sum(p.abs_total for p in parts)
        bound = full.kahan_error_bound + sum(p.kahan_error_bound for p in parts)
    return IdentityReport(full.value, rhs, abs_terms, bound)


def cmd_residual(run: Run) -> int:
    cfg = run.cfg
    params = cfg.params()
    levels = cfg.quad_levels or [cfg.panels_per_wavelength]
    status = EXIT_OK
    for t in cfg.t_values([50.0, 100.0, 200.0]):
        for level in levels:
            with run.timed():
                try:
                    rep = residual_report(run.ctx, cfg.sigma, t, params, cfg.quad(level), cfg.mode)
                except ConvergenceError as exc:
                    print(f"convergence failure at t={t}: {exc}", file=sys.stderr)
                    run.add("residual", t, f"full_equation_ppw{level}", mpf("nan"), mpf("nan"), mpf("nan"), 0)
                    status = EXIT_CONVERGENCE
                    continue
                run.add("residual", t, f"full_equation_ppw{level}", rep.residual, rep.g_value, rep.residual, rep.tail_scale)
        with run.timed():
            res, scale = residual_841(run.ctx, cfg.sigma, t, params, cfg.quad(), cfg.threads)
            lead = -math.log(t) if cfg.sigma == 0.5 else -float(zeta_oracle(run.ctx, 2 * cfg.sigma).real)
            run.add("residual", t, "final_relation", res, lead, res, scale)
    return status


def cmd_variant(run: Run) -> int:
    cfg = run.cfg
    sweep = cfg.delta3_sweep or [None]
    grid = cfg.t_values(geometric_grid(100.0, 1000.0, 8))
    outputs = []
    for d3 in sweep:
        params = cfg.params(d3)
        deltas = (params.delta1, params.delta2, params.delta3, params.delta4)
        records, summary = compare_with_zeta_sq(run.ctx, cfg.sigma, grid, params, cfg.threads)
        outputs.append((d3, records, summary))
        print(
            f"delta3={params.delta3}: median ratio {mpmath.nstr(summary.median_ratio, 6)}, IQR {mpmath.nstr(summary.iqr, 6)}",
            file=sys.stderr,
        )
    if cfg.delta3_sweep:
        for d3, records, _ in outputs:
            path = _suffixed(cfg.output_path or "variant.csv", f"d3-{d3}")
            _write(path, records)
            _write_plot(path)
        return EXIT_OK
    run.records.extend(outputs[0][1])
    if cfg.output_path:
        _write_plot(cfg.output_path)
    return EXIT_OK


def cmd_expansion_check(run: Run) -> int:
    cfg = run.cfg
    for xi in cfg.t_values([100.0, 200.0, 400.0, 800.0]):
        with run.timed():
            eta = 2 * xi
            res = zeta_main_expansion(run.ctx, cfg.sigma, xi, eta)
            with run.ctx.workprec():
                ref = zeta_oracle(run.ctx, mpc(cfg.sigma, xi))
                err = abs(res.value - ref)
            run.add("expansion_check", xi, "zeta_main_expansion", res.value, abs(ref), err, res.stated_error_scale,
                    err <= EXPANSION_C * res.stated_error_scale)
    return EXIT_OK if not run.failures else EXIT_CHECK_FAILED


def cmd_stationary_check(run: Run) -> int:
    cfg = run.cfg
    params = cfg.params()
    for t in cfg.t_values([200.0, 800.0, 3200.0]):
        lo, hi = lambda_window(t, params)
        for lam in (0.5, 1.0, 2.0):
            if not (lo < lam < hi):
                continue
            with run.timed():
                approx = stationary_eval_Jj(run.ctx, 1, cfg.sigma, t, params, lam)
                direct = direct_Jj(run.ctx, 1, cfg.sigma, t, params, lam)
                with run.ctx.workprec():
                    gap = abs(approx - direct) / abs(direct)
                    scale = STATIONARY_C / mpmath.sqrt(t)
                run.add("stationary_check", t, f"J1_lambda_{lam}", approx, abs(direct), gap, scale, gap <= scale)
    return EXIT_OK if not run.failures else EXIT_CHECK_FAILED


def cmd_gamma_check(run: Run) -> int:
    cfg = run.cfg
    ctx = run.ctx
    sigma = cfg.sigma
    for xi in cfg.t_values([50.0, 100.0, 500.0]):
        with run.timed():
            approx = stirling_plus(ctx, sigma, xi)
            with ctx.workprec():
                exact = gamma(ctx, mpc(sigma, xi))
                rel = abs(approx / exact - 1)
            run.add("gamma_check", xi, "stirling_plus", approx, abs(exact), rel, 2 / mpf(xi), rel <= 2 / mpf(xi))
    t = 500
    for tau in (0.1, 0.3, 0.5, 0.7, 0.9):
        with run.timed():
            approx = gamma_ratio_tau(ctx, sigma, t, tau)
            with ctx.workprec():
                tau_m = mpf(repr(tau))
                exact = gamma(ctx, mpc(0, t - t * tau_m)) / gamma(ctx, mpc(sigma, t))
                rel = abs(approx / exact - 1)
                scale = 5 * (1 / (t - t * tau_m) + mpf(1) / t)
            run.add("gamma_check", t, f"ratio_tau_{tau}", approx, abs(exact), rel, scale, rel <= scale)
    for x in (-100, -10, 10, 100):
        with run.timed():
            approx = gamma_ratio_shift(ctx, sigma, t, x)
            with ctx.workprec():
                exact = gamma(ctx, mpc(sigma, t - x)) / gamma(ctx, mpc(sigma, t))
                rel = abs(approx / exact - 1)
                scale = 5 * (1 / mpf(t - abs(x)) + mpf(1) / t)
            run.add("gamma_check", t, f"ratio_shift_{x}", approx, abs(exact), rel, scale, rel <= scale)
    with run.timed():
        spec = HankelSpec(truncation_radius=120)
        val = hankel_integral(ctx, spec, lambda z, lz: mpmath.exp(z) / z)
        with ctx.workprec():
            ref = 2 * mp.pi
            rel = abs(val - mpc(0, ref)) / ref
        run.add("gamma_check", 0, "hankel_exp_over_z", val, ref, rel, mpf("1e-10"), rel <= mpf("1e-10"))
    return EXIT_OK if not run.failures else EXIT_CHECK_FAILED


COMMANDS = {
    "verify-identities": cmd_verify_identities,
    "residual": cmd_residual,
    "variant": cmd_variant,
    "expansion-check": cmd_expansion_check,
    "stationary-check": cmd_stationary_check,
    "gamma-check": cmd_gamma_check,
}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _suffixed(path: str, tag: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}_{tag}{ext or '.csv'}"


def _write(path: Optional[str], records) -> None:
    if path is None:
        write_csv(sys.stdout, records)
        return
    with open(path, "w", newline="") as fh:
        write_csv(fh, records)


def plot_script(csv_path: str) -> str:
    name = os.path.basename(csv_path)
    return (
        "# |variant sum| ln t against |zeta(sigma+it)|^2\n"
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set logscale xy\n"
        "set xlabel 't'\n"
        f"set output '{os.path.splitext(name)[0]}.png'\n"
        "set terminal pngcairo size 900,600\n"
        f"plot '{name}' using 3:9 with linespoints title '|variant| ln t', \\\n"
        f"     '{name}' using 3:11 with linespoints title '|zeta|^2', \\\n"
        f"     '{name}' using 3:13 with points title 'ratio'\n"
    )


def _write_plot(csv_path: str) -> None:
    with open(os.path.splitext(csv_path)[0] + ".gp", "w") as fh:
        fh.write(plot_script(csv_path))


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file (default: $ZLAB_CONFIG)")
    common.add_argument("--sigma", type=float)
    common.add_argument("--t", type=float)
    common.add_argument("--t-grid", type=parse_t_grid, metavar="A:B:N", help="N geometric points from A to B")
    for k in (1, 2, 3, 4):
        common.add_argument(f"--delta{k}", type=float)
    common.add_argument("--c-policy", help="quarter, third or power:a")
    common.add_argument("--precision-bits", type=int)
    common.add_argument("--mode", choices=("reference", "fast"))
    common.add_argument("--threads", type=int)
    common.add_argument("--out", dest="output_path")
    common.add_argument("--ppw", dest="panels_per_wavelength", type=int, help="quadrature panels per wavelength")
    common.add_argument("--gl-nodes", type=int)
    common.add_argument("--window-extension", type=float, help="widen the tau window by this many units of 1/t")
    common.add_argument("--quad-levels", type=_int_list, help="comma-separated panels-per-wavelength levels")
    common.add_argument("--delta3-sweep", type=_float_list, help="comma-separated delta3 values, one CSV each")
    common.add_argument("--record-timing", action="store_true", default=None, help="fill wall_ms (breaks byte-identity)")
    common.add_argument("--inject-off-by-one", action="store_true", default=None, help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="zlab", description="Numerical laboratory for an integral equation for |zeta|^2.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _int_list(text: str) -> List[int]:
    return [int(v) for v in text.split(",") if v]


def _float_list(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v]


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = build_config(args.config, overrides)
    except (ConfigError, OSError) as exc:
        print(f"zlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    run = Run(cfg)
    try:
        with mp.workprec(cfg.precision_bits):
            code = COMMANDS[args.command](run)
    except ConfigError as exc:
        print(f"zlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EmptySetError as exc:
        print(f"zlab: {exc}", file=sys.stderr)
        return EXIT_EMPTY_SET
    except ConvergenceError as exc:
        print(f"zlab: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except DomainError as exc:
        print(f"zlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if run.records or not (args.command == "variant" and cfg.delta3_sweep):
        _write(cfg.output_path, run.records)
    for line in run.failures[:1]:
        print(f"zlab: first failing row: {line}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
