"""Quadrature building blocks: Gauss-Legendre panels and panel layouts."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import mpmath
from mpmath import mp, mpf


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts, panel density, principal-value excision and contour data.

    panels_per_wavelength: panels per local oscillation wavelength 2*pi/t
        (8 means panels no wider than (2*pi/t)/8).
    gl_nodes: Gauss-Legendre nodes per panel.
    pv_excision: symmetric excision radius around the principal-value point;
        0 integrates straight through (panel edge on the singular point).
    ray_angle: contour ray angle for boundary integrals; None picks the default.
    window_extension: extra tau-range added on both sides of the splitting
        window, in units of 1/t (0 keeps the window exact).
    """

    panels_per_wavelength: int = 8
    gl_nodes: int = 8
    pv_excision: float = 0.0
    ray_angle: Optional[float] = None
    window_extension: float = 0.0

    def __post_init__(self) -> None:
        if self.panels_per_wavelength < 1 or self.gl_nodes < 2:
            raise ValueError("need at least one panel per wavelength and two nodes per panel")
        if self.pv_excision < 0 or self.window_extension < 0:
            raise ValueError("excision radius and window extension must be nonnegative")


@functools.lru_cache(maxsize=None)
def gauss_legendre(n: int, bits: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    with mp.workprec(bits + 20):
        nodes = []
        weights = []
        for i in range(1, (n + 1) // 2 + 1):
            x = mpmath.cos(mp.pi * (i - mpf(0.25)) / (n + mpf(0.5)))
            for _ in range(100):
                p0, p1 = mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpmath.ldexp(1, -bits - 10):
                    break
            p0, p1 = mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            if n % 2 == 1 and 2 * i == n + 1:
                x = mpf(0)
            nodes.append(x)
            weights.append(w)
        full_nodes = []
        full_weights = []
        for x, w in zip(nodes, weights):
            full_nodes.append(-x)
            full_weights.append(w)
            if x != 0:
                full_nodes.append(x)
                full_weights.append(w)
        order = sorted(range(len(full_nodes)), key=lambda i: full_nodes[i])
        return tuple(full_nodes[i] for i in order), tuple(full_weights[i] for i in order)


def panel_nodes(a, b, n: int):
    """Gauss-Legendre nodes and weights mapped to [a, b] at the current precision."""
    xs, ws = gauss_legendre(n, mp.prec)
    half = (b - a) / 2
    mid = (a + b) / 2
    return [mid + half * x for x in xs], [half * w for w in ws]


def integrate_panels(f: Callable, edges: Sequence, n: int):
    """Sum of n-point Gauss-Legendre rules over consecutive panels."""
    total = 0
    for a, b in zip(edges[:-1], edges[1:]):
        if a == b:
            continue
        xs, ws = panel_nodes(a, b, n)
        total += mpmath.fsum(w * f(x) for x, w in zip(xs, ws))
    return total


def uniform_edges(a, b, max_width) -> list:
    """Edges of equal panels covering [a, b], each no wider than max_width."""
    a = mpf(a)
    b = mpf(b)
    count = max(1, int(mpmath.ceil((b - a) / max_width)))
    return [a + (b - a) * k / count for k in range(count + 1)]


def adaptive_edges(a, b, width_at: Callable, min_width=None) -> list:
    """Panel edges on [a, b] with local width given by ``width_at(x)``."""
    a = mpf(a)
    b = mpf(b)
    if min_width is None:
        min_width = (b - a) * mpf(10) ** (-12)
    edges = [a]
    x = a
    while x < b:
        h = max(width_at(x), min_width)
        x = min(x + h, b)
        edges.append(x)
    return edges
