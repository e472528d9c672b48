import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from zlab.quadrature import QuadratureSpec, adaptive_edges, gauss_legendre, integrate_panels, panel_nodes, uniform_edges


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(panels_per_wavelength=0)
    with pytest.raises(ValueError):
        QuadratureSpec(gl_nodes=1)
    with pytest.raises(ValueError):
        QuadratureSpec(pv_excision=-1)
    with pytest.raises(ValueError):
        QuadratureSpec(window_extension=-1)


@pytest.mark.parametrize("n", [2, 5, 8, 13])
def test_weights_sum_to_two_and_nodes_symmetric(n):
    with mp.workprec(200):
        xs, ws = gauss_legendre(n, 200)
        assert len(xs) == n
        assert abs(mpmath.fsum(ws) - 2) < mpf(10) ** -55
        for a, b in zip(xs, reversed(xs)):
            assert abs(a + b) < mpf(10) ** -55


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.data())
def test_polynomial_exactness(n, data):
    degree = data.draw(st.integers(0, 2 * n - 1))
    with mp.workprec(160):
        xs, ws = panel_nodes(mpf(-1) / 3, mpf(2), n)
        approx = mpmath.fsum(w * x ** degree for x, w in zip(xs, ws))
        exact = (mpf(2) ** (degree + 1) - (mpf(-1) / 3) ** (degree + 1)) / (degree + 1)
        assert abs(approx - exact) <= mpf(10) ** -40 * max(1, abs(exact))


def test_integrate_panels_oscillatory():
    with mp.workprec(128):
        edges = uniform_edges(0, 10, mpf(1) / 8)
        v = integrate_panels(lambda x: mpmath.cos(20 * x), edges, 16)
        assert abs(v - mpmath.sin(200) / 20) < mpf(10) ** -25


def test_uniform_edges():
    e = uniform_edges(0, 1, mpf("0.3"))
    assert len(e) == 5 and e[0] == 0 and e[-1] == 1
    assert max(b - a for a, b in zip(e[:-1], e[1:])) <= mpf("0.3")


def test_adaptive_edges_follow_width():
    e = adaptive_edges(0, 1, lambda x: mpf("0.01") + x / 10)
    assert e[0] == 0 and e[-1] == 1
    for a, b in zip(e[:-1], e[1:]):
        assert b - a <= mpf("0.01") + a / 10 + mpf(10) ** -14
