import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import IntegrationWarning, quad
from scipy.special import beta as beta_fn
from scipy.special import roots_jacobi

from fracfem.errors import InvalidArgumentError
from fracfem.quadrature import (
    gauss_jacobi,
    gauss_legendre,
    graded_rule,
    integrate_element,
    integrate_graded,
    panel_grid,
)


@pytest.mark.parametrize("n", [1, 2, 5, 12, 32, 64])
@pytest.mark.parametrize("a,b", [(0, 0), (0.5, -0.5), (-0.75, 0.3), (0, 0.95), (5, 0), (3.5, 7.25)])
def test_against_scipy_roots_jacobi(n, a, b):
    rule = gauss_jacobi(n, a, b)
    x, w = roots_jacobi(n, a, b)
    np.testing.assert_allclose(rule.nodes, x, atol=1e-13)
    # scipy's own weights carry ~1e-11 relative error at n=64 (see the closed-form test below)
    np.testing.assert_allclose(rule.weights, w, rtol=1e-10, atol=1e-300)


@pytest.mark.parametrize("n", [3, 17, 64])
def test_closed_form_rule_for_half_integer_weight(n):
    # weight sqrt((1-x)/(1+x)): nodes cos(2k pi/(2n+1)), weights 4 pi/(2n+1) sin^2(k pi/(2n+1))
    k = np.arange(n, 0, -1)
    rule = gauss_jacobi(n, 0.5, -0.5)
    np.testing.assert_allclose(rule.nodes, np.cos(2 * k * np.pi / (2 * n + 1)), atol=1e-15)
    np.testing.assert_allclose(rule.weights, 4 * np.pi / (2 * n + 1) * np.sin(k * np.pi / (2 * n + 1)) ** 2,
                               rtol=1e-13)


def test_single_node_is_the_weighted_mean():
    # n=1: node (b-a)/(a+b+2), weight = integral of the weight function
    a, b = 0.3, -0.4
    rule = gauss_jacobi(1, a, b)
    assert rule.nodes[0] == pytest.approx((b - a) / (a + b + 2), abs=1e-15)
    assert rule.weights[0] == pytest.approx(2 ** (a + b + 1) * beta_fn(a + 1, b + 1), rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 20), a=st.floats(-0.9, 4), b=st.floats(-0.9, 4))
def test_exact_for_degree_2n_minus_1(n, a, b):
    rule = gauss_jacobi(n, a, b)
    for k in range(2 * n):
        # QUADPACK's algebraic-weight rule treats the endpoint powers exactly; it
        # warns once it hits round-off, which is the accuracy wanted here
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            exact = quad(lambda x: x**k, -1, 1, weight="alg", wvar=(b, a), epsabs=1e-15, epsrel=1e-14)[0]
        got = rule.weights @ rule.nodes**k
        assert got == pytest.approx(exact, rel=1e-12, abs=1e-13 * 2 ** (a + b + 1))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 40), a=st.floats(-0.95, 3), b=st.floats(-0.95, 3))
def test_nodes_interior_sorted_weights_positive(n, a, b):
    rule = gauss_jacobi(n, a, b)
    assert np.all(np.diff(rule.nodes) > 0)
    assert -1 < rule.nodes[0] and rule.nodes[-1] < 1
    assert np.all(rule.weights > 0)


@pytest.mark.parametrize("a,b", [(0, 0), (0.4, -0.6)])
def test_nodes_of_consecutive_rules_interlace(a, b):
    lo, hi = gauss_jacobi(9, a, b).nodes, gauss_jacobi(10, a, b).nodes
    assert np.all(hi[:-1] < lo) and np.all(lo < hi[1:])


def test_beta_moments_of_mapped_rule():
    # integral over [0, 1] of (x - 0)^p (1 - x)^q = B(p+1, q+1)
    for p, q in [(0.3, 0.0), (-0.5, 0.25), (0.0, -0.7)]:
        val = integrate_element(lambda x: np.ones_like(x), 0.0, 1.0, n=4, left_exp=p, right_exp=q)
        assert val == pytest.approx(beta_fn(p + 1, q + 1), rel=1e-14)


def test_legendre_integrates_smooth_function():
    rule = gauss_legendre(20)
    assert rule.weights @ np.exp(rule.nodes) == pytest.approx(math.e - 1 / math.e, rel=1e-15)


def test_graded_rule_handles_endpoint_singularity():
    # the untouched innermost panel [0, 2^-60] bounds the attainable accuracy
    for s in (-0.5, 0.3, 1.5):
        val = integrate_graded(lambda x: x**s, 0.0, 1.0, levels=60, points=16)
        assert val == pytest.approx(1 / (s + 1), rel=1e-9)


def test_graded_rule_weights_sum_to_length():
    _, w = graded_rule(0.25, 0.75, 10, 6)
    assert w.sum() == pytest.approx(0.5, rel=1e-15)


def test_panel_grid_integrates_kinked_functions():
    breaks = np.linspace(0, 1, 9)
    x, w = panel_grid(breaks)
    # kinks of the type (x - x_k)_+^(alpha-1) met in error norms; interior panels
    # are only lightly graded, which is ample for a 1e-6 relative error budget
    fn = np.sqrt(x) + np.abs(x - 0.25) ** 0.7 * (x > 0.25)
    exact = 2 / 3 + 0.75**1.7 / 1.7
    assert w @ fn == pytest.approx(exact, rel=1e-8)


def test_invalid_arguments():
    with pytest.raises(InvalidArgumentError):
        gauss_jacobi(0)
    with pytest.raises(InvalidArgumentError):
        gauss_jacobi(65)
    with pytest.raises(InvalidArgumentError):
        gauss_jacobi(4, -1.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        panel_grid([0.1, 1.0])
