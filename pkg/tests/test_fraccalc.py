from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from fracmat.errors import NonMonotoneSamples, NonVanishingAtA, NonVanishingAtB
from fracmat.fraccalc import (
    FracResult,
    Grid,
    SampleVector,
    frac_deriv_wrt,
    gl_left,
    gl_right,
    operator_matrix,
    rl_wrt_quadrature,
    taylor_wrt,
)
from fracmat.funcspec import FunctionSpec
from fracmat.symfun import binom_real

X = FunctionSpec.from_string("x", 0, 1)
X2 = FunctionSpec.from_string("x^2", 0, 1)


def gl_direct(f, a, x, n, alpha):
    """The Grunwald-Letnikov sum written out term by term."""
    h = (x - a) / n
    return h ** (-alpha) * sum((-1) ** k * binom_real(alpha, k) * f(x - k * h) for k in range(n + 1))


# {{{ grids and samples


def test_grid_last_node_is_pinned():
    g = Grid(0.1, 0.7, 3)
    assert g.nodes[-1] == 0.7
    assert g.h == pytest.approx(0.2)
    for bad in [(1, 1, 4), (0, 1, 0), (0, math.inf, 3), (0, 1, 2.5)]:
        with pytest.raises(ValueError):
            Grid(*bad)


def test_sample_orderings():
    grid = Grid(0, 1, 4)
    left = SampleVector.sample(X, grid, "left")
    np.testing.assert_array_equal(left.values, [1, 0.75, 0.5, 0.25])
    right = SampleVector.sample(lambda x: 1 - x, grid, "right")
    np.testing.assert_array_equal(right.values, [1, 0.75, 0.5, 0.25])
    assert len(left) == 4
    with pytest.raises(NonVanishingAtA):
        SampleVector.sample(lambda x: x + 1e-9, grid, "left")
    with pytest.raises(NonVanishingAtB):
        SampleVector.sample(X, grid, "right")
    with pytest.raises(ValueError):
        SampleVector([1.0], "middle")


# }}}


# {{{ Grunwald-Letnikov


def test_gl_first_derivative():
    r = gl_left(X, Grid(0, 1, 1000), 1.0)
    assert r.value == pytest.approx(1.0, abs=1e-3)
    assert isinstance(r, FracResult) and r.value == r.per_node[0]


def test_gl_half_derivative_of_x():
    ref = 2 / math.sqrt(math.pi)
    errs = [abs(gl_left(X, Grid(0, 1, n), 0.5).value - ref) for n in (256, 1024, 4096)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-4


def test_gl_integral_of_x():
    assert gl_left(X, Grid(0, 1, 1000), -1.0).value == pytest.approx(0.5, abs=1e-3)


@pytest.mark.parametrize("alpha", [-1.3, -0.5, 0.3, 0.5, 1.0, 1.7])
def test_gl_matches_term_by_term_sum(alpha):
    f = FunctionSpec.from_string("sin(3*x)", 0, 2)
    grid = Grid(0, 2, 37)
    r = gl_left(f, grid, alpha)
    assert r.value == pytest.approx(gl_direct(f, 0, 2, 37, alpha), rel=1e-12, abs=1e-12)
    # per-node entries are the same sum ending at each node
    for j, xj in enumerate(r.nodes[:5]):
        nj = 37 - j
        assert r.per_node[j] == pytest.approx(gl_direct(f, 0, xj, nj, alpha), rel=1e-11, abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_gl_integer_order_is_backward_difference(m):
    f = FunctionSpec.from_string("exp(x) - 1", 0, 1)
    grid = Grid(0, 1, 50)
    h = grid.h
    terms = [(-1) ** k * math.comb(m, k) * f(1 - k * h) / h**m for k in range(m + 1)]
    # same weights, so only the summation order differs
    tol = 8 * np.finfo(float).eps * sum(abs(t) for t in terms)
    assert abs(gl_left(f, grid, m).value - sum(terms)) <= tol


def test_gl_right_examples():
    r = gl_right(FunctionSpec.from_string("(1-x)^2", 0, 1), Grid(0, 1, 100), 2)
    assert r.value.real == pytest.approx(2.0, rel=1e-12)
    assert r.value.imag == 0.0
    r = gl_right(lambda x: 1 - x, Grid(0, 1, 100), 1)
    assert r.value == pytest.approx(-1.0, abs=1e-12)
    f = lambda x: np.sin(1 - x)  # noqa: E731
    r = gl_right(f, Grid(0, 1, 10), 0)
    assert r.value == pytest.approx(f(0.0), abs=1e-15)


def test_gl_right_half_order_phase():
    # e^{i pi/2} times the right Riemann-Liouville derivative of (1 - x)
    r = gl_right(lambda x: 1 - x, Grid(0, 1, 4096), 0.5)
    assert r.value.real == pytest.approx(0.0, abs=1e-12)
    assert r.value.imag == pytest.approx(1 / gamma(1.5), abs=1e-3)


@pytest.mark.parametrize("alpha", [0.4, 1.0, -0.6])
def test_left_right_mirror(alpha):
    # right operator of f(1 - .) is the phase times the left operator of f
    f = FunctionSpec.from_string("x^2 + x", 0, 1)
    L = gl_left(f, Grid(0, 1, 64), alpha)
    R = gl_right(lambda y: f(1 - y), Grid(0, 1, 64), alpha)
    assert R.value / np.exp(1j * math.pi * alpha) == pytest.approx(L.value, rel=1e-12)


# }}}


# {{{ derivative with respect to a function


def test_identity_g_reduces_to_gl():
    grid = Grid(0, 1, 512)
    for alpha in (0.5, -0.5, 1.5):
        a = frac_deriv_wrt(X2, X, grid, alpha)
        b = gl_left(X2, grid, alpha)
        assert np.max(np.abs(a.per_node - b.per_node)) <= 1e-10 * max(1.0, np.max(np.abs(b.per_node)))


def test_cross_agreement_with_rl():
    grid = Grid(0, 1, 512)
    v = frac_deriv_wrt(X2, X, grid, 0.5).value
    assert abs(v - gl_left(X2, grid, 0.5).value) <= 1e-10
    assert abs(v - rl_wrt_quadrature(X2, X, 1.0, 0.5)) <= 5e-2


@pytest.mark.parametrize("g", ["x", "x^2 + x", "exp(x) - 1", "x^1.5"])
def test_f_equals_g_first_order(g):
    gs = FunctionSpec.from_string(g, 0, 1)
    r = frac_deriv_wrt(gs, gs, Grid(0, 1, 64), 1.0)
    np.testing.assert_allclose(r.per_node, 1.0, rtol=1e-12)


def test_first_order_is_divided_difference():
    g = FunctionSpec.from_string("x + x^3", 0, 1)
    f = FunctionSpec.from_string("sin(x)", 0, 1)
    grid = Grid(0, 1, 20)
    r = frac_deriv_wrt(f, g, grid, 1.0)
    xs = grid.nodes
    assert r.value == pytest.approx((f(xs[-1]) - f(xs[-2])) / (g(xs[-1]) - g(xs[-2])), rel=1e-13)


def test_chain_rule_example():
    g = FunctionSpec.from_string("x^2", 0, 1)
    f = FunctionSpec.from_string("x^4", 0, 1)
    errs = [abs(frac_deriv_wrt(f, g, Grid(0, 1, n), 1.0).value - 2.0) for n in (100, 200, 400)]
    assert errs[-1] < 1e-2
    assert errs[0] / errs[-1] == pytest.approx(4.0, rel=0.1)  # O(h)


def test_shift_of_g_is_irrelevant():
    grid = Grid(0, 1, 40)
    a = frac_deriv_wrt(X2, FunctionSpec.from_string("x^1.5", 0, 1), grid, 0.5)
    b = frac_deriv_wrt(X2, FunctionSpec.from_string("x^1.5 + 3", 0, 1), grid, 0.5)
    assert a.value == pytest.approx(b.value, rel=1e-12)


def test_non_monotone_g():
    with pytest.raises(NonMonotoneSamples):
        frac_deriv_wrt(X2, FunctionSpec.from_string("sin(6*x)", 0, 1), Grid(0, 1, 40), 0.5)
    with pytest.raises(NonVanishingAtA):
        frac_deriv_wrt(lambda x: x + 1, X, Grid(0, 1, 40), 0.5)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8, -0.5, 1.5, 2.0])
def test_balakrishnan_method_matches_matrix_power(alpha):
    g = FunctionSpec.from_string("x + x^2", 0, 1)
    grid = Grid(0, 1, 8)
    a = frac_deriv_wrt(X2, g, grid, alpha, "matrix-power")
    b = frac_deriv_wrt(X2, g, grid, alpha, "balakrishnan")
    assert b.method.startswith("balakrishnan")
    np.testing.assert_allclose(b.per_node, a.per_node, rtol=1e-6, atol=1e-8)


def test_unknown_method():
    with pytest.raises(ValueError):
        operator_matrix(X, Grid(0, 1, 4), 0.5, "magic")


def test_composition_of_half_orders():
    g = FunctionSpec.from_string("x^1.5", 0, 1)
    f = FunctionSpec.from_string("x^2", 0, 1)
    for n in (64, 128, 256):
        grid = Grid(0, 1, n)
        half = frac_deriv_wrt(f, g, grid, 0.5)
        twice = frac_deriv_wrt(SampleVector(half.per_node), g, grid, 0.5)
        once = frac_deriv_wrt(f, g, grid, 1.0)
        assert abs(twice.value - once.value) <= grid.h**0.3


@settings(max_examples=30)
@given(
    st.floats(-3, 3),
    st.floats(-3, 3),
    st.sampled_from([-0.7, 0.25, 0.5, 1.0, 1.6]),
    st.integers(4, 64),
)
def test_linearity(c1, c2, alpha, n):
    f1 = FunctionSpec.from_string("sin(x)", 0, 1)
    f2 = FunctionSpec.from_string("x^3 + x", 0, 1)
    g = FunctionSpec.from_string("x + x^2", 0, 1)
    grid = Grid(0, 1, n)
    comb = lambda x: c1 * f1(x) + c2 * f2(x)  # noqa: E731
    for op in (
        lambda h: gl_left(h, grid, alpha).per_node,
        lambda h: frac_deriv_wrt(h, g, grid, alpha).per_node,
        lambda h: gl_right(lambda x: h(1 - x), grid, alpha).per_node,
    ):
        lhs = op(comb)
        rhs = c1 * op(f1) + c2 * op(f2)
        scale = abs(c1) * np.max(np.abs(op(f1))) + abs(c2) * np.max(np.abs(op(f2))) + 1e-300
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


# }}}


# {{{ Riemann-Liouville oracle


def test_rl_power_rule():
    assert rl_wrt_quadrature(X, X, 1.0, 0.5) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-10)
    assert rl_wrt_quadrature(X2, X, 1.0, 0.5) == pytest.approx(2 / gamma(2.5), rel=1e-10)


@pytest.mark.parametrize("g", ["x^1.5", "exp(x) - 1", "x + x^3"])
@pytest.mark.parametrize("x", [0.3, 1.0])
def test_rl_f_equals_g(g, x):
    gs = FunctionSpec.from_string(g, 0, 1)
    assert rl_wrt_quadrature(gs, gs, x, 0.5) == pytest.approx(gs(x) ** 0.5 / gamma(1.5), rel=1e-9)


def test_rl_small_order_limit():
    g = FunctionSpec.from_string("x^1.5", 0, 1)
    f = FunctionSpec.from_string("x^3", 0, 1)  # f = g^2
    for alpha in (0.0, 1e-9):
        assert rl_wrt_quadrature(f, g, 0.8, alpha) == pytest.approx(g(0.8) ** 2, abs=1e-8)


def test_rl_integral_order():
    # integral of order 1/2 of u in the variable u = g
    g = FunctionSpec.from_string("x^2", 0, 1)
    v = rl_wrt_quadrature(g, g, 1.0, -0.5)
    assert v == pytest.approx(gamma(2) / gamma(2.5), rel=1e-10)


def test_rl_rejects():
    with pytest.raises(ValueError):
        rl_wrt_quadrature(X, X, 1.0, 1.0)
    with pytest.raises(ValueError):
        rl_wrt_quadrature(X, X, 0.0, 0.5)


# }}}


# {{{ Taylor by g


def test_taylor_f_equals_g():
    g = FunctionSpec.from_string("x + x^2", 0, 2)
    for x in (0.1, 0.9, 1.7):
        assert taylor_wrt(g, g, 1.0, x, 1) == pytest.approx(g(x), rel=1e-7)


def test_taylor_cubic_in_g():
    g = FunctionSpec.from_string("x^1.5 + x", 0, 2)
    f = FunctionSpec.from_string("(x^1.5 + x)^3", 0, 2)
    for x in (0.5, 1.5):
        assert taylor_wrt(f, g, 1.0, x, 3) == pytest.approx(f(x), rel=1e-4)


def test_taylor_remainder_order():
    g = FunctionSpec.from_string("x + x^2", 0, 2)
    f = FunctionSpec.from_string("exp(x + x^2)", 0, 2)
    a = 1.0
    xs = a + np.array([0.2, 0.1, 0.05, 0.025])
    dg = np.array([g(x) - g(a) for x in xs])
    rem = np.array([abs(f(x) - taylor_wrt(f, g, a, x, 2)) for x in xs])
    slope = np.polyfit(np.log(dg), np.log(rem), 1)[0]
    assert slope == pytest.approx(3.0, abs=0.3)


def test_taylor_vectorized_and_validation():
    g = FunctionSpec.from_string("x", -1, 1)
    f = FunctionSpec.from_string("exp(x)", -1, 1)
    out = taylor_wrt(f, g, 0.0, np.array([0.0, 0.1]), 2)
    assert out.shape == (2,)
    assert out[0] == 1.0
    with pytest.raises(ValueError):
        taylor_wrt(f, g, 0.0, 0.1, -1)


# }}}
