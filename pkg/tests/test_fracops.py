import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccancer.fracops import (
    build_stencil,
    caputo_left,
    caputo_left_split,
    caputo_right,
    caputo_right_split,
)


def test_weights_at_half():
    s = build_stencil(0.5, 0.1, 10)
    assert s.weights[0] == -1.0
    np.testing.assert_allclose(s.weights[1], 1.0 - math.sqrt(2.0), rtol=1e-15)
    assert s.weights.shape == (11,)


def test_b0_against_mpmath_gamma():
    s = build_stencil(0.9, 0.25, 4)
    expected = -mpmath.mpf(0.25) ** mpmath.mpf(-0.9) / mpmath.gamma(mpmath.mpf(1.1))
    np.testing.assert_allclose(s.b0, float(expected), rtol=1e-14)
    assert s.c0 == -s.b0 > 0


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9, 0.99])
def test_weights_negative_and_shrinking(alpha):
    w = build_stencil(alpha, 0.3, 500).weights
    assert np.all(w < 0)
    assert np.all(np.diff(np.abs(w)) < 0)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
def test_rejects_alpha_outside_unit_interval(bad):
    with pytest.raises(ValueError):
        build_stencil(bad, 0.1, 5)


def test_rejects_bad_step_and_length():
    with pytest.raises(ValueError):
        build_stencil(0.5, 0.0, 5)
    with pytest.raises(ValueError):
        build_stencil(0.5, 0.1, 0)


def test_constant_has_zero_derivative():
    s = build_stencil(0.7, 0.2, 30)
    phi = np.full(31, 3.7)
    assert all(caputo_left(phi, s, k) == 0.0 for k in range(1, 31))


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8, 0.95])
@pytest.mark.parametrize("dt", [0.25, 0.05])
def test_exact_on_linear_functions(alpha, dt):
    n = 200
    s = build_stencil(alpha, dt, n)
    t = dt * np.arange(n + 1)
    a, b = 1.3, -0.7
    phi = a + b * t
    for k in range(1, n + 1):
        exact = b * t[k] ** (1 - alpha) / math.gamma(2 - alpha)
        np.testing.assert_allclose(caputo_left(phi, s, k), exact, rtol=1e-10)


def test_order_on_quadratic():
    alpha = 0.5
    errs = []
    for n in (20, 40, 80, 160):
        dt = 1.0 / n
        s = build_stencil(alpha, dt, n)
        t = dt * np.arange(n + 1)
        exact = 2 * t[-1] ** (2 - alpha) / math.gamma(3 - alpha)
        errs.append(abs(caputo_left(t**2, s, n) - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.5 - 0.1)


def test_left_split_recombines(rng):
    s = build_stencil(0.8, 0.25, 50)
    phi = rng.standard_normal(51)
    for k in range(1, 51):
        c0, hist = caputo_left_split(phi, s, k)
        assert c0 == s.c0
        np.testing.assert_allclose(c0 * phi[k] + hist, caputo_left(phi, s, k), rtol=1e-14, atol=1e-14)


def test_left_split_first_step():
    s = build_stencil(0.6, 0.1, 3)
    phi = np.array([2.5, np.nan, np.nan, np.nan])
    c0, hist = caputo_left_split(phi, s, 1)
    assert hist == -c0 * 2.5


def test_left_rejects_k_zero():
    s = build_stencil(0.6, 0.1, 3)
    with pytest.raises(ValueError):
        caputo_left(np.zeros(4), s, 0)


def test_left_vector_valued_columns_independent(rng):
    s = build_stencil(0.4, 0.2, 20)
    phi = rng.standard_normal((21, 3))
    col = [caputo_left(phi[:, j], s, 13) for j in range(3)]
    np.testing.assert_allclose(caputo_left(phi, s, 13), col, rtol=1e-14)


@settings(max_examples=50, deadline=None)
@given(
    a=st.floats(-5, 5), b=st.floats(-5, 5), seed=st.integers(0, 2**31 - 1),
    alpha=st.floats(0.05, 0.95),
)
def test_left_is_linear(a, b, seed, alpha):
    gen = np.random.default_rng(seed)
    s = build_stencil(alpha, 0.1, 30)
    phi, psi = gen.standard_normal((2, 31))
    lhs = caputo_left(a * phi + b * psi, s, 30)
    rhs = a * caputo_left(phi, s, 30) + b * caputo_left(psi, s, 30)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-13, atol=1e-12)


def test_right_is_left_of_reversed(rng):
    n = 40
    s = build_stencil(0.7, 0.25, n)
    lam = rng.standard_normal(n + 1)
    for k in range(n):
        np.testing.assert_allclose(
            caputo_right(lam, s, k), caputo_left(lam[::-1], s, n - k), rtol=1e-12, atol=1e-12
        )


def test_right_on_linear_function():
    # right Caputo of (t_f - t) is t_f-distance^(1-a)/Gamma(2-a)
    alpha, dt, n = 0.6, 0.2, 50
    s = build_stencil(alpha, dt, n)
    t = dt * np.arange(n + 1)
    lam = t[-1] - t
    for k in range(n):
        expected = (t[-1] - t[k]) ** (1 - alpha) / math.gamma(2 - alpha)
        np.testing.assert_allclose(caputo_right(lam, s, k), expected, rtol=1e-10)


def test_right_split_recombines(rng):
    n = 30
    s = build_stencil(0.85, 0.5, n)
    lam = rng.standard_normal(n + 1)
    lam[-1] = 0.0
    for k in range(n):
        c0, hist = caputo_right_split(lam, s, k)
        assert c0 == s.c0
        np.testing.assert_allclose(c0 * lam[k] + hist, caputo_right(lam, s, k), rtol=1e-13, atol=1e-13)


def test_right_split_zero_future():
    s = build_stencil(0.5, 0.1, 10)
    lam = np.zeros(11)
    lam[:4] = np.nan  # unknown past must not be read
    assert caputo_right_split(lam, s, 3)[1] == 0.0


def test_right_split_last_step_uses_terminal_only():
    s = build_stencil(0.5, 0.1, 10)
    lam = np.full(11, np.nan)
    lam[10] = 0.0
    c0, hist = caputo_right_split(lam, s, 9)
    assert hist == 0.0


def test_right_split_rejects_terminal_index():
    s = build_stencil(0.5, 0.1, 10)
    with pytest.raises(ValueError):
        caputo_right_split(np.zeros(11), s, 10)
