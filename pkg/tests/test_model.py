import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccancer import (
    C1_DEFAULT,
    ModelParams,
    ProvenanceWarning,
    adjoint_rhs,
    cost_integrand,
    default_params,
    state_jacobian,
    state_rhs,
)

mpmath.mp.dps = 40


def mp_rhs(x, u, p: ModelParams):
    """State right-hand side in 40-digit arithmetic, written from the model equations."""
    a = mpmath.mpf(p.alpha)
    e = lambda name: mpmath.mpf(getattr(p, name)) ** a  # noqa: E731
    T, I, F, D1, D2 = (mpmath.mpf(v) for v in x)
    u1, u2 = (mpmath.mpf(v) for v in u)
    return [
        e("r") * T * (1 - e("p") * T) - e("xi1") * T * I + e("c1") * T * F - e("q1") * D1 * T,
        e("s") + e("rho") * T**2 * I / (e("h") + T**2 + F**2) + e("beta") * D2 * I / (e("g") + D2)
        - e("xi2") * T * I - e("mu") * I - e("q2") * D1 * I,
        e("d") * F * (1 - e("eps") * F) - e("c2") * F * T - e("q3") * D1 * F,
        u1 - e("gamma1") * D1,
        u2 - e("gamma2") * D2,
    ]


def random_point(gen, scale=(1e4, 2.0, 1e4, 2.0, 2.0)):
    return gen.uniform(0, 1, 5) * np.array(scale)


def test_table_defaults():
    p = default_params(c1=0.1, c2=0.2)
    assert p.gamma1 == 0.1
    assert p.h == 20_200_000
    np.testing.assert_allclose(p.d, 0.0000431, rtol=1e-15)
    assert p.eps == p.p and p.q3 == p.q2
    assert (p.omega1, p.omega2) == (1.0, 2.0)


def test_missing_fat_coupling_warns():
    with pytest.warns(ProvenanceWarning):
        p = ModelParams()
    assert p.c1 == C1_DEFAULT


def test_explicit_fat_coupling_is_silent():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ModelParams(c1=0.1, c2=0.1)


@pytest.mark.parametrize("field,value", [("alpha", 1.0), ("alpha", 0.0), ("r", -1.0), ("mu", 0.0)])
def test_rejects_invalid(field, value):
    with pytest.raises(ValueError):
        ModelParams(c1=0.1, c2=0.1, **{field: value})


def test_rates_follow_alpha(table_params):
    for alpha in (0.5, 0.8, 0.95):
        p = table_params.replace(alpha=alpha)
        for name in ("r", "h", "gamma1"):
            np.testing.assert_allclose(getattr(p.rates, name), getattr(p, name) ** alpha, rtol=1e-15)


def test_rhs_at_origin(table_params):
    s = table_params.rates.s
    np.testing.assert_array_equal(state_rhs(np.zeros(5), (0, 0), table_params), [0, s, 0, 0, 0])
    np.testing.assert_array_equal(state_rhs(np.zeros(5), (0.5, 0.5), table_params), [0, s, 0, 0.5, 0.5])


def test_rhs_against_high_precision(table_params):
    x, u = (2.0, 0.1, 1.0, 0.5, 0.5), (0.3, 0.7)
    expected = [float(v) for v in mp_rhs(x, u, table_params)]
    np.testing.assert_allclose(state_rhs(x, u, table_params), expected, rtol=1e-13)


def test_rhs_against_high_precision_random(stable_params, rng):
    for _ in range(20):
        x, u = random_point(rng, (5, 5, 5, 2, 2)), rng.uniform(0, 1, 2)
        expected = [float(v) for v in mp_rhs(x, u, stable_params)]
        np.testing.assert_allclose(state_rhs(x, u, stable_params), expected, rtol=1e-12, atol=1e-14)


def test_rhs_broadcasts(table_params, rng):
    xs = np.stack([random_point(rng) for _ in range(7)])
    us = rng.uniform(0, 1, (7, 2))
    batched = state_rhs(xs, us, table_params)
    for x, u, row in zip(xs, us, batched):
        np.testing.assert_array_equal(state_rhs(x, u, table_params), row)


def test_jacobian_at_origin(table_params):
    k = table_params.rates
    J = state_jacobian(np.zeros(5), (0, 0), table_params)
    assert J[0, 0] == k.r and J[2, 2] == k.d
    assert J[3, 3] == -k.gamma1 and J[4, 4] == -k.gamma2
    assert J[1, 0] == 0 and J[1, 1] == -k.mu


def _fd_jacobian(x, u, params, rel=1e-6):
    J = np.empty((5, 5))
    for j in range(5):
        h = rel * max(abs(x[j]), 1.0)
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        J[:, j] = (state_rhs(xp, u, params) - state_rhs(xm, u, params)) / (2 * h)
    return J


@pytest.mark.parametrize("which", ["table", "stable"])
def test_jacobian_matches_finite_differences(which, table_params, stable_params, rng):
    params = table_params if which == "table" else stable_params
    scale = (1e4, 2.0, 1e4, 2.0, 2.0) if which == "table" else (5, 5, 5, 2, 2)
    for _ in range(1000):
        x, u = random_point(rng, scale), rng.uniform(0, 1, 2)
        J = state_jacobian(x, u, params)
        fd = _fd_jacobian(x, u, params)
        # entries are compared relative to the size of their row
        row_scale = np.maximum(np.abs(J).max(axis=1, keepdims=True), 1e-300)
        np.testing.assert_allclose(J / row_scale, fd / row_scale, atol=1e-5)


def test_jacobian_sparsity(table_params, rng):
    zero = [(0, 4), (2, 1), (2, 4), (3, 0), (3, 1), (3, 2), (3, 4), (4, 0), (4, 1), (4, 2), (4, 3)]
    for _ in range(100):
        J = state_jacobian(random_point(rng), rng.uniform(0, 1, 2), table_params)
        for i, j in zero:
            assert J[i, j] == 0.0


def test_adjoint_rhs_examples(table_params, rng):
    x = random_point(rng)
    np.testing.assert_array_equal(adjoint_rhs(np.zeros(5), x, table_params), [1, 0, 0, 0, 0])
    out = adjoint_rhs(np.array([0, 0, 0, 1.0, 0]), np.zeros(5), table_params)
    assert out[3] == -table_params.rates.gamma1


def test_adjoint_rhs_is_transpose_jacobian(table_params, rng):
    for _ in range(50):
        x, lam = random_point(rng), rng.standard_normal(5)
        J = state_jacobian(x, (0.0, 0.0), table_params)
        expected = J.T @ lam + np.array([1.0, 0, 0, 0, 0])
        np.testing.assert_allclose(adjoint_rhs(lam, x, table_params), expected, rtol=1e-10, atol=1e-12)


def test_cost_integrand_examples():
    p = default_params(c1=0.1, c2=0.1)
    assert cost_integrand((2, 0, 0, 0, 0), (0, 0), p) == 2
    assert cost_integrand((0, 0, 0, 0, 0), (1, 1), p) == 3
    assert cost_integrand((2, 0, 0, 0, 0), (0.5, 0.5), p) == 2.75


@settings(max_examples=300, deadline=None)
@given(
    comp=st.integers(0, 4),
    x=st.lists(st.floats(0, 1e6), min_size=5, max_size=5),
    u=st.tuples(st.floats(0, 1), st.floats(0, 1)),
    alpha=st.floats(0.05, 0.99),
)
def test_field_points_inward_on_boundary(comp, x, u, alpha):
    p = ModelParams(alpha=alpha, c1=C1_DEFAULT, c2=1e-9)
    x = np.array(x)
    x[comp] = 0.0
    assert state_rhs(x, u, p)[comp] >= 0.0
