import math
import warnings

import mpmath
import numpy as np
import pytest

from fraccancer import ControlSchedule, Grid, ModelParams, solve_state, state_jacobian
from fraccancer.equilibria import (
    MarginalCase,
    NonexistentEquilibrium,
    coexisting_candidates,
    coexisting_quartic,
    coexisting_stability,
    companion_roots,
    cubic_discriminant,
    descartes_case,
    matignon_margin,
    sign_changes,
    stability_verdict,
    tumor_free_eigenvalues,
    tumor_free_equilibrium,
    tumor_free_existence,
    tumor_free_stability,
)

from conftest import STABLE_FIXTURE

DESCARTES_MAX = {1: 0, 2: 2, 3: 2, 4: 2, 5: 2, 6: 2, 7: 2, 8: 4}


def random_params(gen):
    """Log-uniform draw within a factor e^1.5 of the stable fixture."""
    kw = {k: v * math.exp(gen.uniform(-1.5, 1.5)) for k, v in STABLE_FIXTURE.items() if k != "alpha"}
    return ModelParams(alpha=gen.uniform(0.5, 0.99), **kw)


def draws(n, seed=7):
    gen = np.random.default_rng(seed)
    for _ in range(n):
        p = random_params(gen)
        yield p, *gen.uniform(0, 1, 2)


# --- tumour-free -----------------------------------------------------------


def test_tumor_free_without_treatment(table_params):
    eq = tumor_free_equilibrium(table_params, 0.0, 0.0)
    k = table_params.rates
    T, I, F, D1, D2 = eq.point
    assert (T, D1, D2) == (0.0, 0.0, 0.0)
    np.testing.assert_allclose(I, k.s / k.mu, rtol=1e-15)
    np.testing.assert_allclose(F, 1 / k.eps, rtol=1e-15)
    with mpmath.workdps(30):
        expected = (mpmath.mpf("0.33") / mpmath.mpf("0.204")) ** mpmath.mpf("0.9")
    np.testing.assert_allclose(I, float(expected), rtol=1e-13)
    assert round(I, 4) == 1.5417


@pytest.mark.parametrize("u", [(0.0, 0.0), (0.5, 0.5), (1.0, 0.1)])
def test_tumor_free_residual(table_params, u):
    assert tumor_free_equilibrium(table_params, *u).residual <= 1e-10


def test_existence_margins_without_treatment(table_params):
    k = table_params.rates
    cond = tumor_free_existence(table_params, 0.0, 0.0)
    assert cond["immune_positive"].holds and cond["fat_positive"].holds
    np.testing.assert_allclose(cond["immune_positive"].margin, k.mu * k.g * k.gamma1 * k.gamma2, rtol=1e-15)
    np.testing.assert_allclose(cond["fat_positive"].margin, k.d * k.gamma1, rtol=1e-15)


def test_existence_margin_vanishes_on_boundary(stable_params):
    k = stable_params.rates
    u1 = k.d * k.gamma1 / k.q3
    assert abs(tumor_free_existence(stable_params, u1, 0.0)["fat_positive"].margin) <= 1e-15
    with pytest.raises(NonexistentEquilibrium) as err:
        tumor_free_equilibrium(stable_params, 1.01 * u1, 0.0)
    assert err.value.condition == "fat_positive"


def test_existence_margins_against_high_precision(table_params):
    u1 = u2 = mpmath.mpf("0.5")
    with mpmath.workdps(40):
        e = lambda name: mpmath.mpf(getattr(table_params, name)) ** mpmath.mpf("0.9")  # noqa: E731
        immune = (
            e("mu") * e("g") * e("gamma1") * e("gamma2") + e("q2") * e("g") * u1 * e("gamma2")
            + e("q2") * u1 * u2 + u2 * e("gamma1") * e("mu") - u2 * e("gamma1") * e("beta")
        )
        fat = e("d") * e("gamma1") - e("q3") * u1
    cond = tumor_free_existence(table_params, 0.5, 0.5)
    np.testing.assert_allclose(cond["immune_positive"].margin, float(immune), rtol=1e-12)
    np.testing.assert_allclose(cond["fat_positive"].margin, float(fat), rtol=1e-12)


def test_negative_doses_rejected(table_params):
    with pytest.raises(ValueError):
        tumor_free_equilibrium(table_params, -0.1, 0.0)
    with pytest.raises(ValueError):
        coexisting_candidates(table_params, 0.0, -0.1)


def test_drug_eigenvalues(table_params):
    k = table_params.rates
    eig = tumor_free_eigenvalues(table_params, 0.3, 0.4)
    assert eig[0] == -k.gamma1 and eig[1] == -k.gamma2


def test_closed_form_eigenvalues_match_numeric():
    for p, u1, u2 in draws(200):
        try:
            eq = tumor_free_equilibrium(p, u1, u2)
        except NonexistentEquilibrium:
            continue
        closed = np.sort(tumor_free_eigenvalues(p, u1, u2))
        numeric = np.sort(np.linalg.eigvals(state_jacobian(eq.point, (u1, u2), p)).real)
        np.testing.assert_allclose(closed, numeric, rtol=1e-9, atol=1e-12)


def test_stable_fixture_contracts(stable_params):
    u = (0.5, 0.2)
    rep = tumor_free_stability(stable_params, *u)
    assert rep.verdict == "stable"
    assert rep.conditions["tumor_decay"].holds and rep.conditions["numeric_agreement"].holds
    eq = np.asarray(tumor_free_equilibrium(stable_params, *u).point)
    kick = np.array([0.05, 0.05, -0.05, 0.02, -0.02])
    g = Grid.from_step(60.0, 0.1)
    traj = solve_state(stable_params, ControlSchedule.constant(g, *u), eq + kick, g)
    assert np.linalg.norm(traj.values[-1] - eq) < 0.5 * np.linalg.norm(kick)


def test_table_parameters_tumor_free_unstable(table_params):
    # the tumour grows from any small seed without treatment
    rep = tumor_free_stability(table_params, 0.0, 0.0)
    assert rep.verdict == "unstable" and not rep.conditions["tumor_decay"].holds


# --- coexisting -------------------------------------------------------------


def test_quartic_end_coefficients_negative():
    for p, u1, u2 in draws(500):
        m4, *_, m0 = coexisting_quartic(p, u1, u2).coeffs
        assert m4 < 0 and m0 < 0


def test_descartes_cases():
    assert descartes_case(-1, -1, -1) == 1
    assert descartes_case(1, 1, 1) == 7
    assert descartes_case(1, -1, 1) == 8
    assert descartes_case(0.0, 1, 1) is None
    assert sign_changes([-1, 2, -3, 4, -5]) == 4


def test_case_one_has_no_candidates():
    seen = 0
    for p, u1, u2 in draws(300):
        if coexisting_quartic(p, u1, u2).descartes_case == 1:
            seen += 1
            assert coexisting_candidates(p, u1, u2) == []
    assert seen > 10


def _mp_real_roots(coeffs):
    with mpmath.workdps(50):
        roots = mpmath.polyroots([mpmath.mpf(c) for c in coeffs], maxsteps=400, extraprec=200)
        return sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-20 * max(1, abs(r)))


def test_companion_roots_match_high_precision_oracle():
    for p, u1, u2 in draws(1000, seed=11):
        coeffs = coexisting_quartic(p, u1, u2).coeffs
        ours = companion_roots(coeffs)
        ours = sorted(r.real for r in ours if abs(r.imag) <= 1e-8 * max(1.0, abs(r)))
        oracle = _mp_real_roots(coeffs)
        assert len(ours) == len(oracle)
        np.testing.assert_allclose(ours, oracle, rtol=1e-9, atol=1e-12)


def test_positive_roots_within_descartes_bound():
    for p, u1, u2 in draws(1000, seed=13):
        quart = coexisting_quartic(p, u1, u2)
        positive = [r for r in _mp_real_roots(quart.coeffs) if r > 0]
        if quart.descartes_case is not None:
            assert len(positive) <= DESCARTES_MAX[quart.descartes_case]


def test_candidates_are_certified():
    found = 0
    for p, u1, u2 in draws(600, seed=17):
        for eq in coexisting_candidates(p, u1, u2):
            found += 1
            assert eq.residual <= 1e-8
            assert all(v > 0 for v in eq.point[:3])
            assert eq.point.T < eq.details["tumor_bound"] and eq.point.I < eq.details["immune_bound"]
    assert found > 20


def test_table_parameters_coexisting_point(table_params):
    p = table_params.replace(c1=0.28)
    (eq,) = coexisting_candidates(p, 0.5, 0.5)
    assert eq.details["descartes_case"] == 8
    assert eq.residual <= 1e-6
    assert 0 < eq.point.T < eq.details["tumor_bound"]


def test_branch_one_agrees_with_eigenvalues():
    checked = 0
    for p, u1, u2 in draws(1500, seed=19):
        for eq in coexisting_candidates(p, u1, u2):
            try:
                rep = coexisting_stability(eq, p)
            except MarginalCase:
                continue
            if rep.conditions["discriminant"] > 0:
                checked += 1
                assert rep.conditions["branch_i"] == (rep.verdict == "stable")
    assert checked > 20


def test_coexisting_stability_reports_drug_eigenvalues(table_params):
    p = table_params.replace(c1=0.28)
    (eq,) = coexisting_candidates(p, 0.5, 0.5)
    rep = coexisting_stability(eq, p)
    k = p.rates
    for lam in (-k.gamma1, -k.gamma2):
        assert np.min(np.abs(rep.eigenvalues - lam)) <= 1e-12
    with pytest.raises(ValueError):
        coexisting_stability(tumor_free_equilibrium(p, 0.5, 0.5), p)


def test_discriminant_matches_root_products(rng):
    for _ in range(50):
        r = rng.standard_normal(3)
        a1, a2, a3 = np.poly(r)[1:]
        expected = np.prod([(r[i] - r[j]) ** 2 for i in range(3) for j in range(i + 1, 3)])
        np.testing.assert_allclose(cubic_discriminant(a1, a2, a3), expected, rtol=1e-9, atol=1e-12)


# --- Matignon ----------------------------------------------------------------


def test_matignon_examples():
    for alpha in (0.1, 0.5, 0.99):
        assert matignon_margin([-1.0], alpha) > 0
    assert matignon_margin([1j], 0.9) == pytest.approx(math.pi / 2 - 0.45 * math.pi)
    assert matignon_margin([0.1 + 1j], 0.99) < 0


def test_matignon_approaches_hurwitz():
    eig = [-1e-3 + 1j, -2.0, -0.5 - 3j]
    assert matignon_margin(eig, 0.999) > 0


def test_verdict_bands():
    assert stability_verdict(1e-3) == "stable"
    assert stability_verdict(-1e-3) == "unstable"
    assert stability_verdict(0.0) == stability_verdict(5e-10) == "marginal"


def test_warning_free_under_explicit_coupling():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        tumor_free_stability(ModelParams(**STABLE_FIXTURE), 0.0, 0.0)
