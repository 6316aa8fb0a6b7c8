import math

import numpy as np
import pytest

from realhom.errors import NewtonUndefined
from realhom.pointestimates import (
    kappa_at, kappa_batch, kappa_upper_estimate, mu_norm, newton_mp, point_estimates,
    refine_zero, tau_proxy,
)
from realhom.polysys import PolynomialSystem, evaluate, jacobian, sample_kostlan

from helpers import (
    FOUR_ZEROS, four_points_system, mu_stability_violations, random_unit, sphere_system,
)

S = 1 / math.sqrt(2)


def test_mu_at_zero_is_one():
    assert mu_norm(four_points_system(), [S, S]) == pytest.approx(1.0, rel=1e-12)


def test_mu_rank_deficient_is_infinite():
    f = PolynomialSystem.from_terms(1, [(2, {(2, 0): 1.0})])
    assert mu_norm(f, [0.0, 1.0]) == math.inf
    est = point_estimates(f, [0.0, 1.0])
    assert est.alpha_bar == est.beta_bar == est.gamma_bar == math.inf
    assert est.kappa_at == math.inf


def test_mu_antipodal():
    rng = np.random.default_rng(2)
    f = sample_kostlan(3, 2, (2, 3), seed=1)
    for x in random_unit(rng, 4, 20):
        assert mu_norm(f, -x) == pytest.approx(mu_norm(f, x), rel=1e-12)


def test_non_unit_point_rejected():
    with pytest.raises(ValueError):
        mu_norm(four_points_system(), [1.0, 1.0])
    with pytest.raises(ValueError):
        kappa_at(four_points_system(), [2.0, 0.0])


def test_kappa_examples():
    f = four_points_system()
    assert kappa_at(f, [S, S]) == pytest.approx(mu_norm(f, [S, S]))
    g = PolynomialSystem.from_terms(1, [(2, {(2, 0): 1.0, (0, 2): 1.0})])
    assert kappa_at(g, [1.0, 0.0]) == pytest.approx(math.sqrt(2 / 3), rel=1e-12)


def test_kappa_antipodal_and_scale_invariance():
    rng = np.random.default_rng(4)
    f = sample_kostlan(2, 1, (3,), seed=8)
    for x in random_unit(rng, 3, 20):
        k = kappa_at(f, x)
        assert kappa_at(f, -x) == pytest.approx(k, rel=1e-12)
        for lam in (0.25, 3.0, 2.0):
            assert kappa_at(f.scaled(lam), x) == pytest.approx(k, rel=1e-12)


def test_point_estimates_at_zero():
    est = point_estimates(four_points_system(), [S, S])
    assert est.beta_bar == pytest.approx(0.0, abs=1e-15)
    assert est.alpha_bar == pytest.approx(0.0, abs=1e-15)
    assert est.gamma_bar == pytest.approx(math.sqrt(2), rel=1e-12)


def test_point_estimates_consistency():
    f = four_points_system()
    est = point_estimates(f, [1.0, 0.0])
    assert est.beta_bar == pytest.approx(est.mu / math.sqrt(2), rel=1e-12)
    assert est.alpha_bar == pytest.approx(est.beta_bar * est.gamma_bar, rel=1e-12)
    assert est.gamma_bar == pytest.approx(0.5 * 2 ** 1.5 * est.mu, rel=1e-12)
    expected_kappa = f.weyl_norm / math.sqrt(f.weyl_norm ** 2 / est.mu ** 2 + est.residual_norm ** 2)
    assert est.kappa_at == pytest.approx(expected_kappa, rel=1e-12)


def test_newton_examples():
    f = four_points_system()
    np.testing.assert_allclose(newton_mp(f, [1.0, 0.0]), [0.5, 0.0])
    np.testing.assert_array_equal(newton_mp(f, [S, S]), [S, S])
    x = np.array([1.0, 0.9])
    res = [abs(evaluate(f, x)[0])]
    for _ in range(8):
        x = newton_mp(f, x)
        res.append(abs(evaluate(f, x)[0]))
        if res[-1] < 1e-12:
            break
    assert res[-1] < 1e-12
    assert all(b < a for a, b in zip(res, res[1:]) if a > 0)


def test_newton_undefined():
    with pytest.raises(NewtonUndefined, match="Newton undefined"):
        newton_mp(four_points_system(), [0.0, 0.0])


def test_pseudoinverse_contract():
    rng = np.random.default_rng(6)
    for trial in range(30):
        f = sample_kostlan(3, 2, (2, 3), seed=trial)
        J = jacobian(f, random_unit(rng, 4))
        np.testing.assert_allclose(J @ np.linalg.pinv(J), np.eye(2), atol=1e-8)


def test_refine_zero_contract():
    f = four_points_system()
    np.testing.assert_array_equal(refine_zero(f, [S, S]), [S, S])
    # a fine grid point next to the zero (1, 1)/sqrt(2)
    v = np.array([1024.0, 1021.0])
    x = v / np.linalg.norm(v)
    est = point_estimates(f, x)
    assert est.alpha_bar <= 0.125
    p = refine_zero(f, x)
    assert abs(evaluate(f, p)[0]) / f.weyl_norm <= 1e-12
    assert np.linalg.norm(p - x) <= 2 * est.beta_bar + 1e-12
    nearest = FOUR_ZEROS[np.argmin(np.linalg.norm(FOUR_ZEROS - x, axis=1))]
    assert np.linalg.norm(p / np.linalg.norm(p) - nearest) <= 2 * est.beta_bar + 1e-12


def test_refine_zero_precondition():
    with pytest.raises(ValueError, match="precondition"):
        refine_zero(four_points_system(), [1.0, 0.0])


def test_alpha_dominance_sampled():
    rng = np.random.default_rng(12)
    done = 0
    for trial in range(200):
        f = sample_kostlan(2, 1, (2,), seed=trial)
        x = random_unit(rng, 3)
        for _ in range(6):
            if point_estimates(f, x).alpha_bar <= 0.125:
                break
            try:
                x = newton_mp(f, x)
            except NewtonUndefined:
                break
            x /= np.linalg.norm(x)
        est = point_estimates(f, x)
        if est.alpha_bar <= 0.125:
            p = refine_zero(f, x)
            assert np.linalg.norm(p - x) <= 2 * est.beta_bar + 1e-12
            done += 1
    assert done > 50


def test_kappa_upper_estimate():
    f = sphere_system()
    for k in (3, 4, 5):
        assert kappa_upper_estimate(f, k) <= math.sqrt(2) + 1e-12
    g = four_points_system()
    est = kappa_upper_estimate(g, 10)
    t = np.linspace(0, 2 * np.pi, 200_001)
    sweep = np.max(kappa_batch(g, np.column_stack([np.cos(t), np.sin(t)])))
    assert est <= sweep + 1e-9
    assert est == pytest.approx(1.0, abs=1e-3)
    assert sweep == pytest.approx(1.0, abs=1e-6)


def test_kappa_upper_estimate_matches_grid_max():
    from realhom import grid
    f = sample_kostlan(2, 1, (3,), seed=2)
    k = 4
    X = grid.coords_to_sphere(grid.grid_coords(2, k, 0, grid.grid_size(2, k)))
    assert kappa_upper_estimate(f, k) == float(np.max(kappa_batch(f, X)))
    with pytest.raises(ValueError):
        kappa_upper_estimate(f, 1)


def test_tau_proxy():
    f = four_points_system()
    assert tau_proxy(f, FOUR_ZEROS) == pytest.approx(1 / (87 * math.sqrt(2)), rel=1e-9)
    assert tau_proxy(f, np.zeros((0, 2))) == math.inf


def test_mu_stability_property():
    assert mu_stability_violations(1000) == 0
