import numpy as np
import pytest

from maxplusfem.elements import BasisFamily, BoxDomain
from maxplusfem.problem import regular_grid, voronoi_radius
from maxplusfem.projections import (GridFunction, dual_coefficients, lipschitz_projection_bound,
                                    primal_coefficients, project_combined, project_dual,
                                    project_primal, semiconvex_projection_bound)
from maxplusfem.tropical import sup_norm_distance

X = BoxDomain([-1.0], [1.0])
GRID = np.linspace(-1, 1, 401)[:, None]


def quad(centers, c):
    return BasisFamily.quadratic(np.asarray(centers, float)[:, None], c)


def lip(centers, a):
    return BasisFamily.lipschitz(np.asarray(centers, float)[:, None], a)


def zero(grid=GRID):
    return GridFunction(grid, np.zeros(len(grid)))


def test_grid_function_validation():
    with pytest.raises(ValueError):
        GridFunction(GRID, np.zeros(3))
    with pytest.raises(ValueError):
        GridFunction(GRID[:1], [np.inf])
    with pytest.raises(ValueError):
        GridFunction(np.zeros((0, 1)), [])


def test_primal_coefficient_examples():
    W = quad([0.3], 2.0)
    v = GridFunction.sample(lambda x: W.values(x)[:, 0], GRID)
    assert primal_coefficients(W, v)[0] == 0.0
    assert primal_coefficients(quad([0.0], 2.0), zero())[0] == 0.0
    assert primal_coefficients(quad([2.0], 2.0), zero())[0] == pytest.approx(1.0)


def test_primal_examples():
    W = quad([-0.5, 0.5], 2.0)
    lam = np.array([0.3, -0.2])
    v = GridFunction(GRID, np.max(W.values(GRID) + lam, axis=1))
    np.testing.assert_allclose(project_primal(W, v).values, v.values, atol=1e-15)
    one = quad([2.0], 2.0)
    np.testing.assert_allclose(project_primal(one, zero()).values, one.values(GRID)[:, 0] + 1.0)


def test_dual_examples():
    Z = lip([0.2], 1.5)
    v = GridFunction(GRID, -Z.values(GRID)[:, 0] + 0.7)
    np.testing.assert_allclose(project_dual(Z, v).values, v.values, atol=1e-15)
    Zfull = lip(GRID[:, 0], 1.5)
    np.testing.assert_array_equal(project_dual(Zfull, zero()).values, 0.0)
    np.testing.assert_array_equal(dual_coefficients(Zfull, zero()), 0.0)


def test_combined_fixes_span():
    W = quad(np.linspace(-1, 1, 9), 2.0)
    Z = lip(GRID[:, 0], 3.0)
    lam = np.linspace(-0.5, 0.5, 9)
    v = GridFunction(GRID, np.max(W.values(GRID) + lam, axis=1))
    np.testing.assert_allclose(project_combined(W, Z, v).values, v.values, atol=1e-14)


def _random_v(rng):
    vals = np.cumsum(rng.normal(scale=0.05, size=len(GRID)))
    return GridFunction(GRID, vals)


def test_projector_laws(rng):
    W = quad(np.linspace(-1.2, 1.2, 13), 2.0)
    Z = lip(np.linspace(-1, 1, 11), 1.5)
    for _ in range(20):
        v = _random_v(rng)
        pw = project_primal(W, v)
        pz = project_dual(Z, v)
        pi = project_combined(W, Z, v)
        # exact up to one rounding of (v - w) + w
        assert np.all(pw.values <= v.values + 1e-12)
        assert np.all(pz.values >= v.values - 1e-12)
        np.testing.assert_allclose(project_primal(W, pw).values, pw.values, rtol=0, atol=1e-12)
        np.testing.assert_allclose(project_dual(Z, pz).values, pz.values, rtol=0, atol=1e-12)
        np.testing.assert_allclose(project_combined(W, Z, pi).values, pi.values, rtol=0, atol=1e-12)


def test_projectors_nonexpansive(rng):
    W = quad(np.linspace(-1.2, 1.2, 13), 2.0)
    Z = lip(np.linspace(-1, 1, 11), 1.5)
    for _ in range(20):
        u, v = _random_v(rng), _random_v(rng)
        d = sup_norm_distance(u.values, v.values)
        for proj in (lambda f: project_primal(W, f), lambda f: project_dual(Z, f),
                     lambda f: project_combined(W, Z, f)):
            assert sup_norm_distance(proj(u).values, proj(v).values) <= d + 1e-12


def test_semiconvex_bound_for_abs():
    c, h = 2.0, 0.05
    W = quad(regular_grid(BoxDomain([-1.5], [1.5]), h)[:, 0], c)
    grid = np.linspace(-1, 1, 4 * 40 + 1)[:, None]
    v = GridFunction(grid, np.abs(grid[:, 0]))
    err = sup_norm_distance(project_primal(W, v).values, v.values)
    rho = voronoi_radius(W.centers, BoxDomain([-1.5], [1.5]), h / 10)
    assert err <= semiconvex_projection_bound(c, X.diameter(), rho)


def test_lipschitz_bound_for_parabola():
    a, L, h = 1.5, 1.0, 0.005
    Z = lip(regular_grid(X, h)[:, 0], a)
    grid = np.linspace(-1, 1, 1601)[:, None]
    v = GridFunction(grid, -0.5 * grid[:, 0] ** 2)
    err = sup_norm_distance(project_dual(Z, v).values, v.values)
    rho = voronoi_radius(Z.centers, X, h / 10)
    assert err <= lipschitz_projection_bound(1, a, L, rho)
    with pytest.raises(ValueError):
        lipschitz_projection_bound(1, 0.5, 1.0, rho)


def test_combined_error_below_sum_of_parts():
    t = 1.0
    grid = np.linspace(-1, 1, 801)[:, None]
    v = GridFunction(grid, -0.5 * np.tanh(t) * grid[:, 0] ** 2)
    W = quad(regular_grid(BoxDomain([-2.0], [2.0]), 0.05)[:, 0], 1.0)
    Z = lip(regular_grid(X, 0.05)[:, 0], 1.5)
    e_pi = sup_norm_distance(project_combined(W, Z, v).values, v.values)
    e_z = sup_norm_distance(project_dual(Z, v).values, v.values)
    e_w = sup_norm_distance(project_primal(W, v).values, v.values)
    assert e_pi <= e_z + e_w + 1e-15
