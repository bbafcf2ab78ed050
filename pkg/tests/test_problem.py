import numpy as np
import pytest

from maxplusfem.bench import get_case
from maxplusfem.elements import BoxDomain
from maxplusfem.problem import (ControlProblem, EmptyGridError, hamiltonian_eval, regular_grid,
                                voronoi_radius)


def test_regular_grid_examples():
    g = regular_grid(BoxDomain([-1.0], [1.0]), 0.5)
    np.testing.assert_allclose(g[:, 0], [-1, -0.5, 0, 0.5, 1])
    assert regular_grid(BoxDomain.cube(-1.0, 1.0, 2), 1.0).shape == (9, 2)
    np.testing.assert_allclose(regular_grid(BoxDomain([0.1], [0.9]), 0.5)[:, 0], [0.5])


def test_regular_grid_is_lexicographic():
    g = regular_grid(BoxDomain.cube(0.0, 1.0, 2), 0.5)
    assert [tuple(p) for p in g] == sorted(tuple(p) for p in g)


def test_empty_grid():
    with pytest.raises(EmptyGridError):
        regular_grid(BoxDomain([0.1], [0.4]), 0.5)


def test_voronoi_examples():
    X = BoxDomain([-1.0], [1.0])
    assert voronoi_radius([[0.0]], X, 0.01) == pytest.approx(1.0, abs=0.01)
    pts = np.array([-1, -0.5, 0, 0.5, 1.0])[:, None]
    assert voronoi_radius(pts, X, 0.01) == pytest.approx(0.25, abs=0.01)
    X2 = BoxDomain.cube(-1.0, 1.0, 2)
    h = 0.25
    assert voronoi_radius(regular_grid(X2, h), X2, 0.01) <= np.sqrt(2) * h


def test_voronoi_decreases_under_insertion(rng):
    X = BoxDomain.cube(0.0, 1.0, 2)
    P = rng.uniform(0, 1, size=(5, 2))
    r = voronoi_radius(P, X, 0.02)
    for _ in range(5):
        P = np.vstack([P, rng.uniform(0, 1, size=(1, 2))])
        r2 = voronoi_radius(P, X, 0.02)
        assert r2 <= r
        r = r2


def test_hamiltonian_examples():
    assert hamiltonian_eval(get_case("lq1d").problem(), [1.0], [1.0]) == pytest.approx(0.0)
    assert hamiltonian_eval(get_case("falcone1").problem(), [1.0], [1.0]) == pytest.approx(1.0)
    prob = get_case("dist2d").problem()
    assert hamiltonian_eval(prob, [0.2, 0.3], [1.0, -2.0]) == pytest.approx(2.0)


def test_absorbing_boundary_switches_off_hamiltonian():
    prob = get_case("dist2d").problem()
    assert prob.absorbing_boundary
    assert hamiltonian_eval(prob, [1.0, 0.3], [1.0, -2.0]) == 0.0


@pytest.mark.parametrize("name", ["falcone1", "falcone2", "lq1d", "dist1d", "rotation", "riccati2d"])
def test_hamiltonian_convex_in_p(name, rng):
    prob = get_case(name).problem()
    n = prob.dim
    x = rng.uniform(-1, 1, size=(200, n))
    p, q = rng.uniform(-3, 3, size=(2, 200, n))
    mid = hamiltonian_eval(prob, x, (p + q) / 2)
    avg = (hamiltonian_eval(prob, x, p) + hamiltonian_eval(prob, x, q)) / 2
    assert np.all(mid <= avg + 1e-12)


@pytest.mark.parametrize("name", ["falcone1", "falcone2"])
def test_hamiltonian_lipschitz_bounds(name, rng):
    prob = get_case(name).problem()
    m = prob.metadata
    if not m.complete:
        pytest.skip("no regularity constants")
    x, y = rng.uniform(-0.9, 0.9, size=(2, 200, 1))
    p, q = rng.uniform(-2, 2, size=(2, 200, 1))
    dx = np.abs(hamiltonian_eval(prob, x, p) - hamiltonian_eval(prob, y, p))
    assert np.all(dx <= (m.L_l + m.L_f * np.abs(p[:, 0])) * np.abs(x - y)[:, 0] + 1e-12)
    dp = np.abs(hamiltonian_eval(prob, x, p) - hamiltonian_eval(prob, x, q))
    assert np.all(dp <= m.M_f * np.abs(p - q)[:, 0] + 1e-12)


def test_problem_validation():
    X = BoxDomain([-1.0], [1.0])
    with pytest.raises(ValueError):
        ControlProblem(X, X, 0.0, lambda x, p: 0 * p[..., 0], lambda x: 0 * x[..., 0])
    with pytest.raises(ValueError):
        ControlProblem(X, BoxDomain([-0.5], [0.5]), 1.0, lambda x, p: 0 * p[..., 0], lambda x: 0 * x[..., 0])
