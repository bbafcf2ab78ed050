"""Linear-quadratic problem in one dimension, assembled by hand.

Reward -(x² + u²)/2, dynamics x' = u, zero terminal reward.  The value
function is -tanh(t) x²/2, so every quantity below can be checked.
"""
import numpy as np

from maxplusfem import (AssemblyConfig, BasisFamily, BoxDomain, ControlProblem, RunGrids,
                        SolverState, assemble, init_coefficients, reconstruct_value,
                        regular_grid, sample_lattice, step, sup_norm_distance)

X = BoxDomain([-5.0], [5.0])
T, delta, dx, c = 5.0, 0.5, 0.05, 1.0


def hamiltonian(x, p):
    return -0.5 * np.sum(x * x, -1) + 0.5 * np.sum(p * p, -1)


prob = ControlProblem(X, BoxDomain([-6.0], [6.0]), T, hamiltonian,
                      lambda x: np.zeros(np.shape(x)[:-1]), name="lq1d")

# quadratic trial and test functions centered on the same lattice
centers = regular_grid(BoxDomain([-6.0], [6.0]), dx)
W = BasisFamily.quadratic(centers, c)
Z = W
print(f"{len(W)} elements, step {dx}")

mats = assemble(Z, W, prob, AssemblyConfig(delta=delta))
inside = X.contains(centers)
print("mass diagonal zero for centers in X:", bool(np.all(np.diag(mats.M)[inside] == 0)))
print("largest diagonal gap outside X:", float(-np.diag(mats.M)[~inside].min()))

grids = RunGrids(sample_lattice(X, dx / 2), sample_lattice(BoxDomain([-1.0], [1.0]), dx / 4))
state = SolverState(init_coefficients(W, prob.terminal_reward, grids.init_points))

print(f"{'t':>5}  {'error on [-1,1]':>16}")
while state.index < round(T / delta):
    state = step(state, mats.M, mats.K, delta)
    v, _ = reconstruct_value(W, state.lam, grids.eval_points)
    exact = -0.5 * np.tanh(state.t) * grids.eval_points[:, 0] ** 2
    print(f"{state.t:5.1f}  {sup_norm_distance(v, exact):16.3e}")

# the error shrinks as v approaches the stationary -x²/2, which is itself an element
