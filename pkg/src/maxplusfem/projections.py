"""Max-plus and min-plus projectors on sampled functions.

Functions are represented by their values on a finite grid, so every
supremum over the domain becomes a maximum over grid points.  Use an
evaluation grid noticeably finer than the element grids when the goal is
to measure projection errors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elements import BasisFamily
from .tropical import max_plus_matvec, residual_apply


@dataclass(frozen=True)
class GridFunction:
    """Values of a function on a list of points.

    Attributes
    ----------
    grid : ndarray, shape (m, n)
    values : ndarray, shape (m,)
        Finite or ``-inf``.
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim == 1:
            grid = grid[:, None]
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if grid.shape[0] == 0:
            raise ValueError("grid is empty")
        if values.shape[0] != grid.shape[0]:
            raise ValueError(f"{values.shape[0]} values for {grid.shape[0]} grid points")
        if np.any(np.isnan(values)) or np.any(values == np.inf):
            raise ValueError("values must be finite or -inf")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, f, grid) -> "GridFunction":
        grid = np.asarray(grid, dtype=float)
        if grid.ndim == 1:
            grid = grid[:, None]
        return cls(grid, f(grid))

    def __len__(self):
        return self.values.shape[0]

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)


def primal_coefficients(W: BasisFamily, v: GridFunction, workers=None) -> np.ndarray:
    """Largest ``λ`` with ``max_i w_i + λ_i ≤ v`` on the grid: ``λ_i = min_x (v(x) − w_i(x))``."""
    return residual_apply(W.values(v.grid), v.values, workers)


def project_primal(W: BasisFamily, v: GridFunction, workers=None) -> GridFunction:
    """Max-plus projection ``P_W v = max_i (w_i + λ_i)``; below ``v`` on the grid."""
    Wv = W.values(v.grid)
    lam = residual_apply(Wv, v.values, workers)
    return v.with_values(max_plus_matvec(Wv, lam, workers))


def dual_coefficients(Z: BasisFamily, v: GridFunction, workers=None) -> np.ndarray:
    """Sampled scalar products ``μ_j = max_x (z_j(x) + v(x))``."""
    return max_plus_matvec(Z.values(v.grid).T, v.values, workers)


def project_dual(Z: BasisFamily, v: GridFunction, workers=None) -> GridFunction:
    """Min-plus projection ``min_j (−z_j + μ_j)``; above ``v`` on the grid."""
    Zv = Z.values(v.grid)
    mu = max_plus_matvec(Zv.T, v.values, workers)
    return v.with_values(residual_apply(Zv.T, mu, workers))


def project_combined(W: BasisFamily, Z: BasisFamily, v: GridFunction, workers=None) -> GridFunction:
    """``Π v = P_W (P^{−Z} v)``, the projection on the span of ``W`` parallel to the test kernel."""
    return project_primal(W, project_dual(Z, v, workers), workers)


def semiconvex_projection_bound(c: float, diameter: float, radius: float) -> float:
    """Bound ``c · diam(X) · ρ`` on ``‖v − P_W v‖∞`` for a c-semiconvex Lipschitz ``v``.

    ``radius`` is the covering radius of the element centers over the
    enlarged domain.
    """
    return c * diameter * radius


def lipschitz_projection_bound(dim: int, a: float, L: float, radius: float) -> float:
    """Bound ``n (a + L) ρ`` on ``‖P^{−Z} v − v‖∞`` for Lipschitz test cones with slope ``a ≥ L``."""
    if a < L:
        raise ValueError("the cone slope must dominate the Lipschitz constant")
    return dim * (a + L) * radius
