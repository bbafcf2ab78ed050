"""Control problems, lattice grids and Voronoi-radius geometry."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial import cKDTree

from .elements import BoxDomain

BOUNDARY_TOL = 1e-12


class EmptyGridError(ValueError):
    pass


@dataclass(frozen=True)
class BoundMetadata:
    """Regularity constants of the data (any may be ``None`` when unknown).

    ``M_f, L_f``: bound and x-Lipschitz constant of the dynamics;
    ``M_l, L_l``: same for the running reward; ``L``: Lipschitz constant of
    the value function; ``c``: its semiconvexity constant.
    """

    M_f: Optional[float] = None
    L_f: Optional[float] = None
    M_l: Optional[float] = None
    L_l: Optional[float] = None
    L: Optional[float] = None
    c: Optional[float] = None

    def __post_init__(self):
        for name in ("M_f", "L_f", "M_l", "L_l", "L", "c"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise ValueError(f"{name} must be nonnegative")

    @property
    def complete(self) -> bool:
        return all(getattr(self, k) is not None for k in ("M_f", "L_f", "M_l", "L_l"))


@dataclass(frozen=True)
class ControlProblem:
    """Finite-horizon problem ``max ∫ ℓ + φ(x(T))`` described through its Hamiltonian.

    ``hamiltonian(x, p)`` and ``terminal_reward(x)`` are vectorized: points
    and momenta have shape ``(..., n)``.  With ``absorbing_boundary`` the
    Hamiltonian is forced to 0 on the boundary of ``domain`` (the data are
    switched off there so trajectories stay in the box).
    """

    domain: BoxDomain
    element_domain: BoxDomain
    horizon: float
    hamiltonian: Callable
    terminal_reward: Callable
    metadata: BoundMetadata = field(default_factory=BoundMetadata)
    absorbing_boundary: bool = False
    name: str = "custom"

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.domain.dim != self.element_domain.dim:
            raise ValueError("domain and element domain dimensions differ")
        if np.any(self.domain.lo < self.element_domain.lo) or np.any(self.domain.hi > self.element_domain.hi):
            raise ValueError("domain must be contained in the element domain")

    @property
    def dim(self) -> int:
        return self.domain.dim


def hamiltonian_eval(prob: ControlProblem, x, p) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    h = np.asarray(prob.hamiltonian(x, p), dtype=float)
    if prob.absorbing_boundary:
        h = np.where(prob.domain.on_boundary(x, BOUNDARY_TOL), 0.0, h)
    return h


def _axis_lattice(lo, hi, step):
    k0 = math.ceil(lo / step - 1e-9)
    k1 = math.floor(hi / step + 1e-9)
    return step * np.arange(k0, k1 + 1, dtype=float)


def regular_grid(box: BoxDomain, step: float) -> np.ndarray:
    """Points of ``(ℤ step)ⁿ ∩ box`` in lexicographic order, shape ``(m, n)``."""
    if not step > 0:
        raise ValueError("grid step must be positive")
    axes = [_axis_lattice(lo, hi, step) for lo, hi in zip(box.lo, box.hi)]
    if any(ax.size == 0 for ax in axes):
        raise EmptyGridError(f"no lattice point of step {step} in box {box.lo}..{box.hi}")
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def grid_axes(box: BoxDomain, step: float) -> list:
    return [_axis_lattice(lo, hi, step) for lo, hi in zip(box.lo, box.hi)]


@dataclass(frozen=True)
class GridSpec:
    step: float
    box: BoxDomain

    @property
    def points(self) -> np.ndarray:
        return regular_grid(self.box, self.step)


def sample_lattice(X: BoxDomain, step: float) -> np.ndarray:
    """Lattice ``lo + k·step`` on each axis, with ``hi`` appended when missed."""
    axes = []
    for lo, hi in zip(X.lo, X.hi):
        k = int(math.floor((hi - lo) / step + 1e-9))
        ax = lo + step * np.arange(k + 1)
        if hi - ax[-1] > 1e-12:
            ax = np.append(ax, hi)
        axes.append(ax)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def voronoi_radius(P, X: BoxDomain, sample_step: float) -> float:
    """Sampled estimate of ``sup_{x∈X} min_{p∈P} ‖x − p‖₂``.

    Underestimates the true radius by at most ``(√n / 2) · sample_step``.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.shape[0] == 0:
        raise ValueError("point set is empty")
    pts = sample_lattice(X, sample_step)
    dist, _ = cKDTree(P).query(pts)
    return float(dist.max())
