"""Benchmark problems with closed-form Hamiltonians and reference value functions.

Each :class:`BenchmarkCase` knows its dynamics, rewards and control set (for
brute-force Hamiltonian checks), its closed-form Hamiltonian, an exact value
function ``v(x, t)``, and the element layout used in the reference
experiments.  :meth:`BenchmarkCase.setup` turns a case plus parameter
overrides into everything :func:`maxplusfem.solver.run` needs.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import solver
from .assembly import K_TILDE, AssemblyConfig
from .elements import LIPSCHITZ, QUADRATIC, BasisFamily, BoxDomain
from .problem import BoundMetadata, ControlProblem, regular_grid, sample_lattice
from .tropical import format_float


class UnknownCase(KeyError):
    pass


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class CaseParams:
    """Discretization parameters; ``None`` means "use the case default"."""

    T: Optional[float] = None
    delta: Optional[float] = None
    dx: Optional[float] = None
    a: Optional[float] = None
    c: Optional[float] = None
    c_test: Optional[float] = None
    test_dx: Optional[float] = None
    variant: Optional[str] = None
    cutoff: Optional[float] = None
    eval_step: Optional[float] = None
    init_step: Optional[float] = None

    def merged(self, other: "CaseParams") -> "CaseParams":
        return replace(self, **{k: v for k, v in other.__dict__.items() if v is not None})


@dataclass
class Setup:
    case: "BenchmarkCase"
    params: CaseParams
    problem: ControlProblem
    W: BasisFamily
    Z: BasisFamily
    cfg: AssemblyConfig
    grids: solver.RunGrids

    def reference(self, points, t):
        return self.case.reference(points, t)


@dataclass(frozen=True)
class BenchmarkCase:
    """One benchmark problem.

    ``element_box`` / ``test_box`` map the resolved parameters to the box
    whose lattice points carry element / test-function centers.
    """

    name: str
    domain: BoxDomain
    hamiltonian: Callable
    terminal_reward: Callable
    value: Callable
    defaults: CaseParams
    element_box: Callable
    test_box: Callable
    test_kind: str
    error_window: BoxDomain
    metadata: BoundMetadata = field(default_factory=BoundMetadata)
    absorbing_boundary: bool = False
    init_box: Optional[BoxDomain] = None
    lagrangian: Optional[Callable] = None
    dynamics: Optional[Callable] = None
    control_box: Optional[BoxDomain] = None
    desk: CaseParams = field(default_factory=CaseParams)
    notes: str = ""

    @property
    def dim(self) -> int:
        return self.domain.dim

    def problem(self, T: Optional[float] = None, params: Optional[CaseParams] = None) -> ControlProblem:
        T = T if T is not None else self.defaults.T
        p = params or self.defaults
        ebox = self.element_box(p)
        hull = BoxDomain(np.minimum(ebox.lo, self.domain.lo), np.maximum(ebox.hi, self.domain.hi))
        return ControlProblem(self.domain, hull, T, self.hamiltonian, self.terminal_reward,
                              self.metadata, self.absorbing_boundary, self.name)

    def reference(self, points, t):
        return self.value(np.atleast_2d(np.asarray(points, dtype=float)), float(t))

    def resolve(self, overrides: Optional[CaseParams] = None, scale: str = "full") -> CaseParams:
        p = self.defaults
        if scale == "desk":
            p = p.merged(self.desk)
        elif scale != "full":
            raise ValueError(f"unknown scale {scale!r}")
        if overrides is not None:
            p = p.merged(overrides)
        if p.eval_step is None:
            p = replace(p, eval_step=p.dx / (4 if self.dim == 1 else 2))
        if p.init_step is None:
            p = replace(p, init_step=p.dx / (2 if self.dim == 1 else 1))
        if p.test_dx is None:
            p = replace(p, test_dx=p.dx)
        if p.variant is None:
            p = replace(p, variant=K_TILDE)
        if p.cutoff is None:
            p = replace(p, cutoff=math.inf)
        return p

    def setup(self, overrides: Optional[CaseParams] = None, scale: str = "full",
              workers: Optional[int] = None, **kw) -> Setup:
        if kw:
            overrides = (overrides or CaseParams()).merged(CaseParams(**kw))
        p = self.resolve(overrides, scale)
        prob = self.problem(p.T, p)
        W = BasisFamily(QUADRATIC, regular_grid(self.element_box(p), p.dx), p.c)
        tparam = p.a if self.test_kind == LIPSCHITZ else (p.c_test if p.c_test is not None else p.c)
        Z = BasisFamily(self.test_kind, regular_grid(self.test_box(p), p.test_dx), tparam)
        cfg = AssemblyConfig(delta=p.delta, variant=p.variant, cutoff=p.cutoff, workers=workers)
        init_box = self.init_box if self.init_box is not None else self.domain
        grids = solver.RunGrids(
            init_points=sample_lattice(init_box, p.init_step),
            eval_points=sample_lattice(self.error_window, p.eval_step),
            init_step=p.init_step,
            eval_step=p.eval_step,
        )
        return Setup(self, p, prob, W, Z, cfg, grids)


# --- closed-form data -----------------------------------------------------------

def _x(points, k=0):
    return points[..., k]


def _falcone1_h(x, p):
    x, p = x[..., 0], p[..., 0]
    return x + np.maximum(0.0, -x * p)


def _falcone1_v(x, t):
    x = x[..., 0]
    return np.where(x > 0, x * t, x * (1.0 - math.exp(-t)))


def _falcone2_h(x, p):
    s = 1.0 - np.abs(x[..., 0])
    return -3.0 * s + s * np.abs(p[..., 0])


def _falcone2_v(x, t):
    return -3.0 * (1.0 - np.abs(x[..., 0])) * (1.0 - math.exp(-t))


def _lq_h(x, p):
    return -0.5 * np.sum(x * x, axis=-1) + 0.5 * np.sum(p * p, axis=-1)


def _lq_v(x, t):
    return -0.5 * math.tanh(t) * np.sum(x * x, axis=-1)


def _dist_h(x, p):
    return -1.0 + np.sum(np.abs(p), axis=-1)


def _dist_v(x, t):
    return np.maximum(-t, np.max(np.abs(x), axis=-1) - 1.0)


def _rotation_h(x, p):
    return -p[..., 0] * x[..., 1] + p[..., 1] * x[..., 0]


def _rotation_phi(x):
    return -0.5 * x[..., 0] ** 2 - 1.5 * x[..., 1] ** 2


def _rotation_v(x, t):
    x1, x2 = x[..., 0], x[..., 1]
    s, c = math.sin(t), math.cos(t)
    return -0.5 * (-x2 * s + x1 * c) ** 2 - 1.5 * (x2 * c + x1 * s) ** 2


def _riccati_h(x, p):
    return -x[..., 0] ** 2 + p[..., 0] * x[..., 1] + 0.5 * p[..., 1] ** 2


def _riccati_phi(x):
    return -x[..., 0] ** 2 - 2.0 * x[..., 1] ** 2


def _zero(x):
    return np.zeros(np.asarray(x).shape[:-1])


# --- Riccati oracles ------------------------------------------------------------

def _rk4(f, y0, T, steps):
    y = np.array(y0, dtype=float)
    if T == 0:
        return y
    h = T / steps
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


class RiccatiValue:
    """``v(x, t) = -½ xᵀ P(t) x`` for dynamics ``Ax + Bu``, reward
    ``-½(xᵀQx + uᵀRu)`` and terminal reward ``-½ xᵀ Qf x``.

    ``P' = Q + PA + AᵀP − P B R⁻¹ Bᵀ P``, ``P(0) = Qf``, integrated by
    classical RK4 with ``steps`` steps per unit of ``T``.
    """

    def __init__(self, A, B, Q, R, Qf, T, steps=1000):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.B = np.asarray(B, dtype=float).reshape(self.A.shape[0], -1)
        self.Q = np.atleast_2d(np.asarray(Q, dtype=float))
        R = np.atleast_2d(np.asarray(R, dtype=float))
        if steps < 100:
            raise ValueError("at least 100 integration steps are required")
        try:
            np.linalg.cholesky(R)
        except np.linalg.LinAlgError:
            raise ValueError("control weight R must be positive definite") from None
        self.Rinv = np.linalg.inv(R)
        self.Qf = np.atleast_2d(np.asarray(Qf, dtype=float))
        self.T = float(T)
        self.steps = int(steps)
        self._cache = {}

    def _rhs(self, P):
        BRB = self.B @ self.Rinv @ self.B.T
        return self.Q + P @ self.A + self.A.T @ P - P @ BRB @ P

    def P(self, t: float) -> np.ndarray:
        t = float(t)
        if t not in self._cache:
            n = max(1, int(math.ceil(self.steps * t / self.T))) if self.T > 0 else 1
            self._cache[t] = _rk4(self._rhs, self.Qf, t, n)
        return self._cache[t]

    def __call__(self, points, t):
        x = np.atleast_2d(np.asarray(points, dtype=float))
        P = self.P(t)
        return -0.5 * np.einsum("mi,ij,mj->m", x, P, x)


def riccati_reference(A, B, Q, R, Qf, T, steps=1000) -> RiccatiValue:
    return RiccatiValue(A, B, Q, R, Qf, T, steps)


class AffineRiccatiValue:
    """Exact semigroup image of a non-centered quadratic for linear-quadratic data.

    ``v(x, t) = -½ xᵀP x + qᵀx + r`` with ``P' = Q + PA + AᵀP − PBR⁻¹BᵀP``,
    ``q' = (A − BR⁻¹BᵀP)ᵀ q``, ``r' = ½ qᵀBR⁻¹Bᵀq``.
    """

    def __init__(self, A, B, Q, R, P0, q0, r0, steps_per_unit=2000):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        n = self.A.shape[0]
        self.B = np.asarray(B, dtype=float).reshape(n, -1)
        self.Q = np.atleast_2d(np.asarray(Q, dtype=float))
        self.Rinv = np.linalg.inv(np.atleast_2d(np.asarray(R, dtype=float)))
        self.y0 = np.concatenate([np.atleast_2d(P0).ravel(), np.atleast_1d(q0), [r0]]).astype(float)
        self.n = n
        self.steps_per_unit = steps_per_unit

    def _rhs(self, y):
        n = self.n
        P = y[:n * n].reshape(n, n)
        q = y[n * n:n * n + n]
        BRB = self.B @ self.Rinv @ self.B.T
        dP = self.Q + P @ self.A + self.A.T @ P - P @ BRB @ P
        dq = (self.A - BRB @ P).T @ q
        dr = 0.5 * q @ BRB @ q
        return np.concatenate([dP.ravel(), dq, [dr]])

    def coefficients(self, t):
        n = self.n
        steps = max(100, int(math.ceil(self.steps_per_unit * t)))
        y = _rk4(self._rhs, self.y0, t, steps)
        return y[:n * n].reshape(n, n), y[n * n:n * n + n], y[-1]

    def __call__(self, points, t):
        P, q, r = self.coefficients(t)
        x = np.atleast_2d(np.asarray(points, dtype=float))
        return -0.5 * np.einsum("mi,ij,mj->m", x, P, x) + x @ q + r


def lq_semigroup_image(center, c, t, dim=1):
    """Exact ``S^t w`` for ``w = -(c/2)‖x − x̂‖²`` under the LQ problem
    ``ℓ = -½(‖x‖² + ‖u‖²)``, ``f = u`` on the whole space."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    I = np.eye(dim)
    return AffineRiccatiValue(np.zeros((dim, dim)), I, I, I, c * I, c * center,
                              -0.5 * c * float(center @ center))


def _riccati2d_value():
    return riccati_reference([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]], np.diag([2.0, 0.0]),
                             [[1.0]], np.diag([2.0, 4.0]), 1.0, steps=2000)


# --- catalog --------------------------------------------------------------------

def _fixed(lo, hi, dim=1):
    box = BoxDomain.cube(lo, hi, dim)
    return lambda p: box


def _enlarged(X: BoxDomain, L: float):
    return lambda p: X.enlarge(L / p.c)


_I1 = BoxDomain([-1.0], [1.0])
_I2 = BoxDomain.cube(-1.0, 1.0, 2)
_R2 = BoxDomain([-np.inf] * 2, [np.inf] * 2)
_RIC = _riccati2d_value()


def _catalog():
    cases = {}
    cases["falcone1"] = BenchmarkCase(
        name="falcone1", domain=_I1, hamiltonian=_falcone1_h, terminal_reward=_zero, value=_falcone1_v,
        defaults=CaseParams(T=1.0, delta=0.01, dx=0.005, a=1.5, c=1.0),
        element_box=_fixed(-2, 2), test_box=lambda p: _I1, test_kind=LIPSCHITZ, error_window=_I1,
        metadata=BoundMetadata(M_f=1.0, L_f=1.0, M_l=1.0, L_l=1.0, L=1.0, c=0.0),
        lagrangian=lambda x, u: x[..., 0] + 0 * u[..., 0],
        dynamics=lambda x, u: -x * u,
        control_box=BoxDomain([0.0], [1.0]),
        desk=CaseParams(delta=0.02, dx=0.01),
    )
    cases["falcone2"] = BenchmarkCase(
        name="falcone2", domain=_I1, hamiltonian=_falcone2_h, terminal_reward=_zero, value=_falcone2_v,
        defaults=CaseParams(T=1.0, delta=0.02, dx=0.01, a=2.0, c=8.0),
        element_box=_enlarged(_I1, 3.0), test_box=lambda p: _I1, test_kind=LIPSCHITZ, error_window=_I1,
        metadata=BoundMetadata(M_f=1.0, L_f=1.0, M_l=3.0, L_l=3.0, L=3.0, c=0.0),
        lagrangian=lambda x, u: -3.0 * (1.0 - np.abs(x[..., 0])) + 0 * u[..., 0],
        dynamics=lambda x, u: u * (1.0 - np.abs(x)),
        control_box=BoxDomain([-1.0], [1.0]),
        desk=CaseParams(delta=0.02, dx=0.01),
    )
    cases["lq1d"] = BenchmarkCase(
        name="lq1d", domain=BoxDomain([-5.0], [5.0]), hamiltonian=_lq_h, terminal_reward=_zero,
        value=_lq_v, defaults=CaseParams(T=5.0, delta=0.5, dx=0.05, c=1.0),
        element_box=_fixed(-6, 6), test_box=_fixed(-6, 6), test_kind=QUADRATIC, error_window=_I1,
        metadata=BoundMetadata(L=5.0, c=1.0),
        lagrangian=lambda x, u: -0.5 * (x[..., 0] ** 2 + u[..., 0] ** 2),
        dynamics=lambda x, u: u + 0 * x,
        control_box=BoxDomain([-20.0], [20.0]),
        desk=CaseParams(delta=0.5, dx=0.05),
    )
    cases["dist1d"] = BenchmarkCase(
        name="dist1d", domain=_I1, hamiltonian=_dist_h, terminal_reward=_zero, value=_dist_v,
        defaults=CaseParams(T=1.0, delta=0.02, dx=0.01, a=1.1, c=2.0),
        element_box=_enlarged(_I1, 1.0), test_box=lambda p: _I1, test_kind=LIPSCHITZ, error_window=_I1,
        metadata=BoundMetadata(M_f=1.0, M_l=1.0, L=1.0, c=0.0), absorbing_boundary=True,
        lagrangian=lambda x, u: -1.0 + 0 * u[..., 0],
        dynamics=lambda x, u: u + 0 * x,
        control_box=BoxDomain([-1.0], [1.0]),
        desk=CaseParams(delta=0.02, dx=0.01),
    )
    cases["dist1d_bad"] = BenchmarkCase(
        name="dist1d_bad", domain=_I1, hamiltonian=_dist_h, terminal_reward=_zero, value=_dist_v,
        defaults=CaseParams(T=1.0, delta=0.02, dx=0.01, c=2.0),
        element_box=_enlarged(_I1, 1.0), test_box=_enlarged(_I1, 1.0), test_kind=QUADRATIC,
        error_window=_I1,
        metadata=BoundMetadata(M_f=1.0, M_l=1.0, L=1.0, c=0.0), absorbing_boundary=True,
        lagrangian=lambda x, u: -1.0 + 0 * u[..., 0],
        dynamics=lambda x, u: u + 0 * x,
        control_box=BoxDomain([-1.0], [1.0]),
        desk=CaseParams(delta=0.02, dx=0.01),
        notes="quadratic test functions; the error is not expected to vanish",
    )
    cases["lq2d"] = BenchmarkCase(
        name="lq2d", domain=BoxDomain.cube(-5.0, 5.0, 2), hamiltonian=_lq_h, terminal_reward=_zero,
        value=_lq_v, defaults=CaseParams(T=5.0, delta=0.5, dx=0.1, c=1.0, cutoff=1.0),
        element_box=_fixed(-6, 6, 2), test_box=_fixed(-6, 6, 2), test_kind=QUADRATIC, error_window=_I2,
        metadata=BoundMetadata(L=5.0 * math.sqrt(2), c=1.0),
        init_box=BoxDomain.cube(-5.0, 5.0, 2),
        lagrangian=lambda x, u: -0.5 * (np.sum(x * x, -1) + np.sum(u * u, -1)),
        dynamics=lambda x, u: u + 0 * x,
        control_box=BoxDomain.cube(-20.0, 20.0, 2),
        desk=CaseParams(delta=0.5, dx=0.25),
    )
    cases["dist2d"] = BenchmarkCase(
        name="dist2d", domain=_I2, hamiltonian=_dist_h, terminal_reward=_zero, value=_dist_v,
        defaults=CaseParams(T=1.0, delta=0.05, dx=0.025, a=3.0, c=1.0),
        element_box=_fixed(-3, 3, 2), test_box=lambda p: _I2, test_kind=LIPSCHITZ, error_window=_I2,
        metadata=BoundMetadata(M_f=math.sqrt(2), M_l=1.0, L=1.0, c=0.0), absorbing_boundary=True,
        lagrangian=lambda x, u: -1.0 + 0 * u[..., 0],
        dynamics=lambda x, u: u + 0 * x,
        control_box=BoxDomain.cube(-1.0, 1.0, 2),
        desk=CaseParams(delta=0.1, dx=0.1, cutoff=1.5),
    )
    cases["rotation"] = BenchmarkCase(
        name="rotation", domain=_R2, hamiltonian=_rotation_h, terminal_reward=_rotation_phi,
        value=_rotation_v, defaults=CaseParams(T=1.0, delta=0.05, dx=0.05, c=4.0, c_test=3.0),
        element_box=_fixed(-2, 2, 2), test_box=_fixed(-2, 2, 2), test_kind=QUADRATIC,
        error_window=BoxDomain.cube(-math.sqrt(0.5), math.sqrt(0.5), 2),
        init_box=BoxDomain.cube(-2.0, 2.0, 2),
        metadata=BoundMetadata(M_f=math.sqrt(2), L_f=1.0, M_l=0.0, L_l=0.0, L=3 * math.sqrt(2), c=3.0),
        lagrangian=lambda x, u: 0.0 * x[..., 0],
        dynamics=lambda x, u: np.stack([-x[..., 1], x[..., 0]], axis=-1) + 0 * u[..., :1],
        control_box=BoxDomain([0.0], [0.0]),
        desk=CaseParams(delta=0.05, dx=0.05),
        notes="the rotation is a global flow, so sups run over the whole plane; error measured on the square inscribed in the unit disc",
    )
    cases["riccati2d"] = BenchmarkCase(
        name="riccati2d", domain=_R2, hamiltonian=_riccati_h,
        terminal_reward=_riccati_phi, value=lambda x, t: _RIC(x, t),
        defaults=CaseParams(T=1.0, delta=0.05, dx=0.025, c=10.0, c_test=1.0),
        element_box=_fixed(-2, 2, 2), test_box=_fixed(-11, 11, 2), test_kind=QUADRATIC,
        error_window=_I2, init_box=BoxDomain.cube(-4.0, 4.0, 2),
        metadata=BoundMetadata(c=4.0),
        lagrangian=lambda x, u: -x[..., 0] ** 2 - 0.5 * u[..., 0] ** 2,
        dynamics=lambda x, u: np.stack([x[..., 1], u[..., 0] + 0 * x[..., 0]], axis=-1),
        control_box=BoxDomain([-40.0], [40.0]),
        desk=CaseParams(delta=0.05, dx=0.05, test_dx=0.25),
        notes="unbounded state space; sups are unconstrained",
    )
    return cases


CASES = _catalog()


def get_case(name: str) -> BenchmarkCase:
    try:
        return CASES[name]
    except KeyError:
        raise UnknownCase(name) from None


def register_case(case: BenchmarkCase) -> None:
    CASES[case.name] = case


def reference_value(case: BenchmarkCase, x, t, T: Optional[float] = None) -> np.ndarray:
    """Exact value ``v(x, t)``; raises :class:`DomainError` outside ``X × [0, T]``."""
    T = case.defaults.T if T is None else T
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if not np.all(case.domain.contains(x, 1e-12)):
        raise DomainError("point outside the state domain")
    if t < 0 or t > T + 1e-12:
        raise DomainError(f"time {t} outside [0, {T}]")
    return case.reference(x, t)


def linf_error(values, case: BenchmarkCase, t: float, points) -> float:
    from .tropical import sup_norm_distance
    return sup_norm_distance(values, case.reference(points, t))


def brute_force_hamiltonian(case: BenchmarkCase, x, p, u_step=1e-3) -> np.ndarray:
    """``sup_u ℓ(x,u) + p·f(x,u)`` over a lattice of the control box (test oracle)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    p = np.atleast_2d(np.asarray(p, dtype=float))
    U = sample_lattice(case.control_box, u_step) if np.any(case.control_box.extent > 0) \
        else case.control_box.lo[None, :]
    out = np.empty(x.shape[0])
    for m in range(x.shape[0]):
        xm = np.broadcast_to(x[m], (U.shape[0], x.shape[1]))
        val = case.lagrangian(xm, U) + np.sum(p[m] * case.dynamics(xm, U), axis=-1)
        out[m] = val.max()
    if case.absorbing_boundary:
        out = np.where(case.domain.on_boundary(x), 0.0, out)
    return out


def run_case(name_or_case, scale="full", workers=None, keep_history=False, **overrides) -> solver.RunReport:
    case = get_case(name_or_case) if isinstance(name_or_case, str) else name_or_case
    s = case.setup(CaseParams(**overrides), scale=scale, workers=workers)
    t0 = time.perf_counter()
    rep = solver.run(s.problem, s.W, s.Z, s.cfg, s.grids, s.reference, keep_history=keep_history)
    rep.timings["total"] = time.perf_counter() - t0
    rep.parameters.update(dx=s.params.dx, test_dx=s.params.test_dx, a=s.params.a, c=s.params.c,
                          c_test=s.params.c_test)
    return rep


# --- convergence studies ----------------------------------------------------------

def dx_rule_for(variant: str) -> Callable[[float], float]:
    """Default space step as a function of the time step."""
    if variant in ("k_h", "k_dual"):
        return lambda d: d ** 2
    return lambda d: d ** 1.5


@dataclass
class ConvergenceTable:
    case: str
    variant: str
    rows: list
    slope: Optional[float]

    def write_csv(self, path) -> None:
        write_results_csv(path, self.rows)


def convergence_study(case, deltas, dx_rule: Optional[Callable] = None, variant: str = K_TILDE,
                      T: Optional[float] = None, workers=None, **overrides) -> ConvergenceTable:
    """Solve for each δ with ``Δx = dx_rule(δ)``; fit the log-log slope of error vs δ."""
    case = get_case(case) if isinstance(case, str) else case
    rule = dx_rule or dx_rule_for(variant)
    rows = []
    for d in deltas:
        t0 = time.perf_counter()
        rep = run_case(case, workers=workers, T=T, delta=d, dx=rule(d), variant=variant, **overrides)
        rows.append({
            "case": case.name, "delta": d, "dx": rep.parameters["dx"], "a": rep.parameters["a"],
            "c": rep.parameters["c"], "variant": variant, "linf_error": rep.linf_error,
            "seconds": time.perf_counter() - t0,
        })
    slope = None
    if len(rows) >= 2:
        ld = np.log([r["delta"] for r in rows])
        le = np.log([max(r["linf_error"], 1e-300) for r in rows])
        slope = float(np.polyfit(ld, le, 1)[0])
    return ConvergenceTable(case.name, variant, rows, slope)


RESULT_COLUMNS = ("case", "delta", "dx", "a", "c", "variant", "linf_error", "seconds")


def write_results_csv(path, rows) -> None:
    """Benchmark table ``case,delta,dx,a,c,variant,linf_error,seconds``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_COLUMNS)
        for r in rows:
            out = []
            for k in RESULT_COLUMNS:
                v = r.get(k)
                if isinstance(v, float):
                    out.append(format_float(v))
                else:
                    out.append("" if v is None else v)
            w.writerow(out)
