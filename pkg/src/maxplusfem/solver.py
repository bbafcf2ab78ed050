"""Time marching of max-plus finite element coefficients.

``λ^{t+δ} = M \\ (K λ^t)`` from ``λ^0 = W \\ φ``, the Fleming-McEneaney
recursion ``μ^{t+δ} = G μ^t`` and the comparison between the two.
"""
from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import assembly
from .assembly import AssemblyConfig, StiffnessMatrices
from .elements import BasisFamily
from .problem import ControlProblem
from .tropical import (ContractError, NEG_INF, format_float, max_plus_matvec,
                       residual_apply, sup_norm_distance)


class ConfigurationError(ValueError):
    pass


@dataclass
class SolverState:
    lam: np.ndarray
    t: float = 0.0
    index: int = 0
    history: Optional[list] = None


@dataclass(frozen=True)
class RunGrids:
    """``init_points`` cover the state domain (residuation of the terminal
    reward); ``eval_points`` carry the reconstructed value and its error."""

    init_points: np.ndarray
    eval_points: np.ndarray
    init_step: float = float("nan")
    eval_step: float = float("nan")


@dataclass
class RunReport:
    parameters: dict
    eval_points: np.ndarray
    values: np.ndarray
    coefficients: np.ndarray
    linf_error: Optional[float] = None
    timings: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    history: Optional[list] = None
    error_curve: Optional[list] = None

    def to_dict(self) -> dict:
        return {
            "parameters": _jsonable(self.parameters),
            "linf_error": self.linf_error,
            "timings": self.timings,
            "diagnostics": _jsonable(self.diagnostics),
            "error_curve": self.error_curve,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)

    def write_values_csv(self, path) -> None:
        write_grid_csv(path, self.eval_points, self.values)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else ("inf" if v > 0 else "-inf")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_grid_csv(path, points, values) -> None:
    """``x1,...,xn,value`` rows in the given (lexicographic) point order."""
    points = np.atleast_2d(points)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{k + 1}" for k in range(points.shape[1])] + ["value"])
        for x, v in zip(points, values):
            w.writerow([format_float(c) for c in x] + [format_float(v)])


def steps_for(T: float, delta: float) -> int:
    if not delta > 0:
        raise ConfigurationError("time step must be positive")
    n = int(round(T / delta))
    if n < 1 or abs(n * delta - T) > 1e-9:
        raise ConfigurationError(f"time step {delta} does not divide horizon {T}")
    return n


def init_coefficients(W: BasisFamily, phi: Callable, grid) -> np.ndarray:
    """``λ⁰_i = min_{x∈grid} (-w_i(x) + φ(x))``."""
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    if pts.shape[0] == 0:
        raise ConfigurationError("residuation grid is empty")
    return residual_apply(W.values(pts), np.asarray(phi(pts), dtype=float))


def step(state: SolverState, M, K, delta: float = 0.0, workers=None) -> SolverState:
    """One min-max update ``λ'_i = min_j (-M_ji + max_k (K_jk + λ_k))``."""
    if M.shape != K.shape:
        raise ContractError(f"M {M.shape} and K {K.shape} differ")
    lam = residual_apply(M, max_plus_matvec(K, state.lam, workers), workers)
    hist = state.history
    if hist is not None:
        hist = hist + [lam]
    return SolverState(lam, state.t + delta, state.index + 1, hist)


def reconstruct_value(W: BasisFamily, lam, grid, workers=None):
    """``v(x) = max_i (λ_i + w_i(x))`` on ``grid``.

    ``+inf`` coefficients (elements left unconstrained by a truncated band)
    are dropped; returns ``(values, dropped_count)``.
    """
    lam = np.asarray(lam, dtype=float)
    dropped = int(np.count_nonzero(np.isposinf(lam)))
    if dropped:
        lam = np.where(np.isposinf(lam), NEG_INF, lam)
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    vals = np.empty(pts.shape[0])
    chunk = max(1, (1 << 22) // max(1, len(W)))
    for s in range(0, pts.shape[0], chunk):
        vals[s:s + chunk] = max_plus_matvec(W.values(pts[s:s + chunk]), lam, workers)
    return vals, dropped


def _error(values, reference, points, t):
    if reference is None:
        return None
    return sup_norm_distance(values, reference(points, t))


def _params(prob, W, Z, cfg, grids, T, N):
    out = {
        "case": prob.name,
        "T": T,
        "delta": cfg.delta,
        "steps": N,
        "variant": cfg.variant,
        "cutoff": cfg.cutoff,
        "element_kind": W.kind,
        "element_param": W.param,
        "element_count": len(W),
        "init_step": grids.init_step,
        "eval_step": grids.eval_step,
    }
    if Z is not None:
        out.update(test_kind=Z.kind, test_param=Z.param, test_count=len(Z))
    return out


def run(prob: ControlProblem, W: BasisFamily, Z: BasisFamily, cfg: AssemblyConfig,
        grids: RunGrids, reference: Optional[Callable] = None, keep_history=False,
        matrices: Optional[StiffnessMatrices] = None, track_error=False) -> RunReport:
    """Effective max-plus finite element method from ``t = 0`` to the horizon.

    ``reference(points, t)`` is the exact value function when available.
    """
    T = prob.horizon
    N = steps_for(T, cfg.delta)
    timings = {}
    t0 = time.perf_counter()
    if matrices is None:
        matrices = assembly.assemble(Z, W, prob, cfg)
    timings["assembly"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    lam0 = init_coefficients(W, prob.terminal_reward, grids.init_points)
    timings["init"] = time.perf_counter() - t0
    state = SolverState(lam0, 0.0, 0, [lam0] if keep_history else None)
    step_times = []
    curve = [] if track_error else None
    for _ in range(N):
        t0 = time.perf_counter()
        state = step(state, matrices.M, matrices.K, cfg.delta, cfg.workers)
        step_times.append(time.perf_counter() - t0)
        if track_error and reference is not None:
            v, _ = reconstruct_value(W, state.lam, grids.eval_points, cfg.workers)
            curve.append(_error(v, reference, grids.eval_points, (state.index) * cfg.delta))
    timings["steps"] = step_times
    t0 = time.perf_counter()
    values, dropped = reconstruct_value(W, state.lam, grids.eval_points, cfg.workers)
    timings["reconstruct"] = time.perf_counter() - t0
    diag = dict(matrices.diagnostics)
    diag["dropped_infinite_coefficients"] = dropped
    diag["band_truncation"] = bool(np.isfinite(cfg.cutoff))
    return RunReport(
        parameters=_params(prob, W, Z, cfg, grids, T, N),
        eval_points=grids.eval_points,
        values=values,
        coefficients=state.lam,
        linf_error=_error(values, reference, grids.eval_points, T),
        timings=timings,
        diagnostics=diag,
        history=state.history,
        error_curve=curve,
    )


def fm_run(prob: ControlProblem, W: BasisFamily, cfg: AssemblyConfig, grids: RunGrids,
           reference: Optional[Callable] = None, kernel_grid=None, keep_history=False,
           kernel=None, track_error=False) -> RunReport:
    """Fleming-McEneaney recursion ``μ^{t+δ} = G μ^t`` with ``μ⁰ = W \\ φ``."""
    T = prob.horizon
    N = steps_for(T, cfg.delta)
    t0 = time.perf_counter()
    G = kernel if kernel is not None else assembly.assemble_fm_kernel(W, prob, cfg, kernel_grid)
    timings = {"assembly": time.perf_counter() - t0}
    mu = init_coefficients(W, prob.terminal_reward, grids.init_points)
    hist = [mu] if keep_history else None
    curve = [] if track_error else None
    step_times = []
    for n in range(N):
        t0 = time.perf_counter()
        mu = max_plus_matvec(G, mu, cfg.workers)
        step_times.append(time.perf_counter() - t0)
        if hist is not None:
            hist.append(mu)
        if track_error and reference is not None:
            v, _ = reconstruct_value(W, mu, grids.eval_points, cfg.workers)
            curve.append(_error(v, reference, grids.eval_points, (n + 1) * cfg.delta))
    timings["steps"] = step_times
    values, dropped = reconstruct_value(W, mu, grids.eval_points, cfg.workers)
    return RunReport(
        parameters=_params(prob, W, None, cfg, grids, T, N) | {"method": "fleming_mceneaney",
                                                              "kernel": "grid" if kernel_grid is not None else "sampled"},
        eval_points=grids.eval_points,
        values=values,
        coefficients=mu,
        linf_error=_error(values, reference, grids.eval_points, T),
        timings=timings,
        diagnostics={"dropped_infinite_coefficients": dropped,
                     "approximate_sup": kernel_grid is None},
        history=hist,
        error_curve=curve,
    )


@dataclass
class ComparisonReport:
    """Fleming-McEneaney versus the limit-case finite element recursion."""

    times: list
    fm_errors: list
    limit_errors: list
    violations: list
    max_violation: list
    coefficient_violations: list
    fm: RunReport
    limit: RunReport

    @property
    def total_violations(self) -> int:
        return int(sum(self.violations))

    def rows(self):
        for t, ef, el, nv, mv in zip(self.times, self.fm_errors, self.limit_errors,
                                     self.violations, self.max_violation):
            yield {"t": t, "fm_linf_error": ef, "mfem_linf_error": el,
                   "ordering_violations": nv, "max_violation": mv}


def compare_methods(prob: ControlProblem, W: BasisFamily, cfg: AssemblyConfig, grids: RunGrids,
                    reference: Optional[Callable] = None, tol: float = 0.0) -> ComparisonReport:
    """Run both recursions with identical Hamiltonian element images.

    The limit case ``λ^{t+δ} = W \\ ([S^δ W]_H λ^t)`` residuates against the
    images sampled on ``grids.init_points``; the FM kernel uses the same
    points, so ``W μ^t <= W λ^t`` must hold pointwise.  A point counts as a
    violation when ``(Wμ)(x) > (Wλ)(x) + tol``.
    """
    T = prob.horizon
    N = steps_for(T, cfg.delta)
    pts = np.atleast_2d(grids.init_points)
    Wg = W.values(pts)
    Sg = assembly.element_images(W, prob, cfg.delta, pts)
    G = assembly.assemble_fm_kernel(W, prob, cfg, grid=pts)
    lam = residual_apply(Wg, np.asarray(prob.terminal_reward(pts), dtype=float))
    mu = lam.copy()
    times, ef, el, nv, mv, cv = [], [], [], [], [], []
    lam_hist, mu_hist = [lam], [mu]

    def record(t, lam, mu):
        vl, _ = reconstruct_value(W, lam, grids.eval_points, cfg.workers)
        vm, _ = reconstruct_value(W, mu, grids.eval_points, cfg.workers)
        diff = vm - vl
        bad = diff > tol
        times.append(t)
        nv.append(int(np.count_nonzero(bad)))
        mv.append(float(diff.max()) if diff.size else 0.0)
        cv.append(int(np.count_nonzero(mu > lam)))
        ef.append(_error(vm, reference, grids.eval_points, t))
        el.append(_error(vl, reference, grids.eval_points, t))
        return vl, vm

    record(0.0, lam, mu)
    for n in range(N):
        lam = residual_apply(Wg, max_plus_matvec(Sg, lam, cfg.workers), cfg.workers)
        mu = max_plus_matvec(G, mu, cfg.workers)
        lam_hist.append(lam)
        mu_hist.append(mu)
        vl, vm = record((n + 1) * cfg.delta, lam, mu)
    base = _params(prob, W, None, cfg, grids, T, N)
    fm = RunReport(base | {"method": "fleming_mceneaney"}, grids.eval_points, vm, mu,
                   ef[-1], history=mu_hist, error_curve=ef)
    lim = RunReport(base | {"method": "mfem_limit_case"}, grids.eval_points, vl, lam,
                    el[-1], history=lam_hist, error_curve=el)
    return ComparisonReport(times, ef, el, nv, mv, cv, fm, lim)
