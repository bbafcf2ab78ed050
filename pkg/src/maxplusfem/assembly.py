"""Assembly of the mass matrix, the stiffness-matrix approximations and the
Fleming-McEneaney kernel.

Rows index test functions ``z_j``, columns index finite elements ``w_i``.
Every entry depends only on its own pair of elements, so blocks of rows are
computed independently and the result does not depend on the worker count.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import tropical
from .elements import (BasisFamily, BoxDomain, UnsupportedOperation, batched_sup,
                       evaluate, family_sup, gradient)
from .problem import ControlProblem, hamiltonian_eval
from .tropical import BandMatrix, center_pairs

K_H = "k_h"
K_TILDE = "k_tilde"
K_DUAL = "k_dual"
K_DUAL_TILDE = "k_dual_tilde"
VARIANTS = (K_H, K_TILDE, K_DUAL, K_DUAL_TILDE)

_PAIR_CHUNK = 1 << 16


@dataclass(frozen=True)
class AssemblyConfig:
    delta: float
    variant: str = K_TILDE
    coarse_step: Optional[float] = None
    refine_tol: float = 1e-9
    cutoff: float = np.inf
    workers: Optional[int] = None

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("time step must be nonnegative")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if not self.refine_tol > 0:
            raise ValueError("refine_tol must be positive")
        if not self.cutoff > 0:
            raise ValueError("cutoff radius must be positive")

    def coarse_for(self, X: BoxDomain) -> float:
        if self.coarse_step is not None:
            return self.coarse_step
        ext = X.extent[X.extent > 0]
        return float(ext.min()) / 20.0 if ext.size else 1.0


@dataclass
class StiffnessMatrices:
    M: object
    K: object
    variant: str
    diagnostics: dict = field(default_factory=dict)


def approx_semigroup_image(w, prob: ControlProblem, delta: float):
    """``x ↦ w(x) + δ H(x, ∇w(x))`` for a quadratic element ``w``."""
    if w.kind != "quadratic":
        raise UnsupportedOperation("the Hamiltonian image needs a differentiable element")

    def image(x):
        x = np.asarray(x, dtype=float)
        return evaluate(w, x) + delta * hamiltonian_eval(prob, x, gradient(w, x))

    return image


def element_images(W: BasisFamily, prob: ControlProblem, delta: float, points) -> np.ndarray:
    """Matrix ``[S^δ w_k]_H(x_m)`` of shape ``(m, p)``."""
    if not W.differentiable:
        raise UnsupportedOperation("the Hamiltonian image needs a differentiable element")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = W.values(pts)
    if delta == 0:
        return out
    for k in range(len(W)):
        g = -W.param * (pts - W.centers[k])
        out[:, k] += delta * hamiltonian_eval(prob, pts, g)
    return out


def _pair_chunks(Z, W, cutoff):
    """Yield ``(rows, cols)`` index chunks, all pairs or those within ``cutoff``."""
    q, p = len(Z), len(W)
    if np.isinf(cutoff):
        step = max(1, _PAIR_CHUNK // max(p, 1))
        for s in range(0, q, step):
            e = min(q, s + step)
            yield np.repeat(np.arange(s, e), p), np.tile(np.arange(p), e - s)
    else:
        rows, cols = center_pairs(Z.centers, W.centers, cutoff)
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        for s in range(0, rows.size, _PAIR_CHUNK):
            yield rows[s:s + _PAIR_CHUNK], cols[s:s + _PAIR_CHUNK]


def _assemble(Z, W, cutoff, entry_fn, workers=None):
    """Fill a dense or band matrix from ``entry_fn(rows, cols) -> (values, diag)``."""
    q, p = len(Z), len(W)
    chunks = list(_pair_chunks(Z, W, cutoff))
    results = tropical._run(lambda rc: entry_fn(*rc), chunks, workers)
    diag = {}
    for _, d in results:
        for k, v in d.items():
            diag[k] = diag.get(k, 0) + v
    if np.isinf(cutoff):
        out = np.empty((q, p))
        for (r, c), (vals, _) in zip(chunks, results):
            out[r, c] = vals
        diag["truncated"] = 0
        return out, diag
    rows = np.concatenate([r for r, _ in chunks]) if chunks else np.zeros(0, np.int64)
    cols = np.concatenate([c for _, c in chunks]) if chunks else np.zeros(0, np.int64)
    vals = np.concatenate([v for v, _ in results]) if results else np.zeros(0)
    truncated = q * p - rows.size
    diag["truncated"] = int(truncated)
    return BandMatrix.from_triplets(rows, cols, vals, (q, p), cutoff, truncated), diag


def assemble_mass(Z: BasisFamily, W: BasisFamily, X: BoxDomain, cutoff=np.inf, workers=None):
    """``M_ji = ⟨z_j, w_i⟩`` in closed form. Returns ``(M, diagnostics)``."""

    def entries(rows, cols):
        vals, pts, tie = family_sup(Z, W, X, rows, cols)
        return vals, {"ties": int(tie.sum())}

    return _assemble(Z, W, cutoff, entries, workers)


def _tilde_entries(Z, W, prob, delta, dual):
    X = prob.domain

    def entries(rows, cols):
        vals, pts, tie = family_sup(Z, W, X, rows, cols)
        if dual:
            p = -Z.gradients(pts, rows)
        else:
            p = W.gradients(pts, cols)
        k = vals + delta * hamiltonian_eval(prob, pts, p) if delta else vals.copy()
        clamped = int(np.count_nonzero(X.on_boundary(pts))) if X.bounded else 0
        return k, {"ties": int(tie.sum()), "boundary_clamped": clamped}

    return entries


def _h_entries(Z, W, prob, cfg, dual):
    X = prob.domain
    delta = cfg.delta
    coarse = cfg.coarse_for(X)

    def entries(rows, cols):
        base, seeds, tie = family_sup(Z, W, X, rows, cols)
        if delta == 0:
            return base, {"ties": int(tie.sum()), "moved": 0}

        def objective(x):
            zv = Z.values(x, rows)
            wv = W.values(x, cols)
            p = -Z.gradients(x, rows) if dual else W.gradients(x, cols)
            return zv + wv + delta * hamiltonian_eval(prob, x, p)

        vals, arg = batched_sup(objective, X, seeds, coarse, cfg.refine_tol)
        moved = int(np.count_nonzero(np.linalg.norm(arg - seeds, axis=1) > coarse))
        return vals, {"ties": int(tie.sum()), "moved": moved}

    return entries


def assemble_stiffness_tilde(Z, W, prob: ControlProblem, cfg: AssemblyConfig):
    """``K̃_ji = ⟨z_j, w_i⟩ + δ H(x*, ∇w_i(x*))`` at the pair's argmax ``x*``."""
    if not W.differentiable:
        raise UnsupportedOperation("k_tilde needs quadratic finite elements; use k_dual_tilde")
    return _assemble(Z, W, cfg.cutoff, _tilde_entries(Z, W, prob, cfg.delta, False), cfg.workers)


def assemble_stiffness_H(Z, W, prob: ControlProblem, cfg: AssemblyConfig):
    """``K_ji = sup_x z_j + w_i + δ H(x, ∇w_i(x))`` by seeded sampling search."""
    if not W.differentiable:
        raise UnsupportedOperation("k_h needs quadratic finite elements; use k_dual")
    return _assemble(Z, W, cfg.cutoff, _h_entries(Z, W, prob, cfg, False), cfg.workers)


def assemble_stiffness_dual(Z, W, prob: ControlProblem, cfg: AssemblyConfig, tilde=False):
    """Dual approximation with momentum ``-∇z_j``; ``tilde`` evaluates at the argmax only."""
    if not Z.differentiable:
        raise UnsupportedOperation("the dual approximation needs quadratic test functions")
    fn = _tilde_entries(Z, W, prob, cfg.delta, True) if tilde else _h_entries(Z, W, prob, cfg, True)
    return _assemble(Z, W, cfg.cutoff, fn, cfg.workers)


def assemble(Z: BasisFamily, W: BasisFamily, prob: ControlProblem, cfg: AssemblyConfig) -> StiffnessMatrices:
    """Mass matrix and the stiffness approximation selected by ``cfg.variant``."""
    M, mdiag = assemble_mass(Z, W, prob.domain, cfg.cutoff, cfg.workers)
    if cfg.variant == K_TILDE:
        K, kdiag = assemble_stiffness_tilde(Z, W, prob, cfg)
    elif cfg.variant == K_H:
        K, kdiag = assemble_stiffness_H(Z, W, prob, cfg)
    elif cfg.variant == K_DUAL:
        K, kdiag = assemble_stiffness_dual(Z, W, prob, cfg)
    else:
        K, kdiag = assemble_stiffness_dual(Z, W, prob, cfg, tilde=True)
    diag = {"mass_ties": mdiag.get("ties", 0), "cutoff": cfg.cutoff,
            "truncated": mdiag.get("truncated", 0)}
    diag.update({f"stiffness_{k}": v for k, v in kdiag.items()})
    diag["approximate_sup"] = cfg.variant in (K_H, K_DUAL)
    return StiffnessMatrices(M, K, cfg.variant, diag)


def assemble_fm_kernel(W: BasisFamily, prob: ControlProblem, cfg: AssemblyConfig, grid=None):
    """Fleming-McEneaney kernel ``G_ik = inf_x (-w_i(x) + [S^δ w_k]_H(x))``.

    With ``grid`` the infimum runs over the given points exactly; otherwise
    over the box ``prob.domain`` by seeded sampling search (seeds ``x̂_i``,
    ``x̂_k`` and their midpoint).
    """
    if not W.differentiable:
        raise UnsupportedOperation("the FM kernel needs quadratic finite elements")
    if grid is not None:
        pts = np.atleast_2d(np.asarray(grid, dtype=float))
        return tropical.residual_matrix(W.values(pts), element_images(W, prob, cfg.delta, pts),
                                        cfg.workers)
    X = prob.domain
    p = len(W)
    coarse = cfg.coarse_for(X)
    out = np.empty((p, p))
    step = max(1, _PAIR_CHUNK // p)

    def work(block):
        s, e = block
        ii = np.repeat(np.arange(s, e), p)
        kk = np.tile(np.arange(p), e - s)
        ci, ck = W.centers[ii], W.centers[kk]
        seeds = np.stack([X.clip(ci), X.clip(ck), X.clip(0.5 * (ci + ck))], axis=1)

        def neg(x):
            img = W.values(x, kk) + cfg.delta * hamiltonian_eval(prob, x, W.gradients(x, kk))
            return W.values(x, ii) - img

        vals, _ = batched_sup(neg, X, seeds, coarse, cfg.refine_tol)
        out[s:e] = (-vals).reshape(e - s, p)

    tropical._run(work, [(s, min(p, s + step)) for s in range(0, p, step)], cfg.workers)
    return out
