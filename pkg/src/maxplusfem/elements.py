"""P1 (Lipschitz) and P2 (quadratic) finite elements and their scalar products.

A quadratic element centered at ``x̂`` with Hessian ``c`` is
``w(x) = -(c/2) ‖x - x̂‖₂²``; a Lipschitz element with constant ``a`` is
``z(x) = -a ‖x - x̂‖₁``.  Both are coordinate-separable, so the max-plus
scalar product ``⟨z, w⟩ = sup_{x ∈ X} z(x) + w(x)`` over a box reduces to
independent one-dimensional concave maximizations, each solved in closed form
and clamped to the coordinate interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

QUADRATIC = "quadratic"
LIPSCHITZ = "lipschitz"

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class UnsupportedOperation(TypeError):
    """Raised when an operation needs a differentiable element."""


class DegenerateSampling(ValueError):
    """Raised when a sampling lattice cannot resolve the domain."""


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box ``[lo_1, hi_1] × ... × [lo_n, hi_n]`` (bounds may be infinite)."""

    lo: np.ndarray
    hi: np.ndarray

    def __init__(self, lo, hi):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lo and hi must be 1-D of equal length")
        if np.any(lo > hi):
            raise ValueError(f"empty box: lo={lo}, hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, lo, hi, dim):
        return cls(np.full(dim, float(lo)), np.full(dim, float(hi)))

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def extent(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lo)) and np.all(np.isfinite(self.hi)))

    def diameter(self) -> float:
        return float(np.linalg.norm(self.extent))

    def enlarge(self, r: float) -> "BoxDomain":
        return BoxDomain(self.lo - r, self.hi + r)

    def contains(self, x, tol: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lo - tol) & (x <= self.hi + tol), axis=-1)

    def on_boundary(self, x, tol: float = 1e-12) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        near = (np.abs(x - self.lo) <= tol) | (np.abs(x - self.hi) <= tol)
        return np.any(near, axis=-1) & self.contains(x, tol)

    def clip(self, x):
        return np.clip(x, self.lo, self.hi)


@dataclass(frozen=True)
class QuadraticElement:
    center: np.ndarray
    c: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        if not self.c > 0:
            raise ValueError("Hessian constant c must be positive")

    kind = QUADRATIC

    @property
    def param(self) -> float:
        return self.c


@dataclass(frozen=True)
class LipschitzElement:
    center: np.ndarray
    a: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        if not self.a > 0:
            raise ValueError("Lipschitz constant a must be positive")

    kind = LIPSCHITZ

    @property
    def param(self) -> float:
        return self.a


def evaluate(e, x) -> np.ndarray:
    """Value of element ``e`` at point(s) ``x`` (shape ``(n,)`` or ``(m, n)``)."""
    d = np.asarray(x, dtype=float) - e.center
    if e.kind == QUADRATIC:
        return -0.5 * e.c * np.sum(d * d, axis=-1)
    return -e.a * np.sum(np.abs(d), axis=-1)


def gradient(e, x) -> np.ndarray:
    """Gradient ``-c (x - x̂)`` of a quadratic element."""
    if e.kind != QUADRATIC:
        raise UnsupportedOperation("Lipschitz elements are not differentiable")
    return -e.c * (np.asarray(x, dtype=float) - e.center)


@dataclass(frozen=True)
class BasisFamily:
    """Family of elements of one kind sharing the parameter ``c`` or ``a``.

    ``centers`` has shape ``(count, n)``.
    """

    kind: str
    centers: np.ndarray
    param: float

    def __init__(self, kind, centers, param):
        if kind not in (QUADRATIC, LIPSCHITZ):
            raise ValueError(f"unknown element kind {kind!r}")
        centers = np.asarray(centers, dtype=float)
        if centers.ndim == 1:
            centers = centers[:, None]
        if not param > 0:
            raise ValueError("element parameter must be positive")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "param", float(param))

    @classmethod
    def quadratic(cls, centers, c):
        return cls(QUADRATIC, centers, c)

    @classmethod
    def lipschitz(cls, centers, a):
        return cls(LIPSCHITZ, centers, a)

    def __len__(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @property
    def differentiable(self) -> bool:
        return self.kind == QUADRATIC

    def element(self, i):
        if self.kind == QUADRATIC:
            return QuadraticElement(self.centers[i], self.param)
        return LipschitzElement(self.centers[i], self.param)

    def values(self, x, idx=None) -> np.ndarray:
        """Matrix ``[e_i(x_m)]`` of shape ``(m, count)`` (or pointwise if ``idx`` given).

        With ``idx`` (shape ``(m,)``), returns ``e_{idx[m]}(x[m])``.
        """
        x = np.asarray(x, dtype=float)
        if idx is not None:
            d = x - self.centers[idx]
            if self.kind == QUADRATIC:
                return -0.5 * self.param * np.sum(d * d, axis=-1)
            return -self.param * np.sum(np.abs(d), axis=-1)
        x = np.atleast_2d(x)
        out = np.zeros((x.shape[0], len(self)))
        for k in range(self.dim):
            d = x[:, k:k + 1] - self.centers[None, :, k]
            out += d * d if self.kind == QUADRATIC else np.abs(d)
        return -0.5 * self.param * out if self.kind == QUADRATIC else -self.param * out

    def gradients(self, x, idx) -> np.ndarray:
        """``∇e_{idx[m]}(x[m])`` for quadratic families."""
        if self.kind != QUADRATIC:
            raise UnsupportedOperation("Lipschitz elements are not differentiable")
        return -self.param * (np.asarray(x, dtype=float) - self.centers[idx])


# --- closed-form scalar products ----------------------------------------------

def _argmax_1d(kz, pz, y, kw, pw, xh, lo, hi):
    """Maximizer of ``z(x) + w(x)`` on ``[lo, hi]`` for one coordinate.

    The objective is concave, so the constrained maximizer is the clamped
    unconstrained one.  quad+quad: weighted mean of centers.  lip(a)+quad(c):
    stays at the kink ``y`` while ``|x̂ - y| <= a/c``, otherwise stops a/c
    short of ``x̂``.  lip+lip: the steeper element's center; equal slopes give
    the whole segment, of which the smallest point is taken.
    Returns ``(x*, tie)`` where ``tie`` flags a non-singleton argmax.
    """
    tie = np.zeros(np.broadcast(y, xh).shape, dtype=bool)
    if kz == QUADRATIC and kw == QUADRATIC:
        x = (pz * y + pw * xh) / (pz + pw)
    elif kz == LIPSCHITZ and kw == QUADRATIC:
        d = xh - y
        x = np.where(np.abs(d) <= pz / pw, y, xh - np.sign(d) * (pz / pw))
    elif kz == QUADRATIC and kw == LIPSCHITZ:
        d = y - xh
        x = np.where(np.abs(d) <= pw / pz, xh, y - np.sign(d) * (pw / pz))
    else:
        if pz > pw:
            x = y + 0.0 * xh
        elif pw > pz:
            x = xh + 0.0 * y
        else:
            m1, m2 = np.minimum(y, xh), np.maximum(y, xh)
            x = m1
            tie = (np.minimum(m2, hi) - np.maximum(m1, lo)) > 0
    return np.clip(x, lo, hi), tie


def pair_argmax(Z: BasisFamily, W: BasisFamily, X: BoxDomain, rows, cols):
    """Argmax of ``z_rows + w_cols`` over ``X`` for index arrays ``rows, cols``.

    Returns ``(points (m, n), tie (m,))``.
    """
    yz = Z.centers[rows]
    xw = W.centers[cols]
    pts = np.empty_like(xw, dtype=float)
    tie = np.zeros(len(rows), dtype=bool)
    for k in range(X.dim):
        pts[:, k], t = _argmax_1d(Z.kind, Z.param, yz[:, k], W.kind, W.param, xw[:, k],
                                  X.lo[k], X.hi[k])
        tie |= t
    return pts, tie


def pairwise_sup(z, w, X: BoxDomain):
    """``(sup_{x∈X} z(x) + w(x), argmax)`` for two single elements."""
    x = np.empty(X.dim)
    for k in range(X.dim):
        xk, _ = _argmax_1d(z.kind, z.param, z.center[k], w.kind, w.param, w.center[k],
                           X.lo[k], X.hi[k])
        x[k] = xk
    return float(evaluate(z, x) + evaluate(w, x)), x


def family_sup(Z: BasisFamily, W: BasisFamily, X: BoxDomain, rows=None, cols=None):
    """Vectorized ``⟨z_j, w_i⟩`` for all pairs, or for the given ``(rows, cols)``.

    Returns ``(values, argmax, tie)``; for the all-pairs form ``values`` has
    shape ``(q, p)`` and ``argmax`` shape ``(q, p, n)``.
    """
    full = rows is None
    if full:
        q, p = len(Z), len(W)
        rows = np.repeat(np.arange(q), p)
        cols = np.tile(np.arange(p), q)
    pts, tie = pair_argmax(Z, W, X, rows, cols)
    vals = Z.values(pts, rows) + W.values(pts, cols)
    if full:
        return vals.reshape(q, p), pts.reshape(q, p, -1), tie.reshape(q, p)
    return vals, pts, tie


# --- sampling maximizers ------------------------------------------------------

def _lattice(X: BoxDomain, step: float) -> np.ndarray:
    if not X.bounded:
        raise DegenerateSampling("sampling needs a bounded domain")
    axes = []
    for lo, hi in zip(X.lo, X.hi):
        ext = hi - lo
        if ext == 0:
            axes.append(np.array([lo]))
            continue
        if step > ext:
            raise DegenerateSampling(f"coarse step {step} exceeds domain extent {ext}")
        k = int(math.floor(ext / step + 1e-9))
        ax = lo + step * np.arange(k + 1)
        if hi - ax[-1] > 1e-12 * max(1.0, abs(hi)):
            ax = np.append(ax, hi)
        axes.append(ax)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _golden_steps(width: float, tol: float) -> int:
    if width <= tol:
        return 0
    return int(math.ceil(math.log(tol / width) / math.log(_GOLDEN)))


def _refine(f, x0, X, half_width, refine_tol, sweeps):
    """Coordinate-wise golden section from each row of ``x0`` (shape ``(B, n)``).

    ``f`` maps ``(B, n)`` to ``(B,)``.  The bracket of each coordinate is
    ``[x0 - half_width, x0 + half_width] ∩ [lo, hi]``.
    """
    x = x0.copy()
    best = f(x)
    n = X.dim
    iters = _golden_steps(2 * half_width, refine_tol)
    for _ in range(sweeps):
        for k in range(n):
            if X.lo[k] == X.hi[k]:
                continue
            a = np.maximum(x[:, k] - half_width, X.lo[k])
            b = np.minimum(x[:, k] + half_width, X.hi[k])
            c = b - _GOLDEN * (b - a)
            d = a + _GOLDEN * (b - a)
            xc, xd = x.copy(), x.copy()
            xc[:, k], xd[:, k] = c, d
            fc, fd = f(xc), f(xd)
            for _ in range(iters):
                left = fc >= fd
                b = np.where(left, d, b)
                a = np.where(left, a, c)
                nc = b - _GOLDEN * (b - a)
                nd = a + _GOLDEN * (b - a)
                c_new = np.where(left, nc, d)
                d_new = np.where(left, c, nd)
                fc_old, fd_old = fc, fd
                xe = x.copy()
                xe[:, k] = np.where(left, c_new, d_new)
                fe = f(xe)
                fc = np.where(left, fe, fd_old)
                fd = np.where(left, fc_old, fe)
                c, d = c_new, d_new
            # candidates: bracket ends, the two interior probes, current point
            for cand in (a, b, c, d):
                xt = x.copy()
                xt[:, k] = cand
                ft = f(xt)
                better = ft > best
                x[better] = xt[better]
                best = np.where(better, ft, best)
    return best, x


def sampled_sup(f: Callable, X: BoxDomain, coarse_step: float, refine_tol: float,
                n_starts: int = 5, seeds=None):
    """Best-effort global maximum of ``f`` over ``X``.

    ``f`` must accept an ``(m, n)`` array of points and return ``(m,)`` values.
    The lattice of step ``coarse_step`` is scanned, the ``n_starts`` best
    lattice points (plus optional ``seeds``) are refined by coordinate-wise
    golden section, and the best result is returned as ``(value, argmax)``.
    Results within ``refine_tol`` of the best are treated as ties and resolved
    toward the smallest lattice index.  Exact for functions that are concave
    on each start's basin; otherwise a lower estimate.
    """
    if not coarse_step > 0:
        raise DegenerateSampling("coarse_step must be positive")
    lat = _lattice(X, coarse_step)
    vals = np.asarray(f(lat), dtype=float)
    order = np.argsort(-vals, kind="stable")[:n_starts]
    order = np.sort(order)
    starts = lat[order]
    if seeds is not None:
        starts = np.vstack([np.atleast_2d(np.asarray(seeds, dtype=float)), starts])
    sweeps = 1 if X.dim == 1 else 8
    best, x = _refine(f, starts, X, coarse_step, refine_tol, sweeps)
    top = best.max()
    # seeds come first, then lattice starts in index order
    pick = int(np.flatnonzero(best >= top - refine_tol)[0])
    return float(best[pick]), x[pick]


def batched_sup(f: Callable, X: BoxDomain, seeds, coarse_step: float, refine_tol: float,
                n_lattice_starts: int = 4):
    """Vectorized :func:`sampled_sup` over a batch of ``B`` objectives.

    ``f(x)`` receives points of shape ``(B, n)`` (point ``b`` belongs to
    objective ``b``) and returns ``(B,)``.  ``seeds`` has shape ``(B, S, n)``.
    Returns ``(values (B,), argmax (B, n))``.
    """
    seeds = np.asarray(seeds, dtype=float)
    if seeds.ndim == 2:
        seeds = seeds[:, None, :]
    B, S, n = seeds.shape
    lat = _lattice(X, coarse_step)
    L = lat.shape[0]
    lv = np.empty((B, L))
    for l in range(L):
        lv[:, l] = f(np.broadcast_to(lat[l], (B, n)))
    k = min(n_lattice_starts, L)
    top = np.argsort(-lv, axis=1, kind="stable")[:, :k]
    starts = np.concatenate([seeds, lat[top]], axis=1)
    sweeps = 1 if n == 1 else 8
    best_v = np.full(B, -np.inf)
    best_x = seeds[:, 0, :].copy()
    for s in range(starts.shape[1]):
        v, x = _refine(f, starts[:, s, :], X, coarse_step, refine_tol, sweeps)
        better = v > best_v
        best_v = np.where(better, v, best_v)
        best_x[better] = x[better]
    return best_v, best_x
