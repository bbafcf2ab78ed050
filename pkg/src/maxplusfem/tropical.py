"""Max-plus / min-plus arithmetic on the completed semiring ``R ∪ {-inf, +inf}``.

Scalars and vectors are plain floats and 1-D ``numpy`` arrays; infinities are
IEEE infinities.  Two absorption rules replace the NaN that IEEE arithmetic
would produce for ``-inf + inf``:

* in a max-plus product (``⊗``), ``-inf`` is absorbing;
* in a residuation (min-plus side), ``+inf`` is absorbing.

Kernels are either dense ``(q, p)`` arrays or :class:`BandMatrix` instances,
which only keep entries whose row/column centers lie within a cutoff radius.
"""
from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

NEG_INF = -np.inf
POS_INF = np.inf

# target number of float64 temporaries per block in the dense kernels
_BLOCK_ENTRIES = 1 << 22


class ContractError(ValueError):
    """Raised when operands do not satisfy an operation's preconditions."""


def default_workers() -> int:
    """Worker count from ``MFEM_THREADS`` (defaults to 1)."""
    try:
        return max(1, int(os.environ.get("MFEM_THREADS", "1")))
    except ValueError:
        return 1


def otimes(a, b):
    """Max-plus product ``a ⊗ b = a + b`` with ``-inf`` absorbing."""
    with np.errstate(invalid="ignore"):
        s = np.add(a, b)
    return np.where(np.isnan(s), NEG_INF, s) if np.ndim(s) else (NEG_INF if np.isnan(s) else float(s))


def oplus(a, b):
    """Max-plus sum ``a ⊕ b = max(a, b)``."""
    return np.maximum(a, b)


def residuate_scalar(a, b):
    """Largest ``x`` with ``a ⊗ x <= b``, i.e. ``-a + b`` with ``+inf`` absorbing."""
    with np.errstate(invalid="ignore"):
        s = np.subtract(b, a)
    return np.where(np.isnan(s), POS_INF, s) if np.ndim(s) else (POS_INF if np.isnan(s) else float(s))


@dataclass(frozen=True)
class BandMatrix:
    """Band-limited tropical kernel.

    Entries whose row and column centers are farther apart than ``cutoff``
    are implicitly ``-inf``.  Storage is kept both row-major (for products)
    and column-major (for residuation).
    """

    shape: tuple[int, int]
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    cutoff: float = np.inf
    truncated: int = 0
    _col_indptr: np.ndarray = field(repr=False, default=None)
    _col_rows: np.ndarray = field(repr=False, default=None)
    _col_data: np.ndarray = field(repr=False, default=None)

    @classmethod
    def from_triplets(cls, rows, cols, vals, shape, cutoff=np.inf, truncated=0):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        order = np.lexsort((cols, rows))
        r, c, v = rows[order], cols[order], vals[order]
        indptr = np.zeros(shape[0] + 1, dtype=np.int64)
        np.add.at(indptr, r + 1, 1)
        np.cumsum(indptr, out=indptr)
        corder = np.lexsort((r, c))
        col_indptr = np.zeros(shape[1] + 1, dtype=np.int64)
        np.add.at(col_indptr, c + 1, 1)
        np.cumsum(col_indptr, out=col_indptr)
        return cls(tuple(shape), indptr, c, v, float(cutoff), int(truncated),
                   col_indptr, r[corder], v[corder])

    @classmethod
    def from_dense(cls, dense, row_centers=None, col_centers=None, cutoff=np.inf):
        """Band copy of ``dense`` keeping entries with center distance <= cutoff."""
        dense = np.asarray(dense, dtype=float)
        q, p = dense.shape
        if np.isinf(cutoff) or row_centers is None:
            rows, cols = np.nonzero(dense > NEG_INF)
            truncated = 0
        else:
            rows, cols = center_pairs(row_centers, col_centers, cutoff)
            keep = dense[rows, cols] > NEG_INF
            truncated = int(np.count_nonzero(dense > NEG_INF) - np.count_nonzero(keep))
            rows, cols = rows[keep], cols[keep]
        return cls.from_triplets(rows, cols, dense[rows, cols], (q, p), cutoff, truncated)

    @property
    def nnz(self) -> int:
        return int(self.data.size)

    def todense(self) -> np.ndarray:
        out = np.full(self.shape, NEG_INF)
        rows = np.repeat(np.arange(self.shape[0]), np.diff(self.indptr))
        out[rows, self.indices] = self.data
        return out


def center_pairs(row_centers, col_centers, cutoff):
    """All ``(j, i)`` with ``‖row_centers[j] - col_centers[i]‖₂ <= cutoff``."""
    a = np.atleast_2d(np.asarray(row_centers, dtype=float))
    b = np.atleast_2d(np.asarray(col_centers, dtype=float))
    if a.shape[0] == 1 and a.shape[1] != b.shape[1]:
        a = a.T
    if b.shape[0] == 1 and b.shape[1] != a.shape[1]:
        b = b.T
    pairs = cKDTree(a).sparse_distance_matrix(cKDTree(b), cutoff, output_type="ndarray")
    rows, cols = pairs["i"].astype(np.int64), pairs["j"].astype(np.int64)
    return rows, cols


def _blocks(n, width):
    size = max(1, _BLOCK_ENTRIES // max(1, width))
    return [(s, min(n, s + size)) for s in range(0, n, size)]


def _run(fn, blocks, workers):
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def _as_vector(x, n, name):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != n:
        raise ContractError(f"{name} has shape {x.shape}, expected ({n},)")
    return x


def max_plus_matvec(A, x, workers=None) -> np.ndarray:
    """``(A x)_j = max_k (A_jk + x_k)`` with ``-inf`` absorbing."""
    if isinstance(A, BandMatrix):
        q, p = A.shape
        x = _as_vector(x, p, "x")
        return _band_matvec(A, x)
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ContractError("kernel must be 2-D")
    q, p = A.shape
    x = _as_vector(x, p, "x")
    out = np.empty(q)
    if p == 0:
        out[:] = NEG_INF
        return out

    def work(block):
        s, e = block
        with np.errstate(invalid="ignore"):
            t = A[s:e] + x
        r = t.max(axis=1)
        if np.isnan(r).any():
            r = np.where(np.isnan(t), NEG_INF, t).max(axis=1)
        out[s:e] = r

    _run(work, _blocks(q, p), workers)
    return out


def _band_matvec(A: BandMatrix, x):
    q = A.shape[0]
    out = np.full(q, NEG_INF)
    if A.nnz == 0:
        return out
    t = A.data + x[A.indices]
    t[np.isnan(t)] = NEG_INF
    nonempty = np.diff(A.indptr) > 0
    starts = A.indptr[:-1][nonempty]
    out[nonempty] = np.maximum.reduceat(t, starts)
    return out


def residual_apply(A, v, workers=None) -> np.ndarray:
    """Residuation ``(A \\ v)_k = min_j (-A_jk + v_j)``.

    The result is the largest ``λ`` with ``A λ <= v``; columns without any
    finite constraint give ``+inf``.
    """
    if isinstance(A, BandMatrix):
        q, p = A.shape
        v = _as_vector(v, q, "v")
        return _band_residual(A, v)
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ContractError("kernel must be 2-D")
    q, p = A.shape
    v = _as_vector(v, q, "v")
    if q == 0:
        return np.full(p, POS_INF)

    def work(block):
        s, e = block
        with np.errstate(invalid="ignore"):
            t = v[s:e, None] - A[s:e]
        r = t.min(axis=0)
        if np.isnan(r).any():
            r = np.where(np.isnan(t), POS_INF, t).min(axis=0)
        return r

    parts = _run(work, _blocks(q, p), workers)
    return np.minimum.reduce(parts) if len(parts) > 1 else parts[0]


def _band_residual(A: BandMatrix, v):
    p = A.shape[1]
    out = np.full(p, POS_INF)
    if A.nnz == 0:
        return out
    t = v[A._col_rows] - A._col_data
    t[np.isnan(t)] = POS_INF
    nonempty = np.diff(A._col_indptr) > 0
    out[nonempty] = np.minimum.reduceat(t, A._col_indptr[:-1][nonempty])
    return out


def residual_matrix(A, B, workers=None) -> np.ndarray:
    """Matrix residuation ``(A \\ B)_ik = min_x (-A_xi + B_xk)`` for dense kernels."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[0] != B.shape[0]:
        raise ContractError(f"incompatible shapes {A.shape} and {B.shape}")
    p, r = A.shape[1], B.shape[1]
    out = np.empty((p, r))

    def work(block):
        s, e = block
        for i in range(s, e):
            t = B - A[:, i:i + 1]
            col = t.min(axis=0)
            if np.isnan(col).any():
                col = np.where(np.isnan(t), POS_INF, t).min(axis=0)
            out[i] = col

    _run(work, _blocks(p, A.shape[0] * r), workers)
    return out


def sup_norm_distance(u, v) -> float:
    """Semidistance ``inf{λ >= 0 : -λ + v <= u <= λ + v}``.

    Equals ``max |u - v|`` for finite inputs; matching infinities contribute 0
    and an infinity paired with anything else gives ``+inf``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ContractError(f"shape mismatch {u.shape} vs {v.shape}")
    if u.size == 0:
        return 0.0
    same = u == v
    with np.errstate(invalid="ignore"):
        d = np.abs(u - v)
    d[same] = 0.0
    d[np.isnan(d)] = np.inf
    return float(d.max())


def to_dense(A) -> np.ndarray:
    return A.todense() if isinstance(A, BandMatrix) else np.asarray(A, dtype=float)


def format_float(x: float) -> str:
    """17-significant-digit text; infinities as ``-inf`` / ``inf``."""
    if np.isneginf(x):
        return "-inf"
    if np.isposinf(x):
        return "inf"
    return f"{x:.17g}"


def write_matrix_csv(A, path) -> None:
    """Dump a kernel as ``j,i,value`` rows (every entry, ``-inf`` included)."""
    dense = to_dense(A)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "i", "value"])
        for j in range(dense.shape[0]):
            for i in range(dense.shape[1]):
                w.writerow([j, i, format_float(dense[j, i])])


def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    q = 1 + max(int(r["j"]) for r in rows)
    p = 1 + max(int(r["i"]) for r in rows)
    out = np.full((q, p), NEG_INF)
    for r in rows:
        out[int(r["j"]), int(r["i"])] = float(r["value"])
    return out
