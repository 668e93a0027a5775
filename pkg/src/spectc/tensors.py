"""Dense cubic tensors, observation masks, unfolding and basic norms.

All indices are 0-based in memory; the text file formats in :mod:`spectc.io`
use 1-based indices. Flattening is always C order (last index fastest), which
fixes the bijection between an order-k tensor and its d^a x d^b unfoldings.
Every value type here is immutable after construction, so instances can be
shared freely across threads.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tensor",
    "ObservationMask",
    "PartialTensor",
    "UnfoldedMatrix",
    "unfold",
    "refold",
    "project_mask",
    "restrict",
    "diag_split",
    "multilinear_rank",
    "frobenius",
    "op_norm",
    "max_abs",
]

#: Relative singular-value cutoff used for numerical ranks.
DEFAULT_RANK_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, order="C")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Tensor:
    """Dense order-k tensor with all mode lengths equal to d.

    Parameters
    ----------
    values : ndarray
        Array of shape ``(d,) * k`` with ``k >= 2``. A copy is made and
        frozen.
    symmetric : bool
        Marks the tensor as invariant under index permutations. Set it only
        when that holds exactly (constructors in :mod:`spectc.models`
        guarantee it); use :meth:`from_array` with ``symmetrize=True`` to
        enforce it on arbitrary data.
    """

    values: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim < 2:
            raise ValueError(f"tensor order must be >= 2, got {v.ndim}")
        d = v.shape[0]
        if any(s != d for s in v.shape):
            raise ValueError(f"all mode lengths must equal, got shape {v.shape}")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def order(self) -> int:
        return self.values.ndim

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_flat(cls, flat, order, dim, symmetric=False) -> "Tensor":
        flat = np.asarray(flat, dtype=float)
        if flat.size != dim**order:
            raise ValueError(
                f"expected {dim**order} values for order {order}, dim {dim}; got {flat.size}"
            )
        return cls(flat.reshape((dim,) * order), symmetric=symmetric)

    @classmethod
    def from_array(cls, values, symmetrize=False) -> "Tensor":
        """Wrap ``values``; with ``symmetrize=True`` average over all index
        permutations and re-read every entry at its sorted index so the
        result is symmetric to the last bit."""
        if not symmetrize:
            return cls(values)
        v = np.asarray(values, dtype=float)
        k = v.ndim
        mean = np.zeros_like(v)
        for perm in itertools.permutations(range(k)):
            mean += v.transpose(perm)
        mean /= math.factorial(k)
        d = v.shape[0]
        idx = np.indices((d,) * k).reshape(k, -1)
        sidx = np.sort(idx, axis=0)
        sym = mean[tuple(sidx)].reshape(v.shape)
        return cls(sym, symmetric=True)

    def scaled(self, c: float) -> "Tensor":
        return Tensor(self.values * c, symmetric=self.symmetric)


@dataclass(frozen=True)
class ObservationMask:
    """A subset of index tuples of ``[d]^k``, stored as sorted flat indices.

    ``flat`` holds unique C-order linear indices into the ``(d,) * k`` cube.
    """

    order: int
    dim: int
    flat: np.ndarray

    def __post_init__(self):
        f = np.unique(np.asarray(self.flat, dtype=np.int64))
        total = self.dim**self.order
        if f.size and (f[0] < 0 or f[-1] >= total):
            raise ValueError("mask indices out of range")
        f.setflags(write=False)
        object.__setattr__(self, "flat", f)

    @property
    def n(self) -> int:
        return int(self.flat.size)

    @property
    def shape(self) -> tuple:
        return (self.dim,) * self.order

    @classmethod
    def from_tuples(cls, order, dim, tuples) -> "ObservationMask":
        """Build a mask from 0-based index tuples (duplicates collapse)."""
        arr = np.asarray(list(tuples), dtype=np.int64)
        if arr.size == 0:
            return cls(order, dim, np.empty(0, dtype=np.int64))
        if arr.ndim != 2 or arr.shape[1] != order:
            raise ValueError(f"expected tuples of length {order}")
        if arr.min() < 0 or arr.max() >= dim:
            raise ValueError("index out of range")
        flat = np.ravel_multi_index(tuple(arr.T), (dim,) * order)
        return cls(order, dim, flat)

    @classmethod
    def full(cls, order, dim) -> "ObservationMask":
        return cls(order, dim, np.arange(dim**order, dtype=np.int64))

    @classmethod
    def from_indicator(cls, indicator) -> "ObservationMask":
        ind = np.asarray(indicator, dtype=bool)
        d = ind.shape[0]
        return cls(ind.ndim, d, np.flatnonzero(ind.ravel()))

    def entries(self) -> np.ndarray:
        """0-based index tuples as an (n, k) array, in sorted flat order."""
        return np.stack(np.unravel_index(self.flat, self.shape), axis=1)

    def contains(self, index_tuple) -> bool:
        flat = int(np.ravel_multi_index(tuple(index_tuple), self.shape))
        pos = np.searchsorted(self.flat, flat)
        return pos < self.flat.size and self.flat[pos] == flat

    def indicator(self) -> np.ndarray:
        ind = np.zeros(self.dim**self.order, dtype=bool)
        ind[self.flat] = True
        return ind.reshape(self.shape)

    def _like(self, flat) -> "ObservationMask":
        return ObservationMask(self.order, self.dim, flat)

    def union(self, other: "ObservationMask") -> "ObservationMask":
        return self._like(np.union1d(self.flat, other.flat))

    def intersection(self, other: "ObservationMask") -> "ObservationMask":
        return self._like(np.intersect1d(self.flat, other.flat))

    def difference(self, other: "ObservationMask") -> "ObservationMask":
        return self._like(np.setdiff1d(self.flat, other.flat))


@dataclass(frozen=True)
class PartialTensor:
    """A tensor observed on a mask: entries off the mask are exactly zero."""

    values: np.ndarray
    mask: ObservationMask

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.mask.shape:
            raise ValueError(f"values shape {v.shape} != mask shape {self.mask.shape}")
        off = v.ravel().copy()
        off[self.mask.flat] = 0.0
        if np.any(off != 0.0):
            raise ValueError("nonzero entries outside the observation mask")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def order(self) -> int:
        return self.values.ndim

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def as_tensor(self) -> Tensor:
        return Tensor(self.values)


@dataclass(frozen=True)
class UnfoldedMatrix:
    """A d^a x d^b matricization that remembers how to fold back."""

    values: np.ndarray
    row_order: int
    col_order: int
    dim: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        expected = (self.dim**self.row_order, self.dim**self.col_order)
        if v.shape != expected:
            raise ValueError(f"expected shape {expected}, got {v.shape}")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def order(self) -> int:
        return self.row_order + self.col_order


def _values(x) -> np.ndarray:
    if isinstance(x, (Tensor, PartialTensor, UnfoldedMatrix)):
        return x.values
    return np.asarray(x, dtype=float)


def unfold(t, row_order: int, col_order: int) -> UnfoldedMatrix:
    """Flatten the first ``row_order`` modes into rows and the remaining
    ``col_order`` modes into columns (C order on both sides).

    The map is linear and bijective; :func:`refold` inverts it exactly.
    """
    v = _values(t)
    k = v.ndim
    if row_order < 1 or col_order < 1 or row_order + col_order != k:
        raise ValueError(
            f"row_order + col_order must equal the tensor order {k}, "
            f"got ({row_order}, {col_order})"
        )
    d = v.shape[0]
    return UnfoldedMatrix(v.reshape(d**row_order, d**col_order), row_order, col_order, d)


def refold(x: UnfoldedMatrix) -> Tensor:
    """Inverse of :func:`unfold`."""
    shape = (x.dim,) * x.order
    return Tensor(x.values.reshape(shape))


def project_mask(t, mask: ObservationMask) -> PartialTensor:
    """Zero every entry outside ``mask``. Idempotent."""
    v = _values(t)
    if v.shape != mask.shape:
        raise ValueError(f"shape mismatch: {v.shape} vs {mask.shape}")
    return PartialTensor(v * mask.indicator(), mask)


def restrict(pt: PartialTensor, mask: ObservationMask) -> PartialTensor:
    """Restrict an observed tensor to a sub-mask of its observation set."""
    return project_mask(pt.values, mask)


def diag_split(m) -> tuple:
    """Split a square matrix into its diagonal and off-diagonal parts.

    The two parts sum back to the input exactly.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    diag = np.diag(np.diag(a))
    return diag, a - diag


def mode_unfolding(t, mode: int) -> np.ndarray:
    """Mode-i matricization: d rows, d^{k-1} columns."""
    v = _values(t)
    return np.moveaxis(v, mode, 0).reshape(v.shape[0], -1)


def multilinear_rank(t, tol: float = DEFAULT_RANK_TOL) -> tuple:
    """Numerical rank of every mode unfolding.

    Returns ``(ranks, max_rank)`` where ``ranks`` is a tuple of k integers.
    Singular values below ``tol`` times the top singular value of the same
    unfolding count as zero. A zero tensor yields all-zero ranks and a
    warning.
    """
    v = _values(t)
    if not np.any(v):
        warnings.warn("multilinear rank of the zero tensor is zero in every mode")
        return (0,) * v.ndim, 0
    ranks = []
    for mode in range(v.ndim):
        s = np.linalg.svd(mode_unfolding(v, mode), compute_uv=False)
        ranks.append(int(np.sum(s > tol * s[0])))
    return tuple(ranks), max(ranks)


def frobenius(x) -> float:
    return float(np.linalg.norm(_values(x).ravel()))


def op_norm(x) -> float:
    """Largest singular value. Defined for matrices only."""
    v = _values(x)
    if v.ndim != 2:
        raise ValueError(f"operator norm needs a matrix, got ndim {v.ndim}")
    if not np.any(v):
        return 0.0
    return float(np.linalg.svd(v, compute_uv=False)[0])


def max_abs(x) -> float:
    v = _values(x)
    return float(np.max(np.abs(v))) if v.size else 0.0
