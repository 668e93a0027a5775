"""Column-space estimation for partially revealed wide matrices.

Centre piece: a Gram-matrix estimator for X X^T built from a masked matrix
Y whose entries were revealed independently with probability delta. Diagonal
entries of Y Y^T see one reveal indicator and are rescaled by 1/delta;
off-diagonal entries see two independent indicators and are rescaled by
1/delta^2, which makes the estimator exactly unbiased. Also here: the
incoherence diagnostics that control when the top eigenvectors of that
estimator track the true column space, and the one-line partial column
completion they enable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralProjector
from .tensors import (
    DEFAULT_RANK_TOL,
    Tensor,
    diag_split,
    frobenius,
    max_abs,
    op_norm,
    unfold,
)

__all__ = [
    "debiased_gram",
    "IncoherenceParams",
    "incoherence_params",
    "coherence",
    "UnfoldingParams",
    "unfolding_params",
    "complete_column",
]


def debiased_gram(y, delta: float) -> np.ndarray:
    """Unbiased estimate of X X^T from Y = X restricted to revealed entries.

    Returns ``diag(Y Y^T)/delta + offdiag(Y Y^T)/delta**2``; symmetric by
    construction. ``delta`` is the per-entry reveal probability, in (0, 1].
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    a = np.asarray(y, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    gram = a @ a.T
    diag, off = diag_split(gram)
    return diag / delta + off / delta**2


@dataclass(frozen=True)
class IncoherenceParams:
    """Row, entry and column spread of a matrix against its operator norm.

    lam bounds d1 * max_i ||row_i||^2, rho bounds d2 * max_j ||col_j||^2,
    and gamma closes d1*d2*||X||_inf^2 <= lam*gamma*rho*||X||_op^2 with
    equality when the triple is computed minimally.
    """

    lam: float
    gamma: float
    rho: float


def incoherence_params(x) -> IncoherenceParams:
    """Minimal (lam, gamma, rho) for which the three spread conditions hold
    with equality. Raises on a zero matrix."""
    a = np.asarray(x, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    if not np.any(a):
        raise ValueError("incoherence parameters of the zero matrix are undefined")
    d1, d2 = a.shape
    op2 = op_norm(a) ** 2
    lam = d1 * float(np.max(np.sum(a**2, axis=1))) / op2
    rho = d2 * float(np.max(np.sum(a**2, axis=0))) / op2
    gamma = d1 * d2 * max_abs(a) ** 2 / (lam * rho * op2)
    return IncoherenceParams(lam=lam, gamma=gamma, rho=rho)


def coherence(basis) -> float:
    """Alignment of a subspace with the standard basis: (m/r) times the
    largest squared row norm of an orthonormal basis. Lies in [1, m/r]."""
    b = np.asarray(basis, dtype=float)
    if b.ndim != 2 or b.shape[1] == 0:
        raise ValueError("expected a nonempty orthonormal basis")
    m, r = b.shape
    gram = b.T @ b
    if np.max(np.abs(gram - np.eye(r))) > 1e-8:
        raise ValueError("basis columns are not orthonormal within 1e-8")
    return m / r * float(np.max(np.sum(b**2, axis=1)))


@dataclass(frozen=True)
class UnfoldingParams:
    """(rank, alpha, mu) of the balanced matricization of a tensor.

    rank bounds the matricization rank; alpha = d^k ||X||_inf^2/||X||_F^2
    measures entry spread; mu = rank * ||X||_op^2 / ||X||_F^2 measures
    spectral flatness (1 <= mu <= rank).
    """

    rank: int
    alpha: float
    mu: float


def unfolding_params(t: Tensor, tol: float = DEFAULT_RANK_TOL) -> UnfoldingParams:
    """Compute (rank, alpha, mu) from the floor(k/2) x ceil(k/2) unfolding,
    all three tight. Raises on a zero tensor."""
    if not np.any(t.values):
        raise ValueError("unfolding parameters of the zero tensor are undefined")
    k, d = t.order, t.dim
    x = unfold(t, k // 2, k - k // 2).values
    s = np.linalg.svd(x, compute_uv=False)
    rank = int(np.sum(s > tol * s[0]))
    fro2 = frobenius(x) ** 2
    alpha = d**k * max_abs(x) ** 2 / fro2
    mu = rank * float(s[0]) ** 2 / fro2
    return UnfoldingParams(rank=rank, alpha=alpha, mu=mu)


def complete_column(q: SpectralProjector, y, reveal_fraction: float) -> np.ndarray:
    """Estimate a full matrix column from its partially revealed version.

    ``y`` is the column with unrevealed entries zeroed and
    ``reveal_fraction`` the per-entry reveal probability within that column;
    the estimate is the rescaled column projected onto the estimated column
    space, ``Q y / reveal_fraction``.
    """
    if reveal_fraction <= 0 or reveal_fraction > 1:
        raise ValueError(f"reveal_fraction must lie in (0, 1], got {reveal_fraction}")
    vec = np.asarray(y, dtype=float)
    if vec.shape != (q.ambient,):
        raise ValueError(f"expected a vector of length {q.ambient}")
    if q.rank == 0:
        return np.zeros_like(vec)
    return q.apply(vec) / reveal_fraction
