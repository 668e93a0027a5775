"""Symmetric eigendecomposition, SVD, thresholded spectral projectors, the
sin-theta subspace distance, and tensor-product projections.

The tensor-product projector is never materialized as a d^k x d^k matrix;
each factor is applied by reshaping and multiplying mode groups in turn.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensors import Tensor, _values

__all__ = [
    "SpectralProjector",
    "sym_eig",
    "svd",
    "threshold_projector",
    "identity_projector",
    "sin_theta",
    "pattern_for_order",
    "apply_mode_projection",
]

SYMMETRY_RTOL = 1e-8


def sym_eig(m) -> tuple:
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric
    matrix. The input must be symmetric to relative 1e-8; it is symmetrized
    as (M + M^T)/2 before factorization."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale and np.max(np.abs(a - a.T)) > SYMMETRY_RTOL * scale:
        raise ValueError("matrix is not symmetric within tolerance 1e-8")
    w, v = np.linalg.eigh((a + a.T) / 2.0)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def svd(m) -> tuple:
    """Full singular value decomposition ``(u, s, vt)`` with s descending."""
    a = np.asarray(m, dtype=float)
    return np.linalg.svd(a, full_matrices=False)


@dataclass(frozen=True)
class SpectralProjector:
    """Orthogonal projector onto a spectral subspace, kept as a basis.

    ``basis`` is an (ambient, rank) matrix with orthonormal columns;
    ``threshold`` records the cutoff that selected it.
    """

    basis: np.ndarray
    threshold: float = 0.0

    def __post_init__(self):
        b = np.array(np.asarray(self.basis, dtype=float), order="C")
        if b.ndim != 2:
            raise ValueError("basis must be 2-D")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def matrix(self) -> np.ndarray:
        """The projector as a dense ambient x ambient matrix."""
        return self.basis @ self.basis.T

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Project columns of ``x`` (or a vector) without forming the
        dense projector."""
        return self.basis @ (self.basis.T @ x)


def identity_projector(ambient: int) -> SpectralProjector:
    return SpectralProjector(np.eye(ambient), threshold=0.0)


def threshold_projector(m, lambda_star: float, mode: str = "eigen") -> SpectralProjector:
    """Projector onto the span of spectral directions at or above a cutoff.

    mode "eigen" keeps eigenvectors of the symmetric input with eigenvalue
    >= lambda_star (ties included); mode "left-singular" keeps left singular
    vectors with singular value >= lambda_star. An empty selection gives the
    rank-0 projector.
    """
    if lambda_star < 0:
        raise ValueError("lambda_star must be nonnegative")
    if mode == "eigen":
        w, v = sym_eig(m)
        keep = w >= lambda_star
        basis = v[:, keep]
    elif mode == "left-singular":
        u, s, _ = svd(m)
        keep = s >= lambda_star
        basis = u[:, keep]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return SpectralProjector(basis, threshold=float(lambda_star))


def sin_theta(p: SpectralProjector, u: SpectralProjector) -> float:
    """sin-theta distance ``||(I - U U^T) P P^T||_op`` between subspaces.

    Zero when span(p) lies inside span(u); one when some direction of
    span(p) is orthogonal to span(u).
    """
    if p.ambient != u.ambient:
        raise ValueError(f"ambient dimensions differ: {p.ambient} vs {u.ambient}")
    if p.rank == 0:
        return 0.0
    # (I - UU^T) P has the same singular values as (I - UU^T) P P^T.
    residual = p.basis - u.basis @ (u.basis.T @ p.basis)
    top = np.linalg.svd(residual, compute_uv=False)[0] if residual.size else 0.0
    return float(min(max(top, 0.0), 1.0))


def pattern_for_order(k: int) -> str:
    """Tensor-product pattern used by the unfolding completer: three Q
    factors for k=3, two for even k, two plus an identity for odd k >= 5."""
    if k == 3:
        return "qqq"
    if k >= 4 and k % 2 == 0:
        return "qq"
    if k >= 5:
        return "qqi"
    raise ValueError(f"no projection pattern for order {k}")


def _check_ambient(q: SpectralProjector, expected: int, pattern: str):
    if q.ambient != expected:
        raise ValueError(
            f"pattern {pattern!r} needs a projector on dimension {expected}, "
            f"got {q.ambient}"
        )


def apply_mode_projection(t, q: SpectralProjector, pattern: str) -> Tensor:
    """Apply a tensor-product orthogonal projection to ``t``.

    Patterns ("d" is the mode length, "a" the factor size):

    - ``"qqq"``: Q x Q x Q on an order-3 tensor, Q on R^d;
    - ``"qq"``:  Q x Q on an even-order tensor, Q on R^(d^(k/2));
    - ``"qqi"``: Q x Q x I_d on an odd-order tensor, Q on R^(d^((k-1)/2));
    - ``"qi"``:  Q x I_d on an order-3 tensor, Q on R^(d^2), acting jointly
      on the first two modes.

    Each case contracts the Frobenius norm and is idempotent.
    """
    v = _values(t)
    k = v.ndim
    d = v.shape[0]
    p = q.matrix()
    if pattern == "qqq":
        if k != 3:
            raise ValueError("pattern 'qqq' needs an order-3 tensor")
        _check_ambient(q, d, pattern)
        out = np.tensordot(p, v, axes=(1, 0))
        out = np.tensordot(p, out, axes=(1, 1)).transpose(1, 0, 2)
        out = np.tensordot(out, p, axes=(2, 1))
        return Tensor(out)
    if pattern == "qq":
        if k < 4 or k % 2:
            raise ValueError("pattern 'qq' needs an even order >= 4")
        a = k // 2
        _check_ambient(q, d**a, pattern)
        m = v.reshape(d**a, d**a)
        return Tensor((p @ m @ p).reshape((d,) * k))
    if pattern == "qqi":
        if k < 5 or k % 2 == 0:
            raise ValueError("pattern 'qqi' needs an odd order >= 5")
        a = k // 2
        _check_ambient(q, d**a, pattern)
        m = v.reshape(d**a, d**a, d)
        out = np.tensordot(p, m, axes=(1, 0))
        out = np.tensordot(p, out, axes=(1, 1)).transpose(1, 0, 2)
        return Tensor(out.reshape((d,) * k))
    if pattern == "qi":
        if k != 3:
            raise ValueError("pattern 'qi' needs an order-3 tensor")
        _check_ambient(q, d * d, pattern)
        m = v.reshape(d * d, d)
        return Tensor((p @ m).reshape((d,) * 3))
    raise ValueError(f"unknown pattern {pattern!r}")
