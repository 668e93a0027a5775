"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .tensors import ObservationMask, PartialTensor

__all__ = [
    "check_cubic",
    "as_partial_tensor",
    "check_square",
    "check_orthonormal",
]


def check_cubic(values) -> tuple:
    """Validate a dense cubic array, returning (order, dim)."""
    v = np.asarray(values, dtype=float)
    if v.ndim < 2:
        raise ValueError(f"expected an order >= 2 tensor, got ndim {v.ndim}")
    d = v.shape[0]
    if any(s != d for s in v.shape):
        raise ValueError(f"all mode lengths must agree, got shape {v.shape}")
    return v.ndim, d


def as_partial_tensor(x) -> PartialTensor:
    """Coerce estimator input to a :class:`PartialTensor`.

    Accepts a PartialTensor, or a dense cubic array in which unobserved
    entries are NaN (the imputation convention: observed values are kept,
    NaN cells are the ones to fill in).
    """
    if isinstance(x, PartialTensor):
        return x
    arr = np.asarray(x, dtype=float)
    order, dim = check_cubic(arr)
    observed = ~np.isnan(arr)
    mask = ObservationMask.from_indicator(observed)
    values = np.where(observed, arr, 0.0)
    return PartialTensor(values, mask)


def check_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def check_orthonormal(m, tol: float = 1e-8) -> np.ndarray:
    b = np.asarray(m, dtype=float)
    if b.ndim != 2:
        raise ValueError("expected a 2-D basis")
    gram = b.T @ b
    if np.max(np.abs(gram - np.eye(b.shape[1]))) > tol:
        raise ValueError(f"columns are not orthonormal within {tol}")
    return b


def positive_number(name: str, value) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if out <= 0:
        raise ConfigError(f"{name} must be positive, got {out}")
    return out
