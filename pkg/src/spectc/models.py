"""Random low-rank tensor models and observation-mask samplers.

Reproducibility contract: every draw goes through a Philox counter-based
generator keyed by ``numpy.random.SeedSequence((seed, *stream))``, so results
are identical across platforms, runs, and degrees of parallelism as long as
callers use disjoint stream keys. Gaussian variates come from numpy's
``Generator.normal`` (ziggurat); that choice is part of the contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleInputError
from .tensors import ObservationMask, Tensor

__all__ = [
    "RandomTensorSpec",
    "stream_rng",
    "child_seeds",
    "sample_components",
    "from_components",
    "generate",
    "sample_mask_exact",
    "sample_mask_bernoulli",
]

DISTRIBUTIONS = ("gaussian", "rademacher")


def stream_rng(seed: int, *stream) -> np.random.Generator:
    """Independent generator for the given seed and stream key."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, *stream))))


def child_seeds(seed: int, *stream, count: int) -> list:
    """Derive ``count`` integer sub-seeds from (seed, stream), for APIs that
    take plain integers."""
    state = np.random.SeedSequence((seed, *stream)).generate_state(count, np.uint64)
    return [int(s) for s in state]


@dataclass(frozen=True)
class RandomTensorSpec:
    """Model for a symmetric rank-r tensor built from i.i.d. components.

    Components a_1..a_r are i.i.d. vectors in R^d with zero mean and second
    moment I_d/d, either gaussian or rademacher (entries +-1/sqrt(d)); the
    tensor is the sum of their k-fold self outer products. ``tau`` records
    the subgaussian proxy of the component law (1.0 for both built-ins); it
    is diagnostic only.
    """

    dim: int
    rank: int
    order: int = 3
    distribution: str = "gaussian"
    seed: int = 0
    tau: float = 1.0

    def __post_init__(self):
        if self.dim < 1 or self.rank < 1:
            raise ValueError("dim and rank must be positive")
        if self.order < 2:
            raise ValueError("order must be at least 2")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}")


def sample_components(spec: RandomTensorSpec, stream: int = 0) -> np.ndarray:
    """Draw the (rank, dim) component matrix for ``spec``."""
    rng = stream_rng(spec.seed, stream)
    d, r = spec.dim, spec.rank
    if spec.distribution == "gaussian":
        return rng.normal(scale=1.0 / np.sqrt(d), size=(r, d))
    signs = rng.integers(0, 2, size=(r, d)) * 2 - 1
    return signs / np.sqrt(d)


def from_components(components, order: int) -> Tensor:
    """Sum of k-fold self outer products of the given vectors.

    Each entry is evaluated once at its sorted index and broadcast to the
    whole permutation orbit, so the result is symmetric to the last bit.
    """
    a = np.atleast_2d(np.asarray(components, dtype=float))
    if order < 2:
        raise ValueError("order must be at least 2")
    r, d = a.shape
    idx = np.indices((d,) * order).reshape(order, -1)
    sidx = np.sort(idx, axis=0)
    prod = np.ones((r, d**order))
    for mode in range(order):
        prod *= a[:, sidx[mode]]
    values = prod.sum(axis=0).reshape((d,) * order)
    return Tensor(values, symmetric=True)


def generate(spec: RandomTensorSpec, stream: int = 0) -> tuple:
    """Sample ``(tensor, components)`` for the model; deterministic in
    (spec.seed, stream)."""
    comps = sample_components(spec, stream)
    return from_components(comps, spec.order), comps


def sample_mask_exact(order: int, dim: int, n: int, rng) -> ObservationMask:
    """Uniformly random subset of exactly n entries of the index cube."""
    total = dim**order
    if not 0 < n <= total:
        raise InfeasibleInputError(f"cannot reveal {n} of {total} entries")
    flat = rng.choice(total, size=n, replace=False)
    return ObservationMask(order, dim, flat)


def sample_mask_bernoulli(order: int, dim: int, delta: float, rng) -> ObservationMask:
    """Each entry revealed independently with probability delta."""
    if not 0.0 < delta <= 1.0:
        raise InfeasibleInputError(f"reveal probability must lie in (0, 1], got {delta}")
    total = dim**order
    flat = np.flatnonzero(rng.random(total) < delta)
    return ObservationMask(order, dim, flat)
