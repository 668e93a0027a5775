"""Text file formats. All indices are 1-based on disk; floats are written
with 17 significant digits so round trips are bit exact.

- dense tensor:   line 1 "k d", then d^k values in C order;
- observations:   line 1 "k d n", then n lines "i1 ... ik value";
- matrix:         line 1 "d1 d2", then d1*d2 values in row-major order;
- components:     line 1 "r d", then r rows of d values.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .tensors import ObservationMask, PartialTensor, Tensor

__all__ = [
    "save_tensor",
    "load_tensor",
    "save_observations",
    "load_observations",
    "save_matrix",
    "load_matrix",
    "save_components",
    "load_components",
]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _tokens(path):
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read().split()


def save_tensor(t: Tensor, path) -> None:
    v = t.values.ravel()
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"{t.order} {t.dim}\n")
        d = t.dim
        for start in range(0, v.size, d):
            handle.write(" ".join(_fmt(x) for x in v[start : start + d]) + "\n")


def load_tensor(path) -> Tensor:
    tokens = _tokens(path)
    if len(tokens) < 2:
        raise ConfigError(f"{path}: missing tensor header")
    k, d = int(tokens[0]), int(tokens[1])
    values = np.array([float(x) for x in tokens[2:]])
    if values.size != d**k:
        raise ConfigError(
            f"{path}: expected {d**k} values for order {k}, dim {d}; got {values.size}"
        )
    return Tensor.from_flat(values, k, d)


def save_observations(pt: PartialTensor, path) -> None:
    entries = pt.mask.entries()
    values = pt.values.ravel()[pt.mask.flat]
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"{pt.order} {pt.dim} {pt.mask.n}\n")
        for index, value in zip(entries, values):
            ones_based = " ".join(str(i + 1) for i in index)
            handle.write(f"{ones_based} {_fmt(value)}\n")


def load_observations(path) -> PartialTensor:
    tokens = _tokens(path)
    if len(tokens) < 3:
        raise ConfigError(f"{path}: missing observation header")
    k, d, n = int(tokens[0]), int(tokens[1]), int(tokens[2])
    body = tokens[3:]
    if len(body) != n * (k + 1):
        raise ConfigError(f"{path}: expected {n} lines of {k} indices and a value")
    values = np.zeros((d,) * k)
    tuples = []
    for row in range(n):
        chunk = body[row * (k + 1) : (row + 1) * (k + 1)]
        index = tuple(int(i) - 1 for i in chunk[:k])
        if any(i < 0 or i >= d for i in index):
            raise ConfigError(f"{path}: index out of range on entry {row + 1}")
        tuples.append(index)
        values[index] = float(chunk[k])
    mask = ObservationMask.from_tuples(k, d, tuples)
    if mask.n != n:
        raise ConfigError(f"{path}: duplicate observation indices")
    return PartialTensor(values, mask)


def save_matrix(m, path) -> None:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"{a.shape[0]} {a.shape[1]}\n")
        for row in a:
            handle.write(" ".join(_fmt(x) for x in row) + "\n")


def load_matrix(path) -> np.ndarray:
    tokens = _tokens(path)
    if len(tokens) < 2:
        raise ConfigError(f"{path}: missing matrix header")
    d1, d2 = int(tokens[0]), int(tokens[1])
    values = np.array([float(x) for x in tokens[2:]])
    if values.size != d1 * d2:
        raise ConfigError(f"{path}: expected {d1 * d2} values, got {values.size}")
    return values.reshape(d1, d2)


def save_components(components, path) -> None:
    a = np.atleast_2d(np.asarray(components, dtype=float))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"{a.shape[0]} {a.shape[1]}\n")
        for row in a:
            handle.write(" ".join(_fmt(x) for x in row) + "\n")


def load_components(path) -> np.ndarray:
    tokens = _tokens(path)
    if len(tokens) < 2:
        raise ConfigError(f"{path}: missing components header")
    r, d = int(tokens[0]), int(tokens[1])
    values = np.array([float(x) for x in tokens[2:]])
    if values.size != r * d:
        raise ConfigError(f"{path}: expected {r * d} values, got {values.size}")
    return values.reshape(r, d)
