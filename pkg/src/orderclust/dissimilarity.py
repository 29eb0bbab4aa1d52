"""Dissimilarity measures, linkage functions and related summaries."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import (DimensionMismatch, EmptyBlock, OverlappingBlocks,
                     TooFewElements)
from .partition import LabeledPartition
from .poset import StrictPoset, induced_quotient

LinkageKind = Literal["single", "average", "complete"]
LINKAGES: tuple[str, ...] = ("single", "average", "complete")


def check_kind(kind: str) -> str:
    if kind not in LINKAGES:
        raise ValueError(f"unknown linkage {kind!r}; expected one of {LINKAGES}")
    return kind


def condensed_size(n: int) -> int:
    return n * (n - 1) // 2


def n_from_condensed(size: int) -> int:
    n = int(round((1 + np.sqrt(1 + 8 * size)) / 2))
    if condensed_size(n) != size:
        raise DimensionMismatch(f"{size} is not a triangular number of pairs")
    return n


class DissimilarityMatrix:
    """Symmetric, non-negative, zero-diagonal measure over ``n`` elements.

    Values are stored condensed: pair ``(i, j)`` with ``i < j`` in row-major
    upper-triangle order, the same layout scipy uses.
    """

    def __init__(self, values: Sequence[float] | np.ndarray, n: int | None = None):
        values = np.array(values, dtype=np.float64, copy=True).reshape(-1)
        if n is None:
            n = n_from_condensed(values.size)
        elif values.size != condensed_size(n):
            raise DimensionMismatch(f"expected {condensed_size(n)} values for n={n}, got {values.size}")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("dissimilarities must be finite and non-negative")
        values.setflags(write=False)
        self.n = n
        self.values = values

    @classmethod
    def from_square(cls, mat, check_symmetric: bool = True) -> "DissimilarityMatrix":
        mat = np.asarray(mat, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch("square matrix expected")
        if check_symmetric and not np.allclose(mat, mat.T, rtol=0, atol=1e-12):
            raise ValueError("matrix is not symmetric")
        if np.any(np.diag(mat) != 0):
            raise ValueError("diagonal must be zero")
        iu = np.triu_indices(mat.shape[0], k=1)
        return cls(mat[iu], mat.shape[0])

    @cached_property
    def square(self) -> np.ndarray:
        mat = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n, k=1)
        mat[iu] = self.values
        mat.T[iu] = self.values
        mat.setflags(write=False)
        return mat

    def __call__(self, i: int, j: int) -> float:
        return float(self.square[i, j])

    def __eq__(self, other) -> bool:
        return (isinstance(other, DissimilarityMatrix) and self.n == other.n
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"DissimilarityMatrix(n={self.n})"


@dataclass(frozen=True)
class OrderedSpace:
    """An ordered dissimilarity space: a strict order plus a measure on the same set."""

    poset: StrictPoset
    dist: DissimilarityMatrix

    def __post_init__(self):
        if self.poset.n != self.dist.n:
            raise DimensionMismatch(
                f"order has {self.poset.n} elements, dissimilarity has {self.dist.n}")

    @property
    def n(self) -> int:
        return self.dist.n

    @classmethod
    def unordered(cls, dist: DissimilarityMatrix) -> "OrderedSpace":
        return cls(StrictPoset.empty(dist.n), dist)


def _blocks_ok(p: Sequence[int], q: Sequence[int]) -> None:
    if len(p) == 0 or len(q) == 0:
        raise EmptyBlock("linkage needs non-empty blocks")
    if set(p) & set(q):
        raise OverlappingBlocks("linkage blocks must be disjoint")


def linkage(kind: str, p_block: Iterable[int], q_block: Iterable[int], d: DissimilarityMatrix) -> float:
    p = list(p_block)
    q = list(q_block)
    _blocks_ok(p, q)
    sub = d.square[np.ix_(p, q)]
    kind = check_kind(kind)
    if kind == "single":
        return float(sub.min())
    if kind == "complete":
        return float(sub.max())
    return float(sub.sum() / (len(p) * len(q)))


def separation(d: DissimilarityMatrix) -> float:
    if d.n < 2:
        raise TooFewElements("separation needs at least two elements")
    return float(d.values.min())


def diameter(d: DissimilarityMatrix) -> float:
    return float(d.values.max()) if d.values.size else 0.0


def is_ultrametric(d: DissimilarityMatrix, atol: float = 0.0) -> bool:
    """Check ``d(x, z) <= max(d(x, y), d(y, z))`` on every triple."""
    u = d.square
    for y in range(d.n):
        bound = np.maximum(u[:, y][:, None], u[y][None, :])
        if np.any(u > bound + atol):
            return False
    return True


def block_linkage_matrix(kind: str, partition: LabeledPartition, d: DissimilarityMatrix) -> np.ndarray:
    """Linkage values between all blocks of ``partition`` (diagonal is inf)."""
    blocks = partition.blocks
    m = len(blocks)
    out = np.full((m, m), np.inf)
    for a in range(m):
        for b in range(a + 1, m):
            out[a, b] = out[b, a] = linkage(kind, blocks[a], blocks[b], d)
    return out


def _noncomparable_values(space: OrderedSpace, kind: str, partition: LabeledPartition):
    rel = induced_quotient(space.poset, partition)
    comp = rel.adj | rel.adj.T
    vals = block_linkage_matrix(kind, partition, space.dist)
    iu = np.triu_indices(rel.m, k=1)
    free = ~comp[iu]
    return rel.blocks, iu, vals[iu], free


def noncomparable_separation(space: OrderedSpace, kind: str, partition: LabeledPartition) -> float | None:
    """Smallest linkage value between non-comparable blocks, or None if there is none."""
    _, _, vals, free = _noncomparable_values(space, kind, partition)
    if not free.any():
        return None
    return float(vals[free].min())


def minimal_noncomparable_pairs(space: OrderedSpace, kind: str, partition: LabeledPartition,
                                tol: float = 0.0) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All non-comparable block pairs whose linkage ties with the minimum.

    ``tol`` is relative: values up to ``min * (1 + tol)`` count as tied.
    """
    blocks, iu, vals, free = _noncomparable_values(space, kind, partition)
    if not free.any():
        return []
    best = vals[free].min()
    hit = free & (vals <= tie_threshold(best, tol))
    return [(blocks[a], blocks[b]) for a, b, h in zip(iu[0], iu[1], hit) if h]


def tie_threshold(best: float, tol: float) -> float:
    return best + tol * abs(best) if tol else best


def pnorm_distance(u: DissimilarityMatrix, d: DissimilarityMatrix, p: float = 1) -> float:
    """p-norm of the entrywise difference, each unordered pair counted once."""
    if u.n != d.n:
        raise DimensionMismatch(f"sizes differ: {u.n} vs {d.n}")
    if p < 1:
        raise ValueError("p must be at least 1")
    diff = np.abs(u.values - d.values)
    if p == 1:
        return float(diff.sum())
    return float(np.sum(diff ** p) ** (1.0 / p))


def comparable_saturation(space: OrderedSpace, max_value: float) -> DissimilarityMatrix:
    """Copy of the measure with every comparable pair set to ``max_value``."""
    if max_value < diameter(space.dist):
        warnings.warn(f"saturation value {max_value} is below the diameter "
                      f"{diameter(space.dist)}; comparable pairs may merge early",
                      stacklevel=2)
    iu = np.triu_indices(space.n, k=1)
    comp = space.poset.comparability()[iu]
    vals = space.dist.values.copy()
    vals[comp] = max_value
    return DissimilarityMatrix(vals, space.n)


def read_matrix_csv(path: str | Path) -> DissimilarityMatrix:
    """Read a full square matrix or condensed lower-triangle rows.

    Lower-triangle rows hold ``i`` values on row ``i`` (row 0 may be empty or
    omitted, or carry the zero diagonal, giving ``i + 1`` values).
    """
    with open(path, newline="") as fh:
        rows = [[float(v) for v in r if v.strip() != ""] for r in csv.reader(fh)]
    while rows and not rows[-1]:
        rows.pop()
    lengths = [len(r) for r in rows]
    n = len(rows)
    if n and all(k == n for k in lengths):
        return DissimilarityMatrix.from_square(np.array(rows))
    if lengths and lengths[0] == 0:
        rows = rows[1:]
        lengths = lengths[1:]
    if lengths == list(range(1, len(rows) + 1)):
        if all(r[-1] == 0 for r in rows):  # includes the zero diagonal
            rows = [r[:-1] for r in rows]
            n = len(rows)
        else:
            n = len(rows) + 1
            rows = [[]] + rows
    else:
        raise DimensionMismatch(f"cannot interpret row lengths {lengths} as a distance matrix")
    mat = np.zeros((n, n))
    for i, r in enumerate(rows):
        mat[i, :len(r)] = r
    mat = mat + mat.T
    return DissimilarityMatrix.from_square(mat)


def write_matrix_csv(d: DissimilarityMatrix, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in d.square:
            w.writerow([repr(float(v)) for v in row])
