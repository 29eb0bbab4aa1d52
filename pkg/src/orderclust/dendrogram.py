"""Partial dendrograms, their ultrametric completion and serialisation.

A partial dendrogram is stored as its merge history: an ordered list of
``(a, b, height)`` records over block labels, where a block's label is its
smallest member.  The partition at level ``t`` is the result of applying
every merge of height ``<= t``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .dissimilarity import DissimilarityMatrix
from .errors import (DimensionMismatch, InvalidMergeSequence, NonMonotoneHeights,
                     NonPositiveEpsilon, NotComplete)
from .partition import LabeledPartition

DEFAULT_EPSILON = 1e-12


class Merge(NamedTuple):
    a: int
    b: int
    height: float


@dataclass(frozen=True)
class MergeHistory:
    n: int
    merges: tuple[Merge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "merges",
                           tuple(Merge(int(a), int(b), float(h)) for a, b, h in self.merges))


@dataclass(frozen=True, eq=False)
class PartialDendrogram:
    """A validated merge history viewed as a map from levels to partitions."""

    history: MergeHistory
    _labels: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.history.n
        labels = np.arange(n)
        prev = -math.inf
        for k, (a, b, h) in enumerate(self.history.merges):
            if h < 0 or not math.isfinite(h):
                raise InvalidMergeSequence(f"merge {k} has invalid height {h}")
            if h < prev:
                raise NonMonotoneHeights(f"merge {k} at height {h} follows height {prev}")
            prev = h
            if a == b or not (0 <= a < n and 0 <= b < n) or labels[a] != a or labels[b] != b:
                raise InvalidMergeSequence(f"merge {k} joins ({a}, {b}), which are not two current blocks")
            lo, hi = min(a, b), max(a, b)
            labels[labels == hi] = lo
        labels.setflags(write=False)
        object.__setattr__(self, "_labels", labels)

    @property
    def n(self) -> int:
        return self.history.n

    @property
    def merges(self) -> tuple[Merge, ...]:
        return self.history.merges

    @property
    def heights(self) -> np.ndarray:
        return np.array([m.height for m in self.merges], dtype=float)

    @property
    def final_partition(self) -> LabeledPartition:
        return LabeledPartition(self._labels)

    @property
    def is_complete(self) -> bool:
        return self.n <= 1 or not np.any(self._labels)

    @property
    def diameter(self) -> float:
        return self.merges[-1].height if self.merges else 0.0

    def theta_at(self, t: float) -> LabeledPartition:
        labels = np.arange(self.n)
        for a, b, h in self.merges:
            if h > t:
                break
            labels[labels == max(a, b)] = min(a, b)
        return LabeledPartition(labels)

    def image(self) -> list[tuple[float, LabeledPartition]]:
        """Distinct partitions taken by the map, each with the level where it starts."""
        labels = np.arange(self.n)
        out: list[tuple[float, LabeledPartition]] = []
        merges = self.merges
        if not merges or merges[0].height > 0:
            out.append((0.0, LabeledPartition(labels)))
        for k, (a, b, h) in enumerate(merges):
            labels[labels == max(a, b)] = min(a, b)
            if k + 1 == len(merges) or merges[k + 1].height > h:
                out.append((h, LabeledPartition(labels)))
        return out

    @cached_property
    def canonical(self) -> tuple:
        """Order-independent key: the partition reached at each distinct height."""
        return (self.n, tuple((h, p._key) for h, p in self.image()))

    def __eq__(self, other) -> bool:
        return isinstance(other, PartialDendrogram) and self.canonical == other.canonical

    def __hash__(self) -> int:
        return hash(self.canonical)

    def same_as(self, other: "PartialDendrogram", rtol: float = 1e-12) -> bool:
        """Equality allowing heights to differ by floating point rounding."""
        a, b = self.image(), other.image()
        if self.n != other.n or len(a) != len(b):
            return False
        return all(pa == pb and math.isclose(ha, hb, rel_tol=rtol, abs_tol=rtol)
                   for (ha, pa), (hb, pb) in zip(a, b))

    def __repr__(self) -> str:
        return f"PartialDendrogram(n={self.n}, merges={list(self.merges)})"

    # serialisation

    def to_dict(self) -> dict:
        return {"n": self.n,
                "merges": [{"a": a, "b": b, "height": h} for a, b, h in self.merges]}

    @classmethod
    def from_dict(cls, data: dict) -> "PartialDendrogram":
        merges = [(m["a"], m["b"], m["height"]) for m in data["merges"]]
        return from_merge_history(MergeHistory(int(data["n"]), tuple(merges)))

    def linkage_matrix(self) -> np.ndarray:
        """Rows ``(id_a, id_b, height, size)`` with new clusters numbered from ``n``.

        Matches the layout of scipy's hierarchy module, so complete dendrograms
        can be handed to its plotting and cut utilities.
        """
        cluster_of = {x: x for x in range(self.n)}
        size = {x: 1 for x in range(self.n)}
        rows = []
        for k, (a, b, h) in enumerate(self.merges):
            ia, ib = cluster_of[a], cluster_of[b]
            new = self.n + k
            size[new] = size[ia] + size[ib]
            rows.append((min(ia, ib), max(ia, ib), h, size[new]))
            cluster_of[min(a, b)] = new
        return np.array(rows, dtype=float).reshape(-1, 4)


def from_merge_history(history: MergeHistory) -> PartialDendrogram:
    return PartialDendrogram(history)


def dendrogram(n: int, merges: Iterable[tuple[int, int, float]]) -> PartialDendrogram:
    """Shorthand constructor from plain tuples."""
    return PartialDendrogram(MergeHistory(n, tuple(merges)))


def theta_at(theta: PartialDendrogram, t: float) -> LabeledPartition:
    return theta.theta_at(t)


def diameter_of(theta: PartialDendrogram) -> float:
    return theta.diameter


def _fill_components(theta: PartialDendrogram, fill: float) -> np.ndarray:
    n = theta.n
    u = np.full((n, n), fill, dtype=float)
    members = {x: [x] for x in range(n)}
    for a, b, h in theta.merges:
        ma, mb = members.pop(a), members.pop(b)
        u[np.ix_(ma, mb)] = h
        u[np.ix_(mb, ma)] = h
        members[min(a, b)] = ma + mb
    np.fill_diagonal(u, 0.0)
    return u


def _to_matrix(u: np.ndarray) -> DissimilarityMatrix:
    iu = np.triu_indices(u.shape[0], k=1)
    return DissimilarityMatrix(u[iu], u.shape[0])


def psi(theta: PartialDendrogram) -> DissimilarityMatrix:
    """Ultrametric of a complete dendrogram: the height where two elements first share a block."""
    if not theta.is_complete:
        raise NotComplete("psi needs a complete dendrogram; use complete_ultrametric for partial ones")
    return _to_matrix(_fill_components(theta, 0.0))


def effective_epsilon(diam: float, eps: float, allow_zero: bool = False) -> float:
    """Validate ``eps`` and make sure ``diam + eps`` is strictly above ``diam``."""
    if eps < 0 or (eps == 0 and not allow_zero) or not math.isfinite(eps):
        raise NonPositiveEpsilon(f"epsilon must be positive, got {eps}")
    if eps > 0 and diam + eps <= diam:
        bumped = float(np.nextafter(diam, math.inf) - diam)
        warnings.warn(f"epsilon {eps} vanishes next to diameter {diam}; using {bumped}", stacklevel=3)
        return bumped
    return eps


def completion_height(theta: PartialDendrogram, eps: float, allow_zero: bool = False) -> float:
    return theta.diameter + effective_epsilon(theta.diameter, eps, allow_zero)


def kappa(theta: PartialDendrogram, eps: float = DEFAULT_EPSILON,
          allow_zero: bool = False) -> PartialDendrogram:
    """Complete ``theta`` by joining all remaining blocks at ``diam + eps``."""
    top = completion_height(theta, eps, allow_zero)
    if theta.is_complete:
        return theta
    roots = sorted(set(theta.final_partition.labels.tolist()))
    extra = [(roots[0], r, top) for r in roots[1:]]
    return PartialDendrogram(MergeHistory(theta.n, theta.merges + tuple(extra)))


def complete_ultrametric(theta: PartialDendrogram, eps: float = DEFAULT_EPSILON,
                         allow_zero: bool = False) -> DissimilarityMatrix:
    """Within-component heights, and ``diam + eps`` between components."""
    top = completion_height(theta, eps, allow_zero)
    return _to_matrix(_fill_components(theta, top))


@dataclass(frozen=True)
class ErrorProfile:
    alpha: float
    beta: float
    mean_error: float


def epsilon_error_profile(theta: PartialDendrogram, d: DissimilarityMatrix, p: float = 1,
                          eps: float = DEFAULT_EPSILON) -> ErrorProfile:
    """Split the p-th power fit error into intra-block and cross-block parts."""
    if theta.n != d.n:
        raise DimensionMismatch(f"dendrogram has {theta.n} elements, measure has {d.n}")
    u = complete_ultrametric(theta, eps)
    labels = theta.final_partition.labels
    iu = np.triu_indices(d.n, k=1)
    same = labels[iu[0]] == labels[iu[1]]
    err = np.abs(u.values - d.values) ** p
    alpha = float(err[same].sum())
    beta = float(err[~same].sum())
    return ErrorProfile(alpha, beta, (alpha + beta) / d.n if d.n else 0.0)


def save_json(theta: PartialDendrogram, path: str | Path, **meta) -> None:
    data = theta.to_dict()
    data.update(meta)
    Path(path).write_text(json.dumps(data, indent=2))


def load_json(path: str | Path) -> PartialDendrogram:
    return PartialDendrogram.from_dict(json.loads(Path(path).read_text()))


def write_linkage_text(theta: PartialDendrogram, path: str | Path) -> None:
    rows = theta.linkage_matrix()
    lines = [f"{int(a)} {int(b)} {float(h)!r} {int(s)}" for a, b, h, s in rows]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
