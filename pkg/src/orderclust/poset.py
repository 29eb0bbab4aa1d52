"""Strict partial orders and the relations they induce on partitions."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ComparableBlocks, CycleDetected, PartitionNotCovering
from .partition import LabeledPartition


def close_relation(adj: np.ndarray) -> np.ndarray:
    """Transitive closure of an arbitrary boolean relation (cycles allowed).

    Warshall's algorithm, one vectorised sweep per pivot.
    """
    reach = np.array(adj, dtype=bool, copy=True)
    for k in range(reach.shape[0]):
        col = reach[:, k]
        if col.any():
            reach |= np.outer(col, reach[k])
    return reach


@dataclass(frozen=True, eq=False)
class StrictPoset:
    """A transitively closed, irreflexive relation on ``n`` elements.

    ``reach[i, j]`` is True iff ``i < j``.
    """

    reach: np.ndarray

    def __post_init__(self):
        reach = np.array(self.reach, dtype=bool, copy=True)
        if reach.ndim != 2 or reach.shape[0] != reach.shape[1]:
            raise ValueError("reach must be a square matrix")
        reach.setflags(write=False)
        object.__setattr__(self, "reach", reach)

    @classmethod
    def empty(cls, n: int) -> "StrictPoset":
        return cls(np.zeros((n, n), dtype=bool))

    @property
    def n(self) -> int:
        return self.reach.shape[0]

    def less(self, i: int, j: int) -> bool:
        return bool(self.reach[i, j])

    def comparable(self, i: int, j: int) -> bool:
        return bool(self.reach[i, j] or self.reach[j, i])

    def comparability(self) -> np.ndarray:
        """Symmetric matrix of comparable pairs."""
        return self.reach | self.reach.T

    def edges(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.reach))]

    def is_empty_order(self) -> bool:
        return not self.reach.any()

    def check(self) -> None:
        """Assert the strict order axioms; used by tests and loaders."""
        r = self.reach
        assert not np.diag(r).any(), "relation is not irreflexive"
        assert not (r & r.T).any(), "relation is not antisymmetric"
        closed = (r.astype(np.int64) @ r.astype(np.int64)) > 0
        assert not (closed & ~r).any(), "relation is not transitive"

    def __eq__(self, other) -> bool:
        return isinstance(other, StrictPoset) and np.array_equal(self.reach, other.reach)

    def __hash__(self) -> int:
        return hash(self.reach.tobytes())


def transitive_closure(edges: Iterable[tuple[int, int]], n: int) -> StrictPoset:
    """Close a DAG given as ``(i, j)`` pairs meaning ``i < j``.

    Raises :class:`CycleDetected` naming the lowest-indexed element that lies
    on a cycle.
    """
    adj = np.zeros((n, n), dtype=bool)
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"edge ({i}, {j}) out of range for n={n}")
        adj[i, j] = True
    # Kahn's algorithm, smallest available index first for determinism
    indeg = adj.sum(axis=0)
    order: list[int] = []
    ready = sorted(np.flatnonzero(indeg == 0).tolist())
    indeg = indeg.copy()
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in np.flatnonzero(adj[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(int(w))
        ready.sort()
    if len(order) < n:
        on_cycle = np.flatnonzero(np.diag(close_relation(adj)))
        raise CycleDetected(int(on_cycle[0]))
    reach = np.zeros((n, n), dtype=bool)
    for v in reversed(order):
        for w in np.flatnonzero(adj[v]):
            reach[v, w] = True
            reach[v] |= reach[w]
    return StrictPoset(reach)


def is_antichain(poset: StrictPoset, block: Iterable[int]) -> bool:
    idx = np.fromiter(block, dtype=np.int64)
    if idx.size < 2:
        return True
    return not poset.reach[np.ix_(idx, idx)].any()


@dataclass(frozen=True, eq=False)
class InducedRelation:
    """The relation induced on the blocks of a partition.

    ``adj[a, b]`` relates ``blocks[a]`` to ``blocks[b]``; it is the transitive
    closure of the block-level lift of the element order, so a self-loop
    ``adj[a, a]`` marks a block lying on a cycle.
    """

    blocks: tuple[tuple[int, ...], ...]
    adj: np.ndarray

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def acyclic(self) -> bool:
        return not np.diag(self.adj).any()

    def index_of(self, label: int) -> int:
        """Position of the block whose minimum member is ``label``."""
        for pos, b in enumerate(self.blocks):
            if b[0] == label:
                return pos
        raise KeyError(label)


def _check_partition(poset: StrictPoset, partition: LabeledPartition) -> None:
    if partition.n != poset.n:
        raise PartitionNotCovering(
            f"partition covers {partition.n} elements, order has {poset.n}")


def induced_quotient(poset: StrictPoset, partition: LabeledPartition) -> InducedRelation:
    _check_partition(poset, partition)
    mem = partition.membership().astype(np.int64)
    lifted = (mem.T @ poset.reach.astype(np.int64) @ mem) > 0
    return InducedRelation(tuple(partition.blocks), close_relation(lifted))


def base_space_projection(poset: StrictPoset, partition: LabeledPartition) -> np.ndarray:
    """Pull the induced block relation back to element pairs."""
    rel = induced_quotient(poset, partition)
    idx = partition.block_index()
    return rel.adj[np.ix_(idx, idx)]


def quotient_merge(rel: InducedRelation, a: int, b: int) -> InducedRelation:
    """Merge two non-comparable blocks, given by position, and re-close.

    The merged block takes the smaller minimum member as its label and the
    block list stays sorted by label.
    """
    adj = rel.adj
    if adj[a, b] or adj[b, a]:
        raise ComparableBlocks(f"blocks {rel.blocks[a]} and {rel.blocks[b]} are comparable")
    if a == b:
        raise ComparableBlocks("cannot merge a block with itself")
    merged = tuple(sorted(rel.blocks[a] + rel.blocks[b]))
    keep = [i for i in range(rel.m) if i != b]
    new = adj.copy()
    new[a] = adj[a] | adj[b]
    new[:, a] = adj[:, a] | adj[:, b]
    new[a, a] = adj[a, a] | adj[b, b]
    new = new[np.ix_(keep, keep)]
    blocks = [rel.blocks[i] for i in keep]
    pos = keep.index(a)
    blocks[pos] = merged
    order = sorted(range(len(blocks)), key=lambda i: blocks[i][0])
    new = new[np.ix_(order, order)]
    blocks = [blocks[i] for i in order]
    return InducedRelation(tuple(blocks), close_relation(new))


def read_edge_list(path: str | Path) -> list[tuple[int, int]]:
    """Read ``i,j`` lines (0-based, meaning ``i < j``); blank lines and ``#`` comments skipped."""
    edges = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        i, j = line.split(",")
        edges.append((int(i), int(j)))
    return edges


def write_edge_list(poset: StrictPoset, path: str | Path) -> None:
    lines = [f"{i},{j}" for i, j in poset.edges()]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
