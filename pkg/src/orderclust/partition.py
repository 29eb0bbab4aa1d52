"""Labeled partitions of ``{0, ..., n-1}``.

Blocks are identified by their minimum member, which keeps labels stable
under merges and independent of the order in which blocks were formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import PartitionNotCovering


@dataclass(frozen=True, eq=False)
class LabeledPartition:
    """A partition stored as one block label per element.

    ``labels[x]`` is the smallest element of the block containing ``x``.
    """

    labels: np.ndarray
    _key: tuple = field(init=False, repr=False)

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_key", tuple(labels.tolist()))

    @classmethod
    def singletons(cls, n: int) -> "LabeledPartition":
        return cls(np.arange(n))

    @classmethod
    def one_block(cls, n: int) -> "LabeledPartition":
        return cls(np.zeros(n, dtype=np.int64))

    @classmethod
    def from_assignment(cls, assignment: Sequence) -> "LabeledPartition":
        """Canonicalise an arbitrary per-element cluster id vector."""
        assignment = list(assignment)
        first: dict = {}
        labels = np.empty(len(assignment), dtype=np.int64)
        for x, a in enumerate(assignment):
            labels[x] = first.setdefault(a, x)
        return cls(labels)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int | None = None) -> "LabeledPartition":
        blocks = [sorted(int(x) for x in b) for b in blocks]
        if any(not b for b in blocks):
            raise PartitionNotCovering("partition contains an empty block")
        total = sum(len(b) for b in blocks)
        if n is None:
            n = total
        labels = np.full(n, -1, dtype=np.int64)
        for b in blocks:
            if b[0] < 0 or b[-1] >= n:
                raise PartitionNotCovering(f"block {b} has members outside 0..{n - 1}")
            if np.any(labels[b] >= 0):
                raise PartitionNotCovering(f"block {b} overlaps another block")
            labels[b] = b[0]
        if np.any(labels < 0):
            missing = np.flatnonzero(labels < 0).tolist()
            raise PartitionNotCovering(f"elements {missing} are not covered")
        return cls(labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def blocks(self) -> list[tuple[int, ...]]:
        """Blocks as sorted tuples, ordered by minimum member."""
        out: dict[int, list[int]] = {}
        for x, lab in enumerate(self._key):
            out.setdefault(lab, []).append(x)
        return [tuple(out[k]) for k in sorted(out)]

    @property
    def m(self) -> int:
        return len(set(self._key))

    def block_index(self) -> np.ndarray:
        """Map each element to the position of its block in ``blocks``."""
        _, idx = np.unique(self.labels, return_inverse=True)
        return idx.reshape(-1)

    def membership(self) -> np.ndarray:
        """``n x m`` boolean membership matrix, columns ordered like ``blocks``."""
        idx = self.block_index()
        mat = np.zeros((self.n, idx.max() + 1 if self.n else 0), dtype=bool)
        mat[np.arange(self.n), idx] = True
        return mat

    def __eq__(self, other) -> bool:
        return isinstance(other, LabeledPartition) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"LabeledPartition({self.blocks})"
