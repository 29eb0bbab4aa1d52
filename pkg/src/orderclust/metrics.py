"""Evaluation measures for partitions, induced orders and hierarchies."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .dendrogram import PartialDendrogram
from .errors import LengthMismatch, SizeMismatch
from .partition import LabeledPartition
from .poset import StrictPoset, base_space_projection


def _pairs(k):
    k = np.asarray(k, dtype=float)
    return k * (k - 1) / 2


def ari(a: LabeledPartition, b: LabeledPartition) -> float:
    """Adjusted Rand index, Hubert and Arabie form.

    When both partitions are trivial in the same way (the adjustment is 0/0)
    the partitions agree and 1 is returned.
    """
    if a.n != b.n:
        raise SizeMismatch(f"partitions over {a.n} and {b.n} elements")
    n = a.n
    if n < 2:
        return 1.0
    _, rows = np.unique(a.labels, return_inverse=True)
    _, cols = np.unique(b.labels, return_inverse=True)
    table = np.zeros((rows.max() + 1, cols.max() + 1))
    np.add.at(table, (rows.ravel(), cols.ravel()), 1)
    index = _pairs(table).sum()
    sum_a = _pairs(table.sum(axis=1)).sum()
    sum_b = _pairs(table.sum(axis=0)).sum()
    expected = sum_a * sum_b / _pairs(n)
    top = (sum_a + sum_b) / 2
    if top == expected:
        return 1.0
    return float((index - expected) / (top - expected))


def oari_row(a_row: np.ndarray, b_row: np.ndarray) -> float:
    a_row = np.asarray(a_row, dtype=bool)
    b_row = np.asarray(b_row, dtype=bool)
    a = float(np.sum(a_row & b_row))
    b = float(np.sum(~a_row & b_row))
    c = float(np.sum(a_row & ~b_row))
    d = float(np.sum(~a_row & ~b_row))
    den = (a + b) * (b + d) + (a + c) * (c + d)
    if den == 0:
        return 1.0 if np.array_equal(a_row, b_row) else 0.0
    return 2 * (a * d - b * c) / den


def oari(A: np.ndarray, B: np.ndarray) -> tuple[list[float], float]:
    """Element-wise adjusted order Rand index of two element-level relations.

    Row ``i`` of each relation (diagonal included, so induced loops count)
    is compared by its inner-product agreement counts.  A row with a zero
    denominator scores 1 if the rows are identical and 0 otherwise.
    Returns the per-element values and their mean.
    """
    A = np.asarray(A, dtype=bool)
    B = np.asarray(B, dtype=bool)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SizeMismatch(f"relations of shape {A.shape} and {B.shape}")
    n = A.shape[0]
    if n == 0:
        return [], 1.0
    a = (A & B).sum(axis=1).astype(float)
    b = (~A & B).sum(axis=1).astype(float)
    c = (A & ~B).sum(axis=1).astype(float)
    d = (~A & ~B).sum(axis=1).astype(float)
    den = (a + b) * (b + d) + (a + c) * (c + d)
    same = np.all(A == B, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(den == 0, np.where(same, 1.0, 0.0), 2 * (a * d - b * c) / den)
    per = [float(v) for v in vals]
    return per, float(np.mean(vals))


def loops(poset: StrictPoset, partition: LabeledPartition) -> float:
    """Fraction of elements whose block lies on a cycle of the induced relation."""
    if partition.n == 0:
        return 0.0
    proj = base_space_projection(poset, partition)
    return float(np.diag(proj).sum() / partition.n)


def best_cut_by_ari(theta: PartialDendrogram, planted: LabeledPartition) -> tuple[LabeledPartition, float]:
    """Partition in the image of ``theta`` with the highest ARI to ``planted``.

    Ties go to the finest (lowest) level.
    """
    if theta.n != planted.n:
        raise SizeMismatch(f"dendrogram over {theta.n} elements, planted over {planted.n}")
    best, score = None, -np.inf
    for _, part in theta.image():
        s = ari(part, planted)
        if s > score:
            best, score = part, s
    return best, float(score)


def normalized_fits(fits: Sequence[float], reference: float | None = None) -> list[float]:
    """Rescale fits so the best (or ``reference``) maps to 1 and the worst to 0."""
    vals = np.asarray(fits, dtype=float)
    if vals.size == 0:
        raise ValueError("normalized_fits needs at least one value")
    lo = float(vals.min()) if reference is None else float(reference)
    hi = float(vals.max())
    if hi == lo:
        return [1.0] * vals.size
    return [float(v) for v in 1 - (vals - lo) / (hi - lo)]


def diff_variance(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (ddof=1) of paired differences ``a - b``."""
    if len(a) != len(b):
        raise LengthMismatch(f"paired lists of length {len(a)} and {len(b)}")
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if diff.size == 0:
        return 0.0, 0.0
    std = float(diff.std(ddof=1)) if diff.size > 1 else 0.0
    return float(diff.mean()), std
