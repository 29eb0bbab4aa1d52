"""Synthetic ordered dissimilarity spaces and planted-copy instances."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dissimilarity import (DissimilarityMatrix, OrderedSpace, condensed_size,
                            read_matrix_csv, write_matrix_csv)
from .errors import InvalidParams, InvalidT
from .partition import LabeledPartition
from .poset import StrictPoset, close_relation, read_edge_list, transitive_closure, write_edge_list
from .rng import as_rng

NOISE_FLOOR = 1e-6


def random_dag_skeleton(n: int, p: float, rng=None) -> np.ndarray:
    """Unclosed random DAG: a permuted strictly upper triangular Bernoulli(p) matrix."""
    if not 0 <= p <= 1:
        raise InvalidParams(f"edge probability must be in [0, 1], got {p}")
    rng = as_rng(rng)
    perm = rng.permutation(n)
    upper = np.triu(rng.random((n, n)) < p, k=1)
    adj = np.zeros((n, n), dtype=bool)
    adj[np.ix_(perm, perm)] = upper
    return adj


def random_dag(n: int, p: float, rng=None) -> StrictPoset:
    """Transitive closure of :func:`random_dag_skeleton`."""
    return StrictPoset(close_relation(random_dag_skeleton(n, p, rng)))


def tied_values(n: int, t: int) -> np.ndarray:
    """The value multiset: 1, 2, ... each ``t`` times, the remainder on the largest value."""
    if int(t) != t or t < 1:
        raise InvalidT(f"ties per level must be a positive integer, got {t}")
    t = int(t)
    total = condensed_size(n)
    levels, rest = divmod(total, t)
    vals = np.repeat(np.arange(1, levels + 1, dtype=float), t)
    return np.concatenate([vals, np.full(rest, levels + 1.0)])


def random_tied_dissimilarity(n: int, t: int, rng=None) -> DissimilarityMatrix:
    if n < 2:
        raise InvalidParams("need at least two elements")
    vals = tied_values(n, t)
    return DissimilarityMatrix(as_rng(rng).permutation(vals), n)


def random_space(n: int, p: float, t: int, rng=None) -> OrderedSpace:
    rng = as_rng(rng)
    poset = random_dag(n, p, rng)
    return OrderedSpace(poset, random_tied_dissimilarity(n, t, rng))


def random_base_component(n: int, p: float, t: int = 1, rng=None) -> OrderedSpace:
    """Random space with distances rescaled into the open interval (0, 1)."""
    space = random_space(n, p, t, rng)
    d = space.dist.values
    return OrderedSpace(space.poset, DissimilarityMatrix(d / (d.max() + 1), n))


@dataclass(frozen=True)
class PlantedInstance:
    space: OrderedSpace
    planted: LabeledPartition
    params: dict = field(default_factory=dict)


def copies_for(base_size: int, target: int = 200) -> int:
    """Least number of copies giving at least ``target`` elements."""
    return max(2, math.ceil(target / base_size))


def planted_copies(base: OrderedSpace, m: int, alpha: float, sigma: float, rng=None,
                   floor: float = NOISE_FLOOR) -> PlantedInstance:
    """Disjoint union of ``m`` copies of ``base``.

    Element ``i`` of copy ``k`` gets index ``k * n0 + i``.  Pairs in the same
    copy keep the base distance; pairs in different copies get the base
    distance plus ``alpha`` plus Gaussian noise, drawn once per unordered pair
    and clamped at ``floor``.  The planted blocks group each base element
    with its copies.
    """
    if m < 2 or alpha < 0 or sigma < 0:
        raise InvalidParams(f"need m >= 2, alpha >= 0, sigma >= 0; got {m}, {alpha}, {sigma}")
    rng = as_rng(rng)
    n0 = base.n
    n = m * n0
    copy_of = np.repeat(np.arange(m), n0)
    reach = np.kron(np.eye(m, dtype=bool), base.poset.reach).astype(bool)
    D = np.tile(base.dist.square, (m, m))
    iu = np.triu_indices(n, k=1)
    vals = D[iu]
    cross = copy_of[iu[0]] != copy_of[iu[1]]
    noise = rng.normal(0.0, sigma, size=int(cross.sum())) if sigma > 0 else 0.0
    vals[cross] = np.maximum(vals[cross] + alpha + noise, floor)
    space = OrderedSpace(StrictPoset(reach), DissimilarityMatrix(vals, n))
    planted = LabeledPartition(np.tile(np.arange(n0), m))
    return PlantedInstance(space, planted, {"m": m, "alpha": alpha, "sigma": sigma, "base_n": n0})


# -- bundles ------------------------------------------------------------------

def write_bundle(directory: str | Path, space: OrderedSpace, planted: LabeledPartition | None = None,
                 meta: dict | None = None) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(space.poset, out / "order.csv")
    write_matrix_csv(space.dist, out / "dist.csv")
    if planted is not None:
        with open(out / "planted.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            for lab in planted.labels:
                w.writerow([int(lab)])
    info = {"n": space.n}
    info.update(meta or {})
    (out / "meta.json").write_text(json.dumps(info, indent=2, sort_keys=True))
    return out


def read_bundle(directory: str | Path) -> tuple[OrderedSpace, LabeledPartition | None, dict]:
    src = Path(directory)
    dist = read_matrix_csv(src / "dist.csv")
    edges = read_edge_list(src / "order.csv") if (src / "order.csv").exists() else []
    space = OrderedSpace(transitive_closure(edges, dist.n), dist)
    planted = None
    if (src / "planted.csv").exists():
        with open(src / "planted.csv", newline="") as fh:
            planted = LabeledPartition.from_assignment([int(r[0]) for r in csv.reader(fh) if r])
    meta = json.loads((src / "meta.json").read_text()) if (src / "meta.json").exists() else {}
    return space, planted, meta
