"""Agglomeration engines.

``ordered_agglomerate`` draws one partial dendrogram by repeatedly merging a
randomly chosen minimal-linkage pair of non-comparable blocks;
``nfold_approximation`` keeps the best of N such draws; ``exact_opt``
searches every tie-resolution branch.  ``classical_hc`` and ``hc_plus`` are
the unordered baselines.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dendrogram import (DEFAULT_EPSILON, MergeHistory, PartialDendrogram,
                         complete_ultrametric, effective_epsilon)
from .dissimilarity import (DissimilarityMatrix, OrderedSpace, check_kind,
                            comparable_saturation, pnorm_distance, tie_threshold)
from .errors import SearchBudgetExceeded
from .rng import as_rng, make_rng


@dataclass(frozen=True)
class ClusteringResult:
    dendrogram: PartialDendrogram
    fit: float
    epsilon: float
    p: float
    linkage: str
    seed: int | None = None
    sample: int | None = None
    method: str = "ordered"

    def to_dict(self) -> dict:
        out = self.dendrogram.to_dict()
        out.update(fit=self.fit, epsilon=self.epsilon, p=self.p, linkage=self.linkage,
                   seed=self.seed, sample=self.sample, method=self.method)
        return out


def ultrametric_fit(theta: PartialDendrogram, d: DissimilarityMatrix, eps: float = DEFAULT_EPSILON,
                    p: float = 1) -> float:
    return pnorm_distance(complete_ultrametric(theta, eps), d, p)


# -- the agglomeration loop -------------------------------------------------

def _linkage_row(D: np.ndarray, members: list[int], label_of: np.ndarray,
                 sizes: np.ndarray, kind: str) -> np.ndarray:
    """Linkage between one block and every block, indexed by block label."""
    n = D.shape[0]
    rows = D[members]
    if kind == "single":
        out = np.full(n, np.inf)
        np.minimum.at(out, label_of, rows.min(axis=0))
    elif kind == "complete":
        out = np.full(n, -np.inf)
        np.maximum.at(out, label_of, rows.max(axis=0))
    else:
        sums = np.bincount(label_of, weights=rows.sum(axis=0), minlength=n)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = sums / (len(members) * sizes)
    return out


def _agglomerate(D: np.ndarray, reach: np.ndarray | None, kind: str,
                 rng: np.random.Generator, tol: float = 0.0) -> list[tuple[int, int, float]]:
    """Run one randomised agglomeration; ``reach=None`` ignores any order."""
    n = D.shape[0]
    if n < 2:
        return []
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    active = np.ones(n, dtype=bool)
    label_of = np.arange(n)
    members = [[x] for x in range(n)]
    sizes = np.ones(n)
    L = np.array(D, dtype=float, copy=True)
    C = None if reach is None else np.array(reach, dtype=bool, copy=True)
    cand = upper.copy()
    if C is not None:
        cand &= ~(C | C.T)
    merges: list[tuple[int, int, float]] = []
    prev = -math.inf
    while True:
        vals = np.where(cand, L, np.inf)
        best = vals.min()
        if best == np.inf:
            break
        ties = np.flatnonzero(vals <= tie_threshold(best, tol))
        pick = ties[rng.integers(len(ties))] if len(ties) > 1 else ties[0]
        i, j = divmod(int(pick), n)
        height = max(float(best), prev)
        prev = height
        merges.append((i, j, height))

        members[i] = sorted(members[i] + members[j])
        members[j] = []
        label_of[label_of == j] = i
        sizes[i] += sizes[j]
        sizes[j] = 0
        active[j] = False
        cand[j, :] = False
        cand[:, j] = False
        row = _linkage_row(D, members[i], label_of, sizes, kind)
        L[i, :] = row
        L[:, i] = row
        if C is not None:
            C[i] |= C[j]
            C[:, i] |= C[:, j]
            C[j] = False
            C[:, j] = False
            if C[:, i].any() and C[i].any():
                C |= np.outer(C[:, i], C[i])
            cand &= ~(C | C.T)
        if active.sum() < 2:
            break
    return merges


def classical_hc(d: DissimilarityMatrix, kind: str = "single", rng=None,
                 tol: float = 0.0) -> PartialDendrogram:
    """Classical agglomerative clustering with uniform random tie resolution.

    The result is always a complete dendrogram (``n - 1`` merges).
    """
    check_kind(kind)
    merges = _agglomerate(d.square, None, kind, as_rng(rng), tol)
    return PartialDendrogram(MergeHistory(d.n, tuple(merges)))


def ordered_agglomerate(space: OrderedSpace, kind: str = "single", rng=None,
                        tol: float = 0.0) -> PartialDendrogram:
    """Draw one element of the set of order preserving partial dendrograms.

    Stops when one block remains or every pair of blocks is comparable in
    the induced order.  Shares its random draws with :func:`classical_hc`,
    so on an empty order the two produce the same history for the same seed.
    """
    check_kind(kind)
    reach = None if space.poset.is_empty_order() else space.poset.reach
    merges = _agglomerate(space.dist.square, reach, kind, as_rng(rng), tol)
    return PartialDendrogram(MergeHistory(space.n, tuple(merges)))


def hc_plus(space: OrderedSpace, kind: str = "average", max_value: float = 1.0, rng=None,
            tol: float = 0.0) -> PartialDendrogram:
    """Classical clustering after pushing every comparable pair to ``max_value``."""
    return classical_hc(comparable_saturation(space, max_value), kind, rng, tol)


# -- N-fold approximation -----------------------------------------------------

def _sample(space: OrderedSpace, kind: str, seed: int, index: int, eps: float, p: float,
            tol: float) -> ClusteringResult:
    theta = ordered_agglomerate(space, kind, make_rng(seed, index), tol)
    return ClusteringResult(theta, ultrametric_fit(theta, space.dist, eps, p), eps, p, kind,
                            seed=seed, sample=index)


def _sample_star(args):
    return _sample(*args)


@dataclass(frozen=True)
class NFoldResult:
    best: ClusteringResult
    fits: list[float]
    samples: list[ClusteringResult] = field(repr=False)


def nfold_approximation(space: OrderedSpace, kind: str = "single", N: int = 10,
                        eps: float = DEFAULT_EPSILON, p: float = 1, seed: int = 0,
                        tol: float = 0.0, workers: int = 1) -> NFoldResult:
    """Best-fitting of ``N`` independent ordered draws.

    Draw ``i`` uses the stream ``(seed, i)``, so the first ``N`` draws of a
    larger batch are the same draws, and the result does not depend on
    ``workers``.  Ties in fit go to the earliest draw.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    check_kind(kind)
    jobs = [(space, kind, seed, i, eps, p, tol) for i in range(N)]
    if workers > 1 and N > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(_sample_star, jobs, chunksize=max(1, N // (4 * workers))))
    else:
        samples = [_sample(*job) for job in jobs]
    fits = [s.fit for s in samples]
    best = samples[int(np.argmin(fits))]
    return NFoldResult(best, fits, samples)


# -- exhaustive optimiser -------------------------------------------------------

def _state_tables(D: np.ndarray, reach: np.ndarray, labels: tuple, kind: str):
    """Block labels, members, linkage matrix and comparability for one partition."""
    lab = np.asarray(labels)
    roots = np.unique(lab)
    members = [np.flatnonzero(lab == r).tolist() for r in roots]
    n = D.shape[0]
    sizes = np.bincount(lab, minlength=n).astype(float)
    m = len(roots)
    link = np.empty((m, m))
    for a, mem in enumerate(members):
        link[a] = _linkage_row(D, mem, lab, sizes, kind)[roots]
    mem_mat = np.zeros((n, m))
    mem_mat[np.arange(n), np.searchsorted(roots, lab)] = 1.0
    lifted = (mem_mat.T @ reach.astype(float) @ mem_mat) > 0
    from .poset import close_relation
    closed = close_relation(lifted)
    return roots, members, link, closed | closed.T


def enumerate_outcomes(space: OrderedSpace, kind: str, eps: float = DEFAULT_EPSILON,
                       p: float = 1, tol: float = 0.0, limit: int = 200_000,
                       prune: bool = True) -> list[tuple[float, PartialDendrogram]]:
    """Walk every tie-resolution branch, merging identical states per level.

    A state is the current partition plus the height of the last merge; two
    branches reaching the same state have the same futures.  With ``prune``
    only the branches with the smallest accumulated fit are kept per state,
    which is exact because the fit splits into a part fixed by the past and
    a part fixed by the future.  Without it every distinct outcome is kept.
    Returns ``(fit, dendrogram)`` pairs with fits recomputed from scratch.
    """
    check_kind(kind)
    D = space.dist.square
    reach = space.poset.reach
    n = space.n
    p = float(p)
    start = (tuple(range(n)), -math.inf)
    # state -> (accumulated cost, {signature: history})
    level = {start: (0.0, {(): ()})}
    terminal: list[tuple[float, tuple]] = []
    expanded = 0
    while level:
        nxt: dict = {}
        for (labels, h), (cost, pasts) in level.items():
            expanded += 1
            if expanded > limit:
                raise SearchBudgetExceeded(limit)
            roots, members, link, comp = _state_tables(D, reach, labels, kind)
            m = len(roots)
            free = ~comp & np.triu(np.ones((m, m), dtype=bool), k=1)
            if not free.any():
                top = (h if h > -math.inf else 0.0)
                top += effective_epsilon(top, eps)
                lab = np.asarray(labels)
                iu = np.triu_indices(n, k=1)
                cross = lab[iu[0]] != lab[iu[1]]
                rest = float(np.sum(np.abs(top - D[iu][cross]) ** p))
                terminal.extend((cost + rest, hist) for hist in pasts.values())
                continue
            vals = np.where(free, link, np.inf)
            best = vals.min()
            for a, b in zip(*np.nonzero(vals <= tie_threshold(best, tol))):
                la, lb = int(roots[a]), int(roots[b])
                height = max(float(link[a, b]), h)
                sub = D[np.ix_(members[a], members[b])]
                step = float(np.sum(np.abs(height - sub) ** p))
                new_labels = tuple(la if x == lb else x for x in labels)
                key = (new_labels, height)
                new_cost = cost + step
                closes = h > -math.inf and height > h
                grown = {}
                for sig, hist in pasts.items():
                    nsig = sig + ((h, labels),) if closes else sig
                    grown[nsig] = hist + ((la, lb, height),)
                if key in nxt:
                    old_cost, old = nxt[key]
                    slack = 1e-9 * max(1.0, abs(old_cost))
                    if prune and new_cost < old_cost - slack:
                        nxt[key] = (new_cost, grown)
                    elif not prune or new_cost <= old_cost + slack:
                        old.update(grown)
                        nxt[key] = (min(old_cost, new_cost), old)
                else:
                    nxt[key] = (new_cost, grown)
        level = nxt

    if prune and terminal:
        lowest = min(c for c, _ in terminal)
        terminal = [(c, hist) for c, hist in terminal if c <= lowest + 1e-9 * max(1.0, lowest)]
    seen = {}
    for _, hist in terminal:
        theta = PartialDendrogram(MergeHistory(n, hist))
        seen.setdefault(theta.canonical, theta)
    return [(ultrametric_fit(t, space.dist, eps, p), t) for t in seen.values()]


def exact_opt(space: OrderedSpace, kind: str = "single", eps: float = DEFAULT_EPSILON,
              p: float = 1, limit: int = 200_000, tol: float = 0.0) -> list[ClusteringResult]:
    """All partial dendrograms of minimal fit, by exhaustive search.

    Raises :class:`SearchBudgetExceeded` when more than ``limit`` states
    would be expanded.  Intended for small spaces (roughly n <= 12).
    """
    outcomes = enumerate_outcomes(space, kind, eps, p, tol, limit, prune=True)
    lowest = min(f for f, _ in outcomes)
    slack = 1e-12 * max(1.0, abs(lowest))
    winners = sorted((t for f, t in outcomes if f <= lowest + slack),
                     key=lambda t: [(m.height, m.a, m.b) for m in t.merges])
    return [ClusteringResult(t, ultrametric_fit(t, space.dist, eps, p), eps, p, kind, method="exact")
            for t in winners]


# -- idempotency ----------------------------------------------------------------

def idempotency_check(space: OrderedSpace, kind: str = "single", eps: float = DEFAULT_EPSILON,
                      p: float = 1, rng=None, trials: int = 5, exact_below: int = 8) -> bool:
    """Cluster, replace the measure by the completed ultrametric, and re-cluster.

    True when every re-clustering reproduces the first dendrogram.  Small
    spaces are re-clustered exhaustively; larger ones by ``trials`` draws.
    """
    rng = as_rng(rng)
    theta = ordered_agglomerate(space, kind, rng)
    again = OrderedSpace(space.poset, complete_ultrametric(theta, eps))
    if space.n <= exact_below:
        found = [r.dendrogram for r in exact_opt(again, kind, eps, p)]
        outcomes = enumerate_outcomes(again, kind, eps, p, prune=False)
        if len(outcomes) != 1:
            return False
    else:
        found = [ordered_agglomerate(again, kind, rng) for _ in range(trials)]
    return all(t.same_as(theta) for t in found)
