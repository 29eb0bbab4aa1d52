"""Acceptance suite: each test checks one criterion and reports a PASS/FAIL line."""

import itertools
import math
import time

import numpy as np
import pytest

import oracles
from report import record
from orderclust.bench import CompareConfig, compare_records, compare_summary, convergence
from orderclust.clustering import (classical_hc, enumerate_outcomes, exact_opt,
                                   idempotency_check, nfold_approximation, ordered_agglomerate)
from orderclust.datagen import random_space
from orderclust.dendrogram import complete_ultrametric, dendrogram, kappa, psi
from orderclust.dissimilarity import DissimilarityMatrix, OrderedSpace
from orderclust.metrics import ari, loops, oari
from orderclust.partition import LabeledPartition
from orderclust.rng import make_rng

KINDS = ("single", "average", "complete")
pytestmark = pytest.mark.acceptance


def random_history(n, rng, complete=False):
    roots = list(range(n))
    stop = n - 1 if complete else int(rng.integers(0, n))
    h, merges = 0.0, []
    for _ in range(stop):
        i, j = sorted(rng.choice(roots, size=2, replace=False).tolist())
        h += float(rng.choice([0.0, 0.5, 1.0, rng.random()]))
        merges.append((i, j, h))
        roots.remove(j)
    return dendrogram(n, merges)


def test_criterion_01_nfold_matches_exact():
    start = time.perf_counter()
    rng = make_rng(101)
    grid = list(itertools.product([0.0, 0.2, 0.5], [1, 2, 3]))
    hits = beaten = total = 0
    for k in range(207):
        p, t = grid[k % len(grid)]
        space = random_space(int(rng.integers(4, 9)), p, t, rng)
        for kind in KINDS:
            best = exact_opt(space, kind)[0].fit
            got = nfold_approximation(space, kind, 200, seed=k).best.fit
            total += 1
            hits += math.isclose(got, best, rel_tol=1e-9, abs_tol=1e-12)
            beaten += got < best * (1 - 1e-9) - 1e-12
    elapsed = time.perf_counter() - start
    ok = hits >= 0.95 * total and beaten == 0 and elapsed < 300
    record(1, ok, f"{hits}/{total} instances at the exact optimum, {beaten} below it, {elapsed:.0f}s")
    assert ok


def test_criterion_02_single_linkage_coincidence():
    rng = make_rng(102)
    failures = 0
    for k in range(100):
        space = random_space(int(rng.integers(3, 10)), 0.0, int(rng.integers(1, 4)), rng)
        res = exact_opt(space, "single")
        classical = classical_hc(space.dist, "single", make_rng(k))
        failures += not (len(res) == 1 and res[0].dendrogram == classical)
    record(2, failures == 0, f"{100 - failures}/100 spaces where the exact optimum is the classical result")
    assert failures == 0


def test_criterion_03_empty_order_coincidence():
    rng = make_rng(103)
    same = 0
    for k in range(100):
        space = random_space(int(rng.integers(2, 30)), 0.0, int(rng.integers(1, 6)), rng)
        kind = KINDS[k % 3]
        a = ordered_agglomerate(space, kind, make_rng(k))
        b = classical_hc(space.dist, kind, make_rng(k))
        same += a.merges == b.merges
    record(3, same == 100, f"{same}/100 identical histories")
    assert same == 100


def test_criterion_04_ultrametric_axioms():
    rng = make_rng(104)
    violations = 0
    for k in range(1000):
        n = int(rng.integers(1, 11))
        theta = random_history(n, rng, complete=bool(k % 4 == 0))
        eps = float(rng.choice([1e-12, 1e-6, 0.5]))
        mats = [complete_ultrametric(theta, eps)]
        if theta.is_complete:
            mats.append(psi(theta))
        violations += any(not oracles.is_ultrametric_matrix(u.square.tolist()) for u in mats)
        violations += not np.array_equal(psi(kappa(theta, eps)).values, mats[0].values)
    record(4, violations == 0, f"{violations} violations over 1000 dendrograms")
    assert violations == 0


def test_criterion_05_injectivity():
    rng = make_rng(105)
    pairs = collisions = 0
    while pairs < 500:
        space = random_space(int(rng.integers(4, 8)), float(rng.choice([0.0, 0.2])), 3, rng)
        outcomes = [t for _, t in enumerate_outcomes(space, "average", prune=False)]
        if len(outcomes) < 2:
            continue
        i, j = rng.choice(len(outcomes), size=2, replace=False)
        a, b = outcomes[i], outcomes[j]
        assert a != b
        pairs += 1
        collisions += complete_ultrametric(a, 1e-6) == complete_ultrametric(b, 1e-6)
    first = dendrogram(4, [(1, 2, 1.0)])
    second = dendrogram(4, [(0, 1, 1.0), (2, 3, 1.0)])
    collide = (complete_ultrametric(first, 0.0, allow_zero=True)
               == complete_ultrametric(second, 0.0, allow_zero=True))
    ok = collisions == 0 and collide
    record(5, ok, f"{collisions}/500 collisions at eps=1e-6; zero-epsilon example collides: {collide}")
    assert ok


def test_criterion_06_order_preservation():
    rng = make_rng(106)
    bad = contrast = 0
    for k in range(500):
        space = random_space(int(rng.integers(3, 25)), float(rng.choice([0.05, 0.2, 0.5])),
                             int(rng.integers(1, 4)), rng)
        kind = KINDS[k % 3]
        theta = ordered_agglomerate(space, kind, make_rng(k))
        bad += any(loops(space.poset, part) > 0 for _, part in theta.image())
        classical = classical_hc(space.dist, kind, make_rng(k))
        contrast += any(loops(space.poset, part) > 0 for _, part in classical.image())
    ok = bad == 0 and contrast > 0
    record(6, ok, f"{bad} ordered runs with loops; classical loops on {contrast}/500 instances")
    assert ok


def test_criterion_07_idempotency():
    rng = make_rng(107)
    passed = {kind: 0 for kind in KINDS}
    for k in range(200):
        space = random_space(int(rng.integers(3, 12)), float(rng.choice([0.0, 0.2, 0.5])),
                             int(rng.integers(1, 4)), rng)
        for kind in KINDS:
            passed[kind] += idempotency_check(space, kind, rng=make_rng(k))
    ok = all(v == 200 for v in passed.values())
    record(7, ok, ", ".join(f"{kind} {v}/200" for kind, v in passed.items()))
    assert ok


def test_criterion_08_clique_reduction():
    rng = make_rng(108)
    good = every = 0
    for _ in range(50):
        n = int(rng.integers(4, 11))
        adj = np.triu(rng.random((n, n)) < rng.uniform(0.3, 0.8), k=1)
        adj = adj | adj.T
        d = np.where(adj, 1.0, 2.0)
        np.fill_diagonal(d, 0.0)
        space = OrderedSpace.unordered(DissimilarityMatrix.from_square(d))
        want = oracles.max_clique(adj.tolist())
        # a vertex's row counts the other clique members, so the clique is one larger
        counts = [int((complete_ultrametric(r.dendrogram).square == 1.0).sum(axis=1).max()) + 1
                  for r in exact_opt(space, "complete", limit=1_000_000)]
        good += max(counts) == want
        every += all(c == want for c in counts)
    record(8, good == 50, f"{good}/50 graphs where the minimiser set recovers the maximum clique "
                          f"({every}/50 where every tied minimiser does)")
    assert good == 50


def _monotone(values, jitter=0.01):
    return all(b >= a - jitter for a, b in zip(values, values[1:]))


CONVERGENCE_RUNS = [
    ("single", 0.2, 5, [1, 2, 5, 10], 10),
    ("average", 0.2, 5, [1, 2, 5, 10], 10),
    ("complete", 0.2, 15, [1, 5, 10, 20, 40], 40),
]


def test_criterion_09_convergence():
    start = time.perf_counter()
    lines, ok = [], True
    for kind, p, t, grid, target in CONVERGENCE_RUNS:
        rows = convergence(50, p, t, kind, grid, spaces=10, pool=100, boots=200, seed=0,
                           exact_max_n=50)
        e_ari = [r["E_ARI"] for r in rows]
        e_oari = [r["E_oARI"] for r in rows]
        at = grid.index(target)
        this = (_monotone(e_ari) and _monotone(e_oari) and e_ari[at] >= 0.97 and e_oari[at] >= 0.97)
        ok &= this
        lines.append(f"{kind} t={t}: E(ARI) {e_ari[0]:.3f}->{e_ari[at]:.3f}, "
                     f"E(oARI) {e_oari[0]:.3f}->{e_oari[at]:.3f} at N={target} [{rows[0]['reference']}]")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600
    record(9, ok, "; ".join(lines) + f"; {elapsed:.0f}s")
    assert ok


def test_criterion_10_method_comparison():
    lines, ok = [], True
    for kind in KINDS:
        cfg = CompareConfig(kind=kind, reps=10, base_n=15, base_p=0.15, base_t=1, sigma=0.10, N=10,
                            seed=0)
        summary = compare_summary(compare_records(cfg))

        def get(method, metric, alpha):
            return next(r for r in summary if r["method"] == method and r["metric"] == metric
                        and math.isclose(r["alpha"], alpha))

        ordered_loops = max(r["mean"] for r in summary
                            if r["method"] == "ordered" and r["metric"] == "loops")
        small = min(cfg.alphas)
        base_loops = {m: get(m, "loops", small)["mean"] for m in ("classical", "plus")}
        o_ari = get("ordered", "ari", 0.10)["mean"]
        c_row = get("classical", "ari", 0.10)
        this = ordered_loops == 0 and o_ari >= c_row["mean"] - c_row["paired_std"]
        if kind != "single":
            this &= all(v > 0 for v in base_loops.values())
        ok &= this
        lines.append(f"{kind}: ordered loops max {ordered_loops:.2f}, classical/plus loops "
                     f"{base_loops['classical']:.2f}/{base_loops['plus']:.2f}, ARI ordered "
                     f"{o_ari:.3f} vs classical {c_row['mean']:.3f}-{c_row['paired_std']:.3f}")
    record(10, ok, "; ".join(lines))
    assert ok


def test_criterion_11_index_ground_truth():
    mismatches = 0
    for n in range(1, 7):
        parts = [oracles.assignment(p, n) for p in oracles.set_partitions(range(n))]
        for a, b in itertools.product(parts, repeat=2):
            got = ari(LabeledPartition.from_assignment(a), LabeledPartition.from_assignment(b))
            mismatches += not oracles.close(got, oracles.pair_ari(a, b), 1e-12)
    rng = make_rng(111)
    bad_o = 0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        A = rng.random((n, n)) < rng.random()
        B = rng.random((n, n)) < rng.random()
        per, mean = oari(A, B)
        want_per, want_mean = oracles.oari_scalar(A.astype(int).tolist(), B.astype(int).tolist())
        bad_o += not (all(oracles.close(x, y) for x, y in zip(per, want_per))
                      and oracles.close(mean, want_mean))
    ok = mismatches == 0 and bad_o == 0
    record(11, ok, f"ARI mismatches {mismatches} over all partition pairs n<=6; oARI mismatches {bad_o}/1000")
    assert ok
