import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from orderclust.clustering import classical_hc
from orderclust.dendrogram import (PartialDendrogram, complete_ultrametric,
                                   dendrogram, diameter_of, effective_epsilon,
                                   epsilon_error_profile, kappa, load_json, psi, save_json,
                                   theta_at, write_linkage_text)
from orderclust.dissimilarity import DissimilarityMatrix, is_ultrametric, pnorm_distance
from orderclust.errors import (InvalidMergeSequence, NonMonotoneHeights, NonPositiveEpsilon,
                               NotComplete)
from orderclust.partition import LabeledPartition

A, B, C, D, E = range(5)
FIVE_POINT = [(C, D, 2.0), (A, B, 4.5), (C, E, 8.0), (A, C, 10.0)]


def blocks(part):
    return sorted(tuple(b) for b in part.blocks)


@st.composite
def histories(draw, max_n=7, complete=None):
    """Random valid merge histories with small integer heights (ties likely)."""
    n = draw(st.integers(1, max_n))
    roots = list(range(n))
    stop = n - 1 if complete else draw(st.integers(0, n - 1))
    h = 0.0
    merges = []
    for _ in range(stop):
        i, j = sorted(draw(st.lists(st.sampled_from(roots), min_size=2, max_size=2, unique=True)))
        h += draw(st.sampled_from([0.0, 0.5, 1.0, 2.0]))
        merges.append((i, j, h))
        roots.remove(j)
    return dendrogram(n, merges)


def test_five_point_levels():
    th = dendrogram(5, FIVE_POINT)
    assert blocks(th.theta_at(5.0)) == [(A, B), (C, D), (E,)]
    assert blocks(theta_at(th, 1.99)) == [(0,), (1,), (2,), (3,), (4,)]
    assert blocks(th.theta_at(2.0)) == [(0,), (1,), (C, D), (4,)]
    assert th.theta_at(100.0) == th.theta_at(10.0) == LabeledPartition.one_block(5)
    assert diameter_of(th) == 10.0 and th.is_complete


def test_empty_history():
    th = dendrogram(3, [])
    assert th.theta_at(7.0) == LabeledPartition.singletons(3)
    assert diameter_of(th) == 0.0 and not th.is_complete
    assert diameter_of(dendrogram(2, [(0, 1, 1.3)])) == 1.3
    assert dendrogram(1, []).is_complete


def test_invalid_histories():
    with pytest.raises(NonMonotoneHeights):
        dendrogram(3, [(0, 1, 3.0), (0, 2, 1.0)])
    with pytest.raises(InvalidMergeSequence):
        dendrogram(3, [(0, 1, 1.0), (1, 2, 2.0)])
    with pytest.raises(InvalidMergeSequence):
        dendrogram(3, [(0, 0, 1.0)])
    with pytest.raises(InvalidMergeSequence):
        dendrogram(3, [(0, 1, -1.0)])
    with pytest.raises(InvalidMergeSequence):
        dendrogram(2, [(0, 1, math.nan)])
    with pytest.raises(InvalidMergeSequence):
        dendrogram(2, [(0, 5, 1.0)])


def test_equal_height_order_irrelevant():
    one = dendrogram(4, [(0, 1, 1.0), (2, 3, 1.0), (0, 2, 2.0)])
    two = dendrogram(4, [(2, 3, 1.0), (0, 1, 1.0), (0, 2, 2.0)])
    assert one == two and hash(one) == hash(two)
    assert one != dendrogram(4, [(0, 1, 1.0), (2, 3, 1.5), (0, 2, 2.0)])


def test_psi_examples():
    u = psi(dendrogram(5, FIVE_POINT))
    assert (u(C, D), u(A, B), u(D, E), u(A, E)) == (2.0, 4.5, 8.0, 10.0)
    star = psi(dendrogram(4, [(0, 1, 3.0), (0, 2, 3.0), (0, 3, 3.0)]))
    assert np.all(star.values == 3.0)
    assert psi(dendrogram(2, [(0, 1, 0.7)])).values.tolist() == [0.7]
    with pytest.raises(NotComplete):
        psi(dendrogram(3, [(0, 1, 1.0)]))


def test_kappa_examples():
    tree = dendrogram(5, FIVE_POINT)
    assert kappa(tree, 0.5) is tree
    left = dendrogram(4, [(B, C, 1.0)])
    top = kappa(left, 1.0)
    assert top.is_complete and top.merges[-1].height == 2.0
    assert [m.height for m in top.merges[1:]] == [2.0, 2.0]
    assert kappa(dendrogram(2, []), 0.5).merges == ((0, 1, 0.5),)
    with pytest.raises(NonPositiveEpsilon):
        kappa(left, 0.0)
    with pytest.raises(NonPositiveEpsilon):
        kappa(left, -1.0)


def test_completion_with_loose_elements():
    u = complete_ultrametric(dendrogram(4, [(B, C, 1.0)]), 1.0)
    assert u(B, C) == 1.0
    assert all(u(x, y) == 2.0 for x, y in [(A, B), (A, C), (A, D), (B, D), (C, D)])


def test_zero_epsilon_collision():
    first = dendrogram(4, [(1, 2, 1.0)])
    second = dendrogram(4, [(0, 1, 1.0), (2, 3, 1.0)])
    assert first != second
    assert (complete_ultrametric(first, 0.0, allow_zero=True)
            == complete_ultrametric(second, 0.0, allow_zero=True))
    assert complete_ultrametric(first, 1e-6) != complete_ultrametric(second, 1e-6)


def test_epsilon_guard_warns():
    with pytest.warns(UserWarning):
        eps = effective_epsilon(1e6, 1e-12)
    assert 1e6 + eps > 1e6
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert effective_epsilon(1.0, 1e-12) == 1e-12


@given(histories())
def test_completion_is_ultrametric_and_commutes(th):
    u = complete_ultrametric(th, 0.25)
    assert oracles.is_ultrametric_matrix(u.square.tolist())
    assert is_ultrametric(u)
    assert psi(kappa(th, 0.25)) == u
    assert u.square.tolist() == oracles.completed_matrix(th.n, list(th.merges), 0.25)


@given(histories(complete=True))
def test_completion_matches_psi_on_complete(th):
    assert complete_ultrametric(th, 0.1) == psi(th)


@given(histories(), histories())
def test_injective_at_positive_epsilon(t1, t2):
    if t1.n != t2.n:
        return
    same = complete_ultrametric(t1, 1e-6) == complete_ultrametric(t2, 1e-6)
    assert same == (t1 == t2)


@given(histories(complete=True))
def test_single_linkage_round_trip(th):
    back = classical_hc(psi(th), "single", np.random.default_rng(0))
    assert back == th


@given(histories())
def test_canonical_form_matches_oracle(th):
    ours = tuple((h, tuple(sorted(tuple(b) for b in p.blocks))) for h, p in th.image()
                 if th.merges and (h > 0 or th.merges[0].height == 0))
    assert ours == oracles.canonical(th.n, list(th.merges))


def test_error_profile_examples():
    tree = dendrogram(5, FIVE_POINT)
    d = DissimilarityMatrix(np.arange(1, 11, dtype=float), 5)
    assert epsilon_error_profile(tree, d).beta == 0
    flat = DissimilarityMatrix([3.0] * 6, 4)
    prof = epsilon_error_profile(dendrogram(4, []), flat, eps=3.0)
    assert (prof.alpha, prof.beta) == (0, 0)
    dfig = DissimilarityMatrix.from_square(np.array(
        [[0, 2, 2, 2], [2, 0, 1, 2], [2, 1, 0, 2], [2, 2, 2, 0]], dtype=float))
    prof = epsilon_error_profile(dendrogram(4, [(B, C, 1.0)]), dfig, eps=1.0)
    assert (prof.alpha, prof.beta, prof.mean_error) == (0, 0, 0)


@given(histories(), st.integers(1, 3), st.data())
def test_error_profile_consistent_with_pnorm(th, p, data):
    vals = data.draw(st.lists(st.integers(0, 9), min_size=th.n * (th.n - 1) // 2,
                              max_size=th.n * (th.n - 1) // 2))
    d = DissimilarityMatrix(vals, th.n)
    prof = epsilon_error_profile(th, d, p, 0.5)
    total = pnorm_distance(complete_ultrametric(th, 0.5), d, p) ** p
    assert math.isclose(prof.alpha + prof.beta, total, rel_tol=1e-9, abs_tol=1e-9)


def test_linkage_matrix_matches_scipy():
    hierarchy = pytest.importorskip("scipy.cluster.hierarchy")
    th = dendrogram(5, FIVE_POINT)
    z = th.linkage_matrix()
    assert z.shape == (4, 4) and z[:, 3].tolist() == [2, 2, 3, 5]
    hierarchy.is_valid_linkage(z, throw=True)
    coph = hierarchy.cophenet(z)
    assert np.array_equal(coph, psi(th).values)


def test_json_round_trip(tmp_path):
    th = dendrogram(5, FIVE_POINT[:3])
    save_json(th, tmp_path / "t.json", fit=1.5)
    assert load_json(tmp_path / "t.json") == th
    assert PartialDendrogram.from_dict(th.to_dict()) == th


def test_linkage_text(tmp_path):
    write_linkage_text(dendrogram(5, FIVE_POINT), tmp_path / "z.txt")
    lines = (tmp_path / "z.txt").read_text().splitlines()
    assert lines[0] == "2 3 2.0 2" and lines[-1] == "6 7 10.0 5"
