"""K-Means: trivial cases, brute-force partition oracle, determinism,
inertia monotonicity, permutation behavior, and empty-cluster reseeding."""

from __future__ import annotations

import numpy as np
import pytest
from scipy import sparse

from thtb.cluster import auto_k, kmeans
from thtb.cluster.kmeans import lloyd


def _csr(rows) -> sparse.csr_matrix:
    return sparse.csr_matrix(np.asarray(rows, dtype=np.float64))


def test_k1_centroid_is_mean_and_all_assigned_zero():
    X = _csr([[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]])
    model = kmeans(X, k=1, seed=0)
    assert list(model.assignment) == [0, 0, 0]
    assert np.allclose(model.centroids[0], [2.0, 3.0])


def test_k_equals_n_gives_zero_inertia():
    X = _csr([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0]])
    model = kmeans(X, k=4, seed=3)
    assert sorted(model.assignment) == [0, 1, 2, 3]
    assert model.inertia == pytest.approx(0.0, abs=1e-12)


def _brute_force_best_two_partition(points: np.ndarray):
    """Minimum within-cluster SSE over every 2-partition (the oracle)."""
    n = len(points)
    best_sse, best_partition = None, None
    for mask_bits in range(1, 2 ** n - 1):
        mask = np.array([(mask_bits >> i) & 1 for i in range(n)], dtype=bool)
        sse = 0.0
        for side in (mask, ~mask):
            group = points[side]
            sse += float(((group - group.mean(axis=0)) ** 2).sum())
        if best_sse is None or sse < best_sse:
            best_sse = sse
            best_partition = frozenset(
                (frozenset(np.flatnonzero(mask)), frozenset(np.flatnonzero(~mask)))
            )
    return best_partition, best_sse


def test_two_pair_fixture_matches_brute_force_partition():
    points = np.array([[0.0, 0.0], [0.0, 0.1], [10.0, 10.0], [10.0, 10.1]])
    oracle_partition, oracle_sse = _brute_force_best_two_partition(points)
    model = kmeans(_csr(points), k=2, seed=1)
    got = frozenset(
        (
            frozenset(np.flatnonzero(model.assignment == 0)),
            frozenset(np.flatnonzero(model.assignment == 1)),
        )
    )
    assert got == oracle_partition
    assert model.inertia == pytest.approx(oracle_sse, abs=1e-9)


def test_random_small_corpora_reach_brute_force_optimum_often():
    # k-means++ is a heuristic, so only check it lands on the brute-force
    # optimum for clearly separated data.
    rng = np.random.default_rng(5)
    hits = 0
    for trial in range(20):
        a = rng.normal(loc=0.0, scale=0.3, size=(4, 3))
        b = rng.normal(loc=8.0, scale=0.3, size=(4, 3))
        points = np.vstack([a, b])
        oracle_partition, _ = _brute_force_best_two_partition(points)
        model = kmeans(_csr(points), k=2, seed=trial)
        got = frozenset(
            (
                frozenset(np.flatnonzero(model.assignment == 0)),
                frozenset(np.flatnonzero(model.assignment == 1)),
            )
        )
        hits += got == oracle_partition
    assert hits == 20


def test_deterministic_given_seed():
    rng = np.random.default_rng(2)
    X = _csr(rng.normal(size=(25, 6)))
    a = kmeans(X, k=4, seed=77)
    b = kmeans(X, k=4, seed=77)
    assert np.array_equal(a.assignment, b.assignment)
    assert np.array_equal(a.centroids, b.centroids)
    assert a.inertia_history == b.inertia_history


def test_inertia_history_non_increasing():
    rng = np.random.default_rng(6)
    X = _csr(rng.normal(size=(60, 8)))
    model = kmeans(X, k=5, seed=11)
    history = model.inertia_history
    assert len(history) >= 1
    for earlier, later in zip(history, history[1:]):
        assert later <= earlier + 1e-9 * max(1.0, earlier)
    assert model.inertia == history[-1]


def test_lloyd_permutation_of_rows_and_init_gives_same_assignments():
    rng = np.random.default_rng(8)
    points = rng.normal(size=(30, 5))
    X = _csr(points)
    initial = points[[3, 11, 23]].copy()
    labels, _, _, _ = lloyd(X, initial.copy())

    perm = rng.permutation(30)
    labels_permuted, _, _, _ = lloyd(_csr(points[perm]), initial.copy())
    assert np.array_equal(labels_permuted, labels[perm])


def test_empty_cluster_reseeding_terminates_with_valid_assignments():
    # Only two distinct locations but k=3: at least one centroid must be
    # re-seeded from a duplicate point; the run must still converge.
    points = [[0.0, 0.0]] * 5 + [[1.0, 1.0]] * 5
    model = kmeans(_csr(points), k=3, seed=0, max_iter=50)
    assert model.iterations_run <= 50
    assert set(model.assignment) <= {0, 1, 2}
    assert model.inertia == pytest.approx(0.0, abs=1e-12)


def test_k_out_of_range_rejected():
    X = _csr([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        kmeans(X, k=0, seed=0)
    with pytest.raises(ValueError):
        kmeans(X, k=3, seed=0)


def test_auto_k_heuristic():
    assert auto_k(2) == 2
    assert auto_k(3) == 2
    assert auto_k(1000) == max(2, round((1000 / 2) ** 0.5))
    assert auto_k(5200) == 51
    assert auto_k(1) == 1  # clamped to the population size


def test_planted_blobs_recovered_quick():
    # Small version of the acceptance check: well-separated blobs, k=2.
    recovered = 0
    for seed in range(10):
        rng = np.random.default_rng(1000 + seed)
        n_a = int(rng.integers(5, 20))
        n_b = int(rng.integers(5, 20))
        radius = 0.5
        a = np.clip(rng.normal(scale=radius / 3, size=(n_a, 4)), -radius, radius)
        b = np.clip(rng.normal(scale=radius / 3, size=(n_b, 4)), -radius, radius) + 10.0
        points = np.vstack([a, b])
        model = kmeans(_csr(points), k=2, seed=seed)
        first = model.assignment[:n_a]
        second = model.assignment[n_a:]
        if len(set(first)) == 1 and len(set(second)) == 1 and first[0] != second[0]:
            recovered += 1
    assert recovered == 10


def test_accepts_tfidf_model():
    from thtb.cluster import fit_tfidf

    model = fit_tfidf(["alpha beta", "alpha gamma", "delta epsilon", "delta zeta"])
    result = kmeans(model, k=2, seed=0)
    assert len(result.assignment) == 4
