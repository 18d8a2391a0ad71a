import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flexdesk.clustering import adjusted_rand_index, kmeans_fit, silhouette_mean


def planted_blobs(seed, centers, per_cluster=20, scale=0.05):
    rng = np.random.default_rng(seed)
    points, truth = [], []
    for idx, center in enumerate(centers):
        points.append(rng.normal(center, scale, size=(per_cluster, len(center))))
        truth.extend([idx] * per_cluster)
    return np.vstack(points), np.array(truth)


def test_two_planted_groups_recovered_exactly():
    X, truth = planted_blobs(1, [(0.0, 0.0), (1.0, 1.0)])
    _, labels, _ = kmeans_fit(X, 2, seed=42)
    assert adjusted_rand_index(truth, labels) == 1.0


def test_k_equals_n_gives_zero_inertia():
    X = np.array([[0.0], [1.0], [2.0], [5.0]])
    _, labels, inertia = kmeans_fit(X, 4, seed=0)
    assert inertia == 0.0
    assert sorted(labels) == [0, 1, 2, 3]


def test_k_above_n_rejected():
    with pytest.raises(ValueError):
        kmeans_fit(np.zeros((3, 2)), 4, seed=0)


def test_deterministic_given_seed():
    X, _ = planted_blobs(3, [(0, 0), (2, 0), (0, 2)], per_cluster=15, scale=0.3)
    a = kmeans_fit(X, 3, seed=42, restarts=10)
    b = kmeans_fit(X, 3, seed=42, restarts=10)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]) and a[2] == b[2]


def test_restarts_never_worsen_inertia():
    X, _ = planted_blobs(5, [(0, 0), (1.2, 0), (0, 1.2), (1.2, 1.2)], per_cluster=10, scale=0.4)
    one = kmeans_fit(X, 4, seed=9, restarts=1)[2]
    many = kmeans_fit(X, 4, seed=9, restarts=50)[2]
    assert many <= one + 1e-12


def silhouette_oracle(X, labels):
    """Straight double-loop restatement of the definition."""
    n = len(X)
    scores = []
    for i in range(n):
        own = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not own:
            scores.append(0.0)
            continue
        a = sum(math.dist(X[i], X[j]) for j in own) / len(own)
        b = math.inf
        for c in set(labels):
            if c == labels[i]:
                continue
            others = [j for j in range(n) if labels[j] == c]
            b = min(b, sum(math.dist(X[i], X[j]) for j in others) / len(others))
        scores.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return sum(scores) / n


@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(6, 20))
@settings(max_examples=30, deadline=None)
def test_silhouette_matches_oracle(seed, k, n):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3))
    labels = rng.integers(0, k, size=n)
    if len(set(labels.tolist())) < 2:
        labels[0] = 0
        labels[1] = 1
    assert silhouette_mean(X, labels) == pytest.approx(silhouette_oracle(X, labels), abs=1e-9)


def test_silhouette_requires_two_clusters():
    with pytest.raises(ValueError):
        silhouette_mean(np.zeros((4, 2)), np.zeros(4, dtype=int))


def ari_oracle(a, b):
    """Pair-counting form: agreement over all item pairs, chance-corrected."""
    n = len(a)
    together_a = {(i, j) for i in range(n) for j in range(i + 1, n) if a[i] == a[j]}
    together_b = {(i, j) for i in range(n) for j in range(i + 1, n) if b[i] == b[j]}
    n11 = len(together_a & together_b)
    total = n * (n - 1) // 2
    expected = len(together_a) * len(together_b) / total
    max_index = (len(together_a) + len(together_b)) / 2
    if max_index == expected:
        return 1.0
    return (n11 - expected) / (max_index - expected)


def test_ari_perfect_recovery():
    assert adjusted_rand_index([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0


def test_ari_label_permutation_invariant():
    a = [0, 0, 1, 1, 2, 2]
    b = [2, 2, 0, 0, 1, 1]
    assert adjusted_rand_index(a, b) == 1.0


def test_ari_random_labelings_near_zero():
    rng = np.random.default_rng(0)
    for _ in range(20):
        truth = np.repeat(np.arange(4), 50)
        random_labels = rng.integers(0, 4, size=len(truth))
        assert abs(adjusted_rand_index(truth, random_labels)) < 0.1


@given(st.integers(0, 10_000), st.integers(4, 12))
@settings(max_examples=50, deadline=None)
def test_ari_matches_pair_counting_oracle(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 3, size=n).tolist()
    b = rng.integers(0, 3, size=n).tolist()
    assert adjusted_rand_index(a, b) == pytest.approx(ari_oracle(a, b), abs=1e-12)


def test_ari_mismatched_lengths_rejected():
    with pytest.raises(ValueError):
        adjusted_rand_index([0, 1], [0, 1, 2])
