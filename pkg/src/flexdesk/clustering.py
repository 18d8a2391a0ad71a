"""Plain k-means with restarts, mean silhouette, and adjusted Rand index.

Everything here is deterministic given (data, seed): initialization draws
from one seeded generator, restarts consume it sequentially, and all
tie-breaks fall to the lowest index.
"""

from __future__ import annotations

import math

import numpy as np

MAX_ITER = 300


def _init_centroids(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding; falls back to distinct indices when points coincide."""
    n = X.shape[0]
    first = int(rng.integers(n))
    chosen = [first]
    d2 = np.sum((X - X[first]) ** 2, axis=1)
    for _ in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining mass on already-chosen points: pick unused indices
            unused = [i for i in range(n) if i not in chosen]
            pick = unused[int(rng.integers(len(unused)))]
        else:
            r = rng.random() * total
            pick = int(np.searchsorted(np.cumsum(d2), r))
            pick = min(pick, n - 1)
        chosen.append(pick)
        d2 = np.minimum(d2, np.sum((X - X[pick]) ** 2, axis=1))
    return X[chosen].copy()


def _lloyd(X: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    k = centroids.shape[0]
    n = X.shape[0]
    labels = np.full(n, -1, dtype=int)
    for _ in range(MAX_ITER):
        d2 = np.sum((X[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)  # ties -> lowest cluster index
        for c in range(k):
            # re-seed an emptied cluster with the worst-fitting point that is
            # not the last member of its own cluster
            if np.any(new_labels == c):
                continue
            counts = np.bincount(new_labels, minlength=k)
            movable = counts[new_labels] > 1
            if not np.any(movable):
                continue  # duplicate-heavy input; leave the cluster empty
            dist_to_own = np.where(movable, d2[np.arange(n), new_labels], -1.0)
            worst = int(np.argmax(dist_to_own))
            centroids[c] = X[worst]
            new_labels[worst] = c
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            members = labels == c
            if np.any(members):
                centroids[c] = X[members].mean(axis=0)
    d2 = np.sum((X[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
    inertia = float(d2[np.arange(n), labels].sum())
    return centroids, labels, inertia


def kmeans_fit(
    X: np.ndarray, k: int, seed: int, restarts: int = 50
) -> tuple[np.ndarray, np.ndarray, float]:
    """Best-of-`restarts` Lloyd runs. Returns (centroids, labels, inertia)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-d")
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} points")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        centroids = _init_centroids(X, k, rng)
        centroids, labels, inertia = _lloyd(X, centroids)
        if best is None or inertia < best[2] - 1e-12:
            best = (centroids, labels, inertia)
    return best


def silhouette_mean(X: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette over all points; singleton clusters score 0."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    uniques = np.unique(labels)
    if len(uniques) < 2:
        raise ValueError("silhouette needs at least two clusters")
    dist = np.sqrt(np.maximum(np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=2), 0.0))
    n = X.shape[0]
    scores = np.zeros(n)
    for i in range(n):
        own = labels == labels[i]
        n_own = int(own.sum())
        if n_own <= 1:
            scores[i] = 0.0
            continue
        a = dist[i, own].sum() / (n_own - 1)
        b = math.inf
        for c in uniques:
            if c == labels[i]:
                continue
            other = labels == c
            b = min(b, float(dist[i, other].mean()))
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(scores.mean())


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Chance-corrected agreement between two partitions of the same items."""
    a = list(labels_a)
    b = list(labels_b)
    if len(a) != len(b):
        raise ValueError("partitions must cover the same items")
    if len(a) == 0:
        raise ValueError("empty partitions")
    contingency: dict = {}
    count_a: dict = {}
    count_b: dict = {}
    for x, y in zip(a, b):
        contingency[(x, y)] = contingency.get((x, y), 0) + 1
        count_a[x] = count_a.get(x, 0) + 1
        count_b[y] = count_b.get(y, 0) + 1
    n = len(a)
    sum_cells = sum(math.comb(c, 2) for c in contingency.values())
    sum_a = sum(math.comb(c, 2) for c in count_a.values())
    sum_b = sum(math.comb(c, 2) for c in count_b.values())
    total = math.comb(n, 2)
    expected = sum_a * sum_b / total if total else 0.0
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0  # both partitions degenerate: perfect agreement by convention
    return (sum_cells - expected) / (max_index - expected)
