"""Spherical k-means (cosine-similarity Lloyd iterations) for comparison runs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .sphere import FloatArray, PointCloud
from .synthetic import Seed, _rng


@dataclass(frozen=True)
class KmeansResult:
    assignments: NDArray[np.int64]
    centroids: FloatArray
    objective: float
    iterations: int
    objective_history: tuple = field(default=(), repr=False)


def _unit(v: FloatArray) -> FloatArray:
    return v / np.linalg.norm(v)


def kmeanspp_init(x: FloatArray, k: int, rng: np.random.Generator) -> FloatArray:
    """k-means++ seeding with cosine distance as the weight."""
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    closest = 1.0 - x @ x[chosen[0]]
    for _ in range(1, k):
        weights = np.clip(closest, 0.0, None)
        weights[chosen] = 0.0
        total = weights.sum()
        if total > 0:
            idx = int(rng.choice(n, p=weights / total))
        else:
            # remaining points coincide with chosen centres
            rest = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(rest))
        chosen.append(idx)
        closest = np.minimum(closest, 1.0 - x @ x[idx])
    return x[chosen].copy()


def spherical_kmeans(
    cloud: PointCloud | ArrayLike, k: int, seed: Seed = 0, max_iter: int = 100, n_init: int = 1
) -> KmeansResult:
    """Cluster unit vectors into ``k`` groups by maximal dot product.

    Parameters
    ----------
    cloud : PointCloud or (N, d) array of unit vectors
    k : int
        Number of clusters, ``1 <= k <= N``.
    seed : int or Generator
        Seed for the k-means++ initialisation.
    max_iter : int
        Upper bound on assignment/update rounds.
    n_init : int
        Independent restarts drawn from the same generator; the run with the
        highest objective is returned.

    Returns
    -------
    KmeansResult
        ``objective`` is the sum of dot products of points with their centroid.
    """
    x = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=np.float64)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= N = {n}, got {k}")
    if n_init < 1:
        raise ValueError("n_init must be >= 1")
    rng = _rng(seed)
    runs = [_lloyd(x, kmeanspp_init(x, k, rng), max_iter) for _ in range(n_init)]
    # max keeps the first of equal objectives
    return max(runs, key=lambda r: r.objective)


def _lloyd(x: FloatArray, centroids: FloatArray, max_iter: int) -> KmeansResult:
    n = x.shape[0]
    k = centroids.shape[0]

    assign = np.full(n, -1, dtype=np.int64)
    history = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        sims = x @ centroids.T
        # argmax takes the lowest centroid id on ties
        new = np.argmax(sims, axis=1)
        for c in range(k):
            if not np.any(new == c):
                own = sims[np.arange(n), new]
                # steal the worst-served point; only from clusters that keep a member
                counts = np.bincount(new, minlength=k)
                cand = np.flatnonzero(counts[new] > 1)
                far = cand[np.argmin(own[cand])]
                new[far] = c
        changed = not np.array_equal(new, assign)
        assign = new
        for c in range(k):
            s = x[assign == c].sum(axis=0)
            norm = np.linalg.norm(s)
            if norm > 0:
                centroids[c] = s / norm
        history.append(float(np.sum(x * centroids[assign])))
        if not changed:
            break

    return KmeansResult(
        assignments=assign,
        centroids=centroids,
        objective=history[-1],
        iterations=iterations,
        objective_history=tuple(history),
    )
