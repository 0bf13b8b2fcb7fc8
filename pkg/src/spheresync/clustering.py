"""Threshold-graph cluster extraction over evolved oscillator positions."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .dynamics import RunConfig, SyncState, evolve
from .sphere import PointCloud, pairwise_cosine_distance

IntArray = NDArray[np.int64]


class PlateauWarning(RuntimeWarning):
    """Integration hit ``t_max`` before the order parameter levelled off."""


class UnionFind:
    """Disjoint sets over ``0..n-1`` with union by size and path halving."""

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


def build_adjacency(points: PointCloud | ArrayLike, epsilon: float) -> NDArray[np.bool_]:
    """Boolean ``(N, N)`` matrix with ``A[i, j]`` true iff ``d(Q_i, Q_j) < epsilon``."""
    if not 0 < epsilon < 2:
        raise ValueError(f"epsilon must lie in (0, 2), got {epsilon}")
    q = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] == 0:
        raise ValueError("need a non-empty (N, d) array of points")
    return pairwise_cosine_distance(q) < epsilon


def connected_components(adj: ArrayLike) -> IntArray:
    """Component id per node, numbered in order of first appearance."""
    a = np.asarray(adj, dtype=bool)
    n = a.shape[0]
    uf = UnionFind(n)
    rows, cols = np.nonzero(np.triu(a, k=1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        uf.union(i, j)
    ids = np.empty(n, dtype=np.int64)
    seen: dict[int, int] = {}
    for i in range(n):
        root = uf.find(i)
        if root not in seen:
            seen[root] = len(seen)
        ids[i] = seen[root]
    return ids


def order_by_size(ids: ArrayLike) -> IntArray:
    """Relabel so cluster 0 is the largest; ties go to the smaller first member."""
    ids = np.asarray(ids, dtype=np.int64)
    uniq, first, counts = np.unique(ids, return_index=True, return_counts=True)
    order = sorted(range(len(uniq)), key=lambda c: (-counts[c], first[c]))
    remap = np.empty(len(uniq), dtype=np.int64)
    remap[order] = np.arange(len(uniq))
    return remap[np.searchsorted(uniq, ids)]


@dataclass(frozen=True)
class ClusteringResult:
    labels: IntArray
    cluster_sizes: tuple
    outlier_flags: tuple
    stop_time: float
    r_trace: tuple
    plateau_reached: bool = True
    warnings: tuple = ()

    @property
    def k(self) -> int:
        return len(self.cluster_sizes)

    @property
    def n(self) -> int:
        return int(self.labels.shape[0])

    @property
    def outlier_cluster_ids(self) -> list[int]:
        return [c for c, flag in enumerate(self.outlier_flags) if flag]

    @property
    def r_norm_final(self) -> float:
        return self.r_trace[-1][1]

    def point_is_outlier(self) -> NDArray[np.bool_]:
        return np.asarray(self.outlier_flags, dtype=bool)[self.labels]


def extract_clusters(
    state: SyncState, epsilon: float, min_cluster_size: int = 3
) -> ClusteringResult:
    """Cluster an already evolved state at threshold ``epsilon``.

    Splitting this step out of :func:`cluster` lets a sweep over ``epsilon``
    reuse one integration.
    """
    labels = order_by_size(connected_components(build_adjacency(state.positions, epsilon)))
    sizes = tuple(int(c) for c in np.bincount(labels))
    notes = ()
    if not state.plateau_reached:
        notes = (f"plateau not reached before t_max; clusters taken at t = {state.time:g}",)
    return ClusteringResult(
        labels=labels,
        cluster_sizes=sizes,
        outlier_flags=tuple(s < min_cluster_size for s in sizes),
        stop_time=state.time,
        r_trace=state.r_history,
        plateau_reached=state.plateau_reached,
        warnings=notes,
    )


def cluster(cloud: PointCloud | ArrayLike, config: Optional[RunConfig] = None) -> ClusteringResult:
    """Full pipeline: evolve to the plateau, threshold, take components.

    Clusters smaller than ``config.min_cluster_size`` are kept but flagged as
    outliers.  A missed plateau is reported through ``result.warnings`` and a
    :class:`PlateauWarning`.
    """
    config = RunConfig() if config is None else config
    state = evolve(cloud, config)
    result = extract_clusters(state, config.epsilon, config.min_cluster_size)
    for msg in result.warnings:
        warnings.warn(msg, PlateauWarning, stacklevel=2)
    return result


def refines(fine: Sequence[int], coarse: Sequence[int]) -> bool:
    """True if every block of ``fine`` lies inside a single block of ``coarse``."""
    owner: dict = {}
    for f, c in zip(fine, coarse):
        if owner.setdefault(f, c) != c:
            return False
    return True
