"""Geometry primitives on the unit hypersphere S^{d-1}.

Points are plain 1-D float arrays; a :class:`PointCloud` holds an ``(N, d)``
array of them together with optional ground-truth labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

FloatArray = NDArray[np.float64]

UNIT_TOL = 1e-9


class DimensionError(ValueError):
    """Raised when vector dimensions are invalid or do not agree."""


def normalize(v: ArrayLike) -> FloatArray:
    """Scale ``v`` to unit Euclidean length."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise DimensionError(f"need a vector with d >= 2 entries, got shape {arr.shape}")
    norm = np.linalg.norm(arr)
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("cannot normalize zero vector")
    return arr / norm


def normalize_rows(x: ArrayLike) -> FloatArray:
    """Row-wise :func:`normalize` for an ``(N, d)`` array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise DimensionError(f"need an (N, d>=2) array, got shape {arr.shape}")
    norms = np.linalg.norm(arr, axis=1)
    bad = np.flatnonzero(~(norms > 0.0) | ~np.isfinite(norms))
    if bad.size:
        raise ValueError(f"cannot normalize zero vector (row {int(bad[0])})")
    return arr / norms[:, None]


def cosine_distance(a: ArrayLike, b: ArrayLike) -> float:
    """``1 - <a, b> / (|a| |b|)``, in [0, 2].

    The norms are divided out even for nominally unit inputs so that
    integration drift does not leak into the distance.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    # min/max clamp keeps rounding inside [0, 2]
    cos = float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
    return 1.0 - min(1.0, max(-1.0, cos))


def pairwise_cosine_distance(points: ArrayLike) -> FloatArray:
    """Dense ``(N, N)`` matrix of cosine distances between rows."""
    q = np.asarray(points, dtype=np.float64)
    norms = np.linalg.norm(q, axis=1)
    cos = (q @ q.T) / np.outer(norms, norms)
    np.clip(cos, -1.0, 1.0, out=cos)
    dist = 1.0 - cos
    # exact symmetry and zero diagonal regardless of gemm rounding
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist


@dataclass(frozen=True)
class PointCloud:
    """``N`` unit vectors of common dimension ``d`` with optional labels."""

    points: FloatArray
    labels: Optional[tuple] = None

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise DimensionError(f"points must be an (N, d) array, got shape {pts.shape}")
        if pts.shape[1] < 2:
            raise DimensionError("points must have dimension d >= 2")
        if pts.shape[0] and np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) > UNIT_TOL:
            raise ValueError("all points must have unit norm (use PointCloud.from_raw)")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != pts.shape[0]:
                raise ValueError(
                    f"label count {len(labels)} does not match point count {pts.shape[0]}"
                )
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_raw(cls, x: ArrayLike, labels: Optional[Sequence] = None) -> "PointCloud":
        """Project arbitrary nonzero rows onto the sphere."""
        return cls(normalize_rows(x), None if labels is None else tuple(labels))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class OrderParameter:
    vector: FloatArray
    norm: float


def order_parameter(cloud: PointCloud | ArrayLike) -> OrderParameter:
    """Mean of the oscillator vectors, ``R = (1/N) sum_j Q_j``, and ``|R|``."""
    q = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] == 0:
        raise ValueError("order parameter of an empty cloud is undefined")
    r = q.mean(axis=0)
    return OrderParameter(vector=r, norm=float(np.linalg.norm(r)))
