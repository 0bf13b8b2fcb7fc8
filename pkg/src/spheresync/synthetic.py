"""von Mises-Fisher sampling on S^{d-1} and the benchmark mixtures.

Sampling follows Wood (1994): draw the component along the mean direction
by rejection from a Beta envelope, pick a uniform direction in the tangent
space of the north pole, then reflect the north pole onto ``mu``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

from .sphere import FloatArray, PointCloud, normalize, UNIT_TOL

Seed = Union[int, np.random.Generator, None]


@dataclass(frozen=True)
class VmfParams:
    mu: FloatArray
    kappa: float
    count: int

    def __post_init__(self) -> None:
        mu = np.asarray(self.mu, dtype=np.float64)
        if mu.ndim != 1 or mu.shape[0] < 2 or abs(np.linalg.norm(mu) - 1.0) > UNIT_TOL:
            raise ValueError("mu must be a unit vector with d >= 2")
        if not self.kappa >= 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"count must be a positive integer, got {self.count}")
        object.__setattr__(self, "mu", mu)


def _rng(seed: Seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_vmf_cosines(kappa: float, dim: int, n: int, rng: np.random.Generator) -> FloatArray:
    """``n`` draws of ``w = <x, mu>`` for ``x ~ vMF(mu, kappa)`` on S^{dim-1}."""
    m = dim - 1
    # b written to avoid cancellation at large kappa
    b = m / (2.0 * kappa + np.sqrt(4.0 * kappa**2 + m**2))
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + m * np.log(1.0 - x0**2)

    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        # acceptance is >= ~0.6 for every (kappa, dim); oversample a little
        batch = max(16, int(1.5 * need))
        z = rng.beta(m / 2.0, m / 2.0, size=batch)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.uniform(size=batch)
        ok = kappa * w + m * np.log(1.0 - x0 * w) - c >= np.log(u)
        acc = w[ok][:need]
        out[filled : filled + acc.size] = acc
        filled += acc.size
    return out


def householder_to(mu: FloatArray) -> FloatArray:
    """Orthogonal reflection mapping ``e_1`` onto ``mu``."""
    d = mu.shape[0]
    e1 = np.zeros(d)
    e1[0] = 1.0
    v = e1 - mu
    vv = float(v @ v)
    if vv < 1e-30:
        return np.eye(d)
    return np.eye(d) - 2.0 * np.outer(v, v) / vv


def sample_vmf(params: VmfParams, seed: Seed = None) -> PointCloud:
    """I.i.d. vMF(mu, kappa) draws; deterministic for a given integer seed."""
    rng = _rng(seed)
    d = params.mu.shape[0]
    n = params.count
    w = sample_vmf_cosines(params.kappa, d, n, rng)
    v = rng.standard_normal((n, d - 1))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    x = np.empty((n, d))
    x[:, 0] = w
    x[:, 1:] = np.sqrt(np.clip(1.0 - w**2, 0.0, None))[:, None] * v
    x = x @ householder_to(params.mu).T
    # reflection is orthogonal, so this only strips rounding
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return PointCloud(x)


def vmf_mixture(
    groups: Sequence[tuple[ArrayLike, float, int]],
    seed: Seed = None,
    labels: Sequence | None = None,
) -> PointCloud:
    """Concatenate vMF bundles ``(mu, kappa, n)``; labels default to 1, 2, ..."""
    rng = _rng(seed)
    labels = list(range(1, len(groups) + 1)) if labels is None else list(labels)
    pts = []
    lab: list = []
    for (mu, kappa, n), name in zip(groups, labels):
        pts.append(sample_vmf(VmfParams(normalize(mu), float(kappa), int(n)), rng).points)
        lab.extend([name] * int(n))
    return PointCloud(np.vstack(pts), tuple(lab))


def make_dat1(seed: Seed = 0) -> PointCloud:
    """Three bundles of 50 on S^2, means on the coordinate axes, kappa = 20."""
    return vmf_mixture([(mu, 20.0, 50) for mu in np.eye(3)], seed)


def make_dat2(seed: Seed = 0) -> PointCloud:
    """Two antipodal bundles of 100 on S^4 along the first axis, kappa = 20."""
    e1 = np.eye(5)[0]
    return vmf_mixture([(e1, 20.0, 100), (-e1, 20.0, 100)], seed)
