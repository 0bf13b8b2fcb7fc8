"""Mean-field Kuramoto dynamics on S^{d-1} and fixed-step RK4 integration.

The clustering flow is

    dQ_j/dt = (K/N) sum_i (Q_i - <Q_j, Q_i> Q_j) = K (R - <Q_j, R> Q_j)

with ``R`` the order parameter.  The general model adds a rotation term
``W_j Q_j`` for antisymmetric frequency matrices ``W_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .sphere import FloatArray, PointCloud

RHS = Callable[[FloatArray], FloatArray]

ANTISYM_TOL = 1e-12


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Tunables for one clustering run.

    ``manual_t`` replaces the plateau rule by a fixed integration horizon
    when set.
    """

    delta: float = 0.01
    epsilon: float = 1e-4
    nu: float = 1e-5
    coupling: float = 1.0
    t_max: float = 50.0
    min_cluster_size: int = 3
    seed: int = 0
    manual_t: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ConfigError(f"delta must be > 0, got {self.delta}")
        if not 0 < self.epsilon < 2:
            raise ConfigError(f"epsilon must lie in (0, 2), got {self.epsilon}")
        if not self.nu > 0:
            raise ConfigError(f"nu must be > 0, got {self.nu}")
        if not self.coupling > 0:
            raise ConfigError(f"coupling must be > 0, got {self.coupling}")
        if not self.t_max > self.delta:
            raise ConfigError(f"t_max ({self.t_max}) must exceed delta ({self.delta})")
        if int(self.min_cluster_size) != self.min_cluster_size or self.min_cluster_size < 1:
            raise ConfigError(f"min_cluster_size must be a positive integer, got {self.min_cluster_size}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed}")
        if self.manual_t is not None and not 0 <= self.manual_t <= self.t_max:
            raise ConfigError(f"manual_t must lie in [0, t_max], got {self.manual_t}")

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "epsilon": self.epsilon,
            "nu": self.nu,
            "coupling": self.coupling,
            "t_max": self.t_max,
            "min_cluster_size": self.min_cluster_size,
            "seed": self.seed,
            "manual_t": self.manual_t,
        }


@dataclass(frozen=True)
class SyncState:
    """Oscillator positions at ``time`` plus the ``(t, |R|)`` history.

    ``norm_drift`` is the largest deviation from unit norm seen before
    renormalization, over every step that produced this state.
    """

    positions: FloatArray
    time: float
    r_history: tuple = ()
    plateau_reached: bool = True
    norm_drift: float = 0.0
    steps: int = 0

    @classmethod
    def initial(cls, cloud: PointCloud | ArrayLike) -> "SyncState":
        q = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=np.float64)
        q = np.array(q, dtype=np.float64)
        return cls(positions=q, time=0.0, r_history=((0.0, _r_norm(q)),))

    @property
    def r_norm(self) -> float:
        return self.r_history[-1][1] if self.r_history else _r_norm(self.positions)


def _as_positions(positions: PointCloud | ArrayLike) -> FloatArray:
    q = positions.points if isinstance(positions, PointCloud) else np.asarray(positions, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] == 0:
        raise ValueError("need a non-empty (N, d) array of positions")
    return q


def _r_norm(q: FloatArray) -> float:
    return float(np.sqrt(np.sum(q.mean(axis=0) ** 2)))


def kuramoto_rhs(positions: PointCloud | ArrayLike, coupling: float = 1.0) -> FloatArray:
    """Right-hand side of the ``W = 0`` clustering flow, one row per oscillator.

    Uses the mean-field form ``K (R - <Q_j, R> Q_j)``.  Only elementwise
    reductions are used (no BLAS), so the summation order is fixed and the
    result does not depend on the thread count.
    """
    q = _as_positions(positions)
    r = q.mean(axis=0)
    proj = np.sum(q * r, axis=1)
    return coupling * (r - proj[:, None] * q)


def check_antisymmetric(w: ArrayLike, tol: float = ANTISYM_TOL) -> FloatArray:
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"frequency matrix must be square, got shape {w.shape}")
    if np.max(np.abs(w + w.T), initial=0.0) > tol:
        raise ValueError("frequency matrix must be antisymmetric")
    return w


def kuramoto_rhs_general(
    positions: PointCloud | ArrayLike,
    freqs: Sequence[ArrayLike] | ArrayLike,
    coupling: float = 1.0,
) -> FloatArray:
    """Coupled model with per-oscillator rotation: ``K(R - <Q_j,R>Q_j) + W_j Q_j``."""
    q = _as_positions(positions)
    w = np.asarray(freqs, dtype=np.float64)
    n, d = q.shape
    if w.shape != (n, d, d):
        raise ValueError(f"expected {n} frequency matrices of shape ({d}, {d}), got {w.shape}")
    for wj in w:
        check_antisymmetric(wj)
    out = kuramoto_rhs(q, coupling)
    out += np.sum(w * q[:, None, :], axis=2)
    return out


def _rk4(q: FloatArray, dt: float, rhs: RHS) -> FloatArray:
    k1 = rhs(q)
    k2 = rhs(q + (0.5 * dt) * k1)
    k3 = rhs(q + (0.5 * dt) * k2)
    k4 = rhs(q + dt * k3)
    return q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _project(q: FloatArray) -> tuple[FloatArray, float]:
    norms = np.sqrt(np.sum(q * q, axis=1))
    drift = float(np.max(np.abs(norms - 1.0)))
    return q / norms[:, None], drift


def default_rhs(config: RunConfig) -> RHS:
    return partial(kuramoto_rhs, coupling=config.coupling)


def rk4_step(state: SyncState, config: RunConfig, rhs: Optional[RHS] = None) -> SyncState:
    """Advance one classical RK4 step of size ``config.delta``, then renormalize."""
    rhs = default_rhs(config) if rhs is None else rhs
    q, drift = _project(_rk4(state.positions, config.delta, rhs))
    steps = state.steps + 1
    t = state.time + config.delta
    return SyncState(
        positions=q,
        time=t,
        r_history=state.r_history + ((t, _r_norm(q)),),
        plateau_reached=state.plateau_reached,
        norm_drift=max(state.norm_drift, drift),
        steps=steps,
    )


def _run(
    q: FloatArray,
    config: RunConfig,
    rhs: RHS,
    max_steps: int,
    stop_on_plateau: bool,
) -> SyncState:
    dt = config.delta
    r_prev = _r_norm(q)
    history = [(0.0, r_prev)]
    drift = 0.0
    plateau = False
    step = 0
    while step < max_steps:
        q, d = _project(_rk4(q, dt, rhs))
        step += 1
        drift = max(drift, d)
        r = _r_norm(q)
        history.append((step * dt, r))
        if stop_on_plateau and abs(r - r_prev) < config.nu:
            plateau = True
            break
        r_prev = r
    return SyncState(
        positions=q,
        time=step * dt,
        r_history=tuple(history),
        plateau_reached=plateau or not stop_on_plateau,
        norm_drift=drift,
        steps=step,
    )


def integrate_until_plateau(
    cloud: PointCloud | ArrayLike, config: RunConfig, rhs: Optional[RHS] = None
) -> SyncState:
    """Integrate until ``| |R(t+delta)| - |R(t)| | < nu`` or ``t_max``.

    Hitting ``t_max`` is not an error: the returned state carries
    ``plateau_reached=False``.
    """
    q = np.array(_as_positions(cloud), dtype=np.float64)
    if q.shape[0] < 2:
        raise ValueError("need at least two points to integrate")
    rhs = default_rhs(config) if rhs is None else rhs
    max_steps = math.ceil(config.t_max / config.delta - 1e-9)
    return _run(q, config, rhs, max_steps, stop_on_plateau=True)


def integrate_fixed(
    cloud: PointCloud | ArrayLike, config: RunConfig, t_stop: float, rhs: Optional[RHS] = None
) -> SyncState:
    """Integrate to the fixed horizon ``t_stop`` (rounded to a whole number of steps)."""
    if t_stop < 0:
        raise ValueError("t_stop must be non-negative")
    q = np.array(_as_positions(cloud), dtype=np.float64)
    rhs = default_rhs(config) if rhs is None else rhs
    return _run(q, config, rhs, int(round(t_stop / config.delta)), stop_on_plateau=False)


def evolve(cloud: PointCloud | ArrayLike, config: RunConfig) -> SyncState:
    """Plateau rule, or the fixed horizon ``config.manual_t`` when it is set."""
    if config.manual_t is not None:
        return integrate_fixed(cloud, config, config.manual_t)
    return integrate_until_plateau(cloud, config)
