"""Grid search over the clustering threshold (and optionally the plateau tolerance).

One integration is shared by every threshold at a given ``nu``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .clustering import ClusteringResult, extract_clusters
from .dynamics import RunConfig, evolve
from .metrics import MetricReport, evaluate
from .sphere import PointCloud

# quarter-decade steps from 1e-7 to 1
DEFAULT_EPSILON_GRID: tuple[float, ...] = tuple(float(10.0 ** (i / 4)) for i in range(-28, 1))


@dataclass(frozen=True)
class SweepRow:
    nu: float
    epsilon: float
    result: ClusteringResult
    report: Optional[MetricReport] = None

    @property
    def k(self) -> int:
        return self.result.k

    def as_dict(self) -> dict:
        row = {
            "nu": self.nu,
            "epsilon": self.epsilon,
            "k": self.k,
            "n_outlier_clusters": len(self.result.outlier_cluster_ids),
            "T": self.result.stop_time,
            "r_norm_final": self.result.r_norm_final,
        }
        if self.report is not None:
            row.update(self.report.as_dict())
        return row


def sweep(
    cloud: PointCloud,
    config: RunConfig,
    epsilons: Sequence[float] = DEFAULT_EPSILON_GRID,
    nus: Optional[Sequence[float]] = None,
) -> list[SweepRow]:
    """Rows ordered by ``nu`` then ``epsilon`` as given; scored when labels exist."""
    if len(epsilons) == 0:
        raise ValueError("empty epsilon grid")
    nus = [config.nu] if nus is None else list(nus)
    if len(nus) == 0:
        raise ValueError("empty nu grid")
    rows = []
    for nu in nus:
        cfg = replace(config, nu=nu, epsilon=float(epsilons[0]))
        state = evolve(cloud, cfg)
        for eps in epsilons:
            replace(cfg, epsilon=float(eps))  # validates the threshold
            res = extract_clusters(state, float(eps), config.min_cluster_size)
            report = evaluate(cloud.labels, res.labels) if cloud.labels is not None else None
            rows.append(SweepRow(nu, float(eps), res, report))
    return rows


def best_row(rows: Sequence[SweepRow]) -> SweepRow:
    """Highest ARI; ties prefer fewer clusters, then the smaller threshold."""
    scored = [r for r in rows if r.report is not None]
    if not scored:
        raise ValueError("rows carry no metric reports (unlabelled data)")
    return min(scored, key=lambda r: (-r.report.ari, r.k, r.nu, r.epsilon))
