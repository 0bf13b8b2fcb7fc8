"""Synchronization clustering of unit vectors with the hyperspherical Kuramoto model."""

from .baseline import KmeansResult, spherical_kmeans
from .clustering import (
    ClusteringResult,
    PlateauWarning,
    build_adjacency,
    cluster,
    connected_components,
    extract_clusters,
)
from .dynamics import (
    ConfigError,
    RunConfig,
    SyncState,
    evolve,
    integrate_fixed,
    integrate_until_plateau,
    kuramoto_rhs,
    kuramoto_rhs_general,
    rk4_step,
)
from .io import DataError, DatasetFile, load_csv, load_iris
from .metrics import (
    ConfusionMatrix,
    MetricReport,
    align_labels,
    ari,
    confusion_matrix,
    evaluate,
    macro_precision,
    macro_recall,
    nmi,
)
from .sphere import OrderParameter, PointCloud, cosine_distance, normalize, order_parameter
from .sweep import DEFAULT_EPSILON_GRID, SweepRow, best_row, sweep
from .synthetic import VmfParams, make_dat1, make_dat2, sample_vmf, vmf_mixture

__version__ = "0.1.0"
