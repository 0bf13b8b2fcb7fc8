"""External clustering scores: macro recall/precision, NMI and ARI.

Macro scores are computed per true class.  Each class is matched to the
predicted cluster holding most of its members, so a cluster may serve
several classes (a merged cluster is then credited as full recall for each
class it absorbed, at reduced precision).  Ties go to the smaller cluster;
clusters still tied after that score identically, so the result does not
depend on how clusters are numbered.

NMI is normalized by the arithmetic mean of the two label entropies
(natural log; the base cancels).  ARI is the Hubert-Arabie adjusted index.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Hashable, Sequence

import numpy as np
from numpy.typing import NDArray


def _sort_key(x):
    # numbers before strings; keeps mixed-type label sets orderable
    return (isinstance(x, str), x)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with true classes as rows and predicted clusters as columns."""

    counts: NDArray[np.int64]
    class_names: tuple
    cluster_ids: tuple

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class MetricReport:
    macro_recall: float
    macro_precision: float
    ari: float
    nmi: float
    n_clusters: int

    def as_dict(self) -> dict:
        return asdict(self)


def _check(true_labels: Sequence, predicted_labels: Sequence) -> tuple[list, list]:
    t, p = list(true_labels), list(predicted_labels)
    if len(t) != len(p):
        raise ValueError(f"label length mismatch: {len(t)} true vs {len(p)} predicted")
    if not t:
        raise ValueError("labels must be non-empty")
    return t, p


def confusion_matrix(true_labels: Sequence, predicted_labels: Sequence) -> ConfusionMatrix:
    t, p = _check(true_labels, predicted_labels)
    classes = sorted(set(t), key=_sort_key)
    clusters = sorted(set(p), key=_sort_key)
    ci = {c: i for i, c in enumerate(classes)}
    ki = {k: i for i, k in enumerate(clusters)}
    counts = np.zeros((len(classes), len(clusters)), dtype=np.int64)
    for a, b in zip(t, p):
        counts[ci[a], ki[b]] += 1
    return ConfusionMatrix(counts, tuple(classes), tuple(clusters))


def _majority_class(counts: NDArray) -> NDArray[np.int64]:
    # argmax returns the first maximum, i.e. the smaller class index on ties
    return np.argmax(counts, axis=0)


def align_labels(true_labels: Sequence, predicted_labels: Sequence) -> dict[Hashable, Hashable]:
    """Map every predicted cluster to the true class holding most of its members.

    Many-to-one; ties go to the smaller class (in sorted order).
    """
    cm = confusion_matrix(true_labels, predicted_labels)
    owner = _majority_class(cm.counts)
    return {k: cm.class_names[owner[j]] for j, k in enumerate(cm.cluster_ids)}


def match_classes(cm: ConfusionMatrix) -> NDArray[np.int64]:
    """Column index of the cluster matched to each class (row)."""
    counts = cm.counts
    sizes = counts.sum(axis=0)
    match = np.zeros(counts.shape[0], dtype=np.int64)
    for i, row in enumerate(counts):
        best = np.flatnonzero(row == row.max())
        match[i] = best[np.argmin(sizes[best])]
    return match


def _tp_support(cm: ConfusionMatrix) -> tuple[NDArray, NDArray, NDArray]:
    counts = cm.counts
    if counts.sum() == 0:
        raise ValueError("confusion matrix is empty")
    match = match_classes(cm)
    rows = np.arange(counts.shape[0])
    tp = counts[rows, match]
    support = counts.sum(axis=1)
    predicted = counts.sum(axis=0)[match]
    return tp, support, predicted


def macro_recall(cm: ConfusionMatrix) -> float:
    """Mean over classes of ``TP_i / (TP_i + FN_i)``; empty classes are skipped."""
    tp, support, _ = _tp_support(cm)
    keep = support > 0
    return float(np.mean(tp[keep] / support[keep]))


def macro_precision(cm: ConfusionMatrix) -> float:
    """Mean over classes of ``TP_i / (TP_i + FP_i)`` for classes with a non-empty match."""
    tp, support, predicted = _tp_support(cm)
    keep = (support > 0) & (predicted > 0)
    return float(np.mean(tp[keep] / predicted[keep]))


def _entropy(counts: NDArray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def mutual_information(true_labels: Sequence, predicted_labels: Sequence) -> float:
    counts = confusion_matrix(true_labels, predicted_labels).counts.astype(np.float64)
    n = counts.sum()
    pij = counts / n
    pi = pij.sum(axis=1, keepdims=True)
    pj = pij.sum(axis=0, keepdims=True)
    nz = pij > 0
    return float(np.sum(pij[nz] * np.log(pij[nz] / (pi @ pj)[nz])))


def nmi(true_labels: Sequence, predicted_labels: Sequence) -> float:
    """Mutual information over the arithmetic mean of the two entropies."""
    cm = confusion_matrix(true_labels, predicted_labels)
    h_true = _entropy(cm.counts.sum(axis=1))
    h_pred = _entropy(cm.counts.sum(axis=0))
    nz = cm.counts > 0
    if h_true == 0.0 and h_pred == 0.0:
        return 1.0
    if np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1):
        # same partition up to relabeling; skip the rounding in MI / H
        return 1.0
    mi = mutual_information(true_labels, predicted_labels)
    value = mi / (0.5 * (h_true + h_pred))
    return float(min(1.0, max(0.0, value)))


def _comb2(x: NDArray) -> NDArray:
    x = x.astype(np.float64)
    return x * (x - 1.0) / 2.0


def ari(true_labels: Sequence, predicted_labels: Sequence) -> float:
    """Adjusted Rand index from pair counts of the contingency table."""
    counts = confusion_matrix(true_labels, predicted_labels).counts
    n = counts.sum()
    if n < 2:
        return 1.0
    index = _comb2(counts).sum()
    sum_a = _comb2(counts.sum(axis=1)).sum()
    sum_b = _comb2(counts.sum(axis=0)).sum()
    expected = sum_a * sum_b / _comb2(np.array(n))
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        # both partitions trivial (all-in-one or all singletons) and equal
        return 1.0
    return float((index - expected) / (max_index - expected))


def evaluate(true_labels: Sequence, predicted_labels: Sequence) -> MetricReport:
    """All four scores plus the number of predicted clusters."""
    cm = confusion_matrix(true_labels, predicted_labels)
    return MetricReport(
        macro_recall=macro_recall(cm),
        macro_precision=macro_precision(cm),
        ari=ari(true_labels, predicted_labels),
        nmi=nmi(true_labels, predicted_labels),
        n_clusters=len(cm.cluster_ids),
    )
