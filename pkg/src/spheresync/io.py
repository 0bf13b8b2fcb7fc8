"""CSV datasets, the bundled Iris table, and result serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

import numpy as np

from .clustering import ClusteringResult
from .dynamics import RunConfig
from .sphere import PointCloud

PathLike = Union[str, Path]


class DataError(ValueError):
    """Malformed or unusable input data."""


@dataclass(frozen=True)
class DatasetFile:
    """Where and how to read a dataset.

    ``label_column`` is a header name or a 0-based column index; ``None``
    means every column is a feature.
    """

    path: PathLike
    delimiter: str = ","
    has_header: bool = True
    label_column: Optional[Union[str, int]] = None


def _resolve_label_column(label_column, header: Optional[list], width: int) -> Optional[int]:
    if label_column is None:
        return None
    if isinstance(label_column, int) or (isinstance(label_column, str) and label_column.lstrip("-").isdigit()):
        idx = int(label_column)
        if idx < 0:
            idx += width
        if not 0 <= idx < width:
            raise DataError(f"label column index {label_column} out of range for {width} columns")
        return idx
    if header is None:
        raise DataError(f"label column {label_column!r} given by name but the file has no header")
    if label_column not in header:
        raise DataError(f"label column {label_column!r} not found in header {header}")
    return header.index(label_column)


def parse_csv(text: Iterable[str], spec: DatasetFile) -> PointCloud:
    rows = [r for r in csv.reader(text, delimiter=spec.delimiter) if r and any(c.strip() for c in r)]
    header = None
    start = 1
    if spec.has_header:
        if not rows:
            raise DataError(f"{spec.path}: empty file")
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
        start = 2
    if not rows:
        raise DataError(f"{spec.path}: no data rows")
    width = len(header) if header is not None else len(rows[0])
    label_idx = _resolve_label_column(spec.label_column, header, width)

    feats = []
    labels = []
    for offset, row in enumerate(rows):
        line = start + offset
        if len(row) != width:
            raise DataError(f"{spec.path}: line {line} has {len(row)} fields, expected {width}")
        vals = []
        for col, cell in enumerate(row):
            if col == label_idx:
                labels.append(cell.strip())
                continue
            try:
                v = float(cell)
            except ValueError:
                raise DataError(
                    f"{spec.path}: line {line}, column {col + 1}: cannot parse {cell!r} as a number"
                ) from None
            if not math.isfinite(v):
                raise DataError(f"{spec.path}: line {line}, column {col + 1}: non-finite value {cell!r}")
            vals.append(v)
        if not any(vals):
            raise DataError(f"{spec.path}: line {line} (data row {offset}) is a zero vector; cannot normalize")
        feats.append(vals)

    x = np.asarray(feats, dtype=np.float64)
    if x.shape[1] < 2:
        raise DataError(f"{spec.path}: need at least two feature columns, got {x.shape[1]}")
    x = x / np.linalg.norm(x, axis=1, keepdims=True)
    return PointCloud(x, tuple(labels) if label_idx is not None else None)


def load_csv(spec: DatasetFile) -> PointCloud:
    """Read a CSV and project each feature row onto the unit sphere."""
    with open(spec.path, newline="") as fh:
        return parse_csv(fh, spec)


def load_iris() -> PointCloud:
    """Bundled Fisher Iris measurements (150 x 4), normalized, species labels."""
    text = resources.files("spheresync").joinpath("data/iris.csv").read_text()
    return parse_csv(io.StringIO(text), DatasetFile("iris.csv", label_column="species"))


def _fmt(v: float) -> str:
    # repr is the shortest string that round-trips exactly
    return repr(float(v))


def write_cloud_csv(cloud: PointCloud, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    cols = [f"x{i + 1}" for i in range(cloud.dim)]
    w.writerow(cols + (["label"] if cloud.labels is not None else []))
    for i, p in enumerate(cloud.points):
        row = [_fmt(v) for v in p]
        if cloud.labels is not None:
            row.append(str(cloud.labels[i]))
        w.writerow(row)


def write_assignments(result: ClusteringResult, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["index", "cluster", "outlier"])
    flags = result.point_is_outlier()
    for i, (c, f) in enumerate(zip(result.labels.tolist(), flags.tolist())):
        w.writerow([i, c, int(f)])


def read_assignments(path: PathLike) -> list[int]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "cluster" not in reader.fieldnames:
            raise DataError(f"{path}: expected a 'cluster' column")
        try:
            rows = [(int(r["index"]) if "index" in r else i, int(r["cluster"])) for i, r in enumerate(reader)]
        except (TypeError, ValueError) as exc:
            raise DataError(f"{path}: malformed assignments ({exc})") from None
    rows.sort()
    return [c for _, c in rows]


def write_trace(trace: Sequence[tuple[float, float]], out: TextIO, every: int = 1) -> None:
    """``t, r_norm`` rows; ``every`` thins the trace but always keeps the last sample."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "r_norm"])
    last = len(trace) - 1
    for i, (t, r) in enumerate(trace):
        if i % every == 0 or i == last:
            w.writerow([_fmt(t), _fmt(r)])


def summary_dict(result: ClusteringResult, cloud: PointCloud, config: RunConfig) -> dict:
    return {
        "n": cloud.n,
        "d": cloud.dim,
        "k": result.k,
        "T": result.stop_time,
        "r_norm_final": result.r_norm_final,
        "config": config.to_dict(),
        "warnings": list(result.warnings),
        "cluster_sizes": list(result.cluster_sizes),
        "outlier_cluster_ids": result.outlier_cluster_ids,
    }


def write_summary(summary: dict, out: TextIO) -> None:
    json.dump(summary, out, indent=2)
    out.write("\n")
