"""Command-line interface: ``generate``, ``cluster``, ``eval``, ``sweep``, ``trace``.

Exit codes: 0 success (warnings included), 1 usage error, 2 data or IO error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from contextlib import contextmanager
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .baseline import spherical_kmeans
from .clustering import cluster
from .dynamics import ConfigError, RunConfig, evolve
from .io import (
    DataError,
    DatasetFile,
    load_csv,
    load_iris,
    read_assignments,
    summary_dict,
    write_assignments,
    write_cloud_csv,
    write_summary,
    write_trace,
)
from .metrics import MetricReport, evaluate
from .sphere import PointCloud, normalize
from .sweep import DEFAULT_EPSILON_GRID, sweep
from .synthetic import make_dat1, make_dat2, vmf_mixture

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
BUILTIN_IRIS = "builtin:iris"
REPORT_FIELDS = ["algorithm", "macro_recall", "macro_precision", "ari", "nmi", "n_clusters"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", "-i", required=True, help=f"dataset CSV, or {BUILTIN_IRIS}")
    p.add_argument(
        "--label-col",
        default="auto",
        help="label column (name or 0-based index); 'auto' uses a column named 'label' if present, "
        "'none' treats every column as a feature",
    )
    p.add_argument("--header", dest="header", action="store_true", default=True)
    p.add_argument("--no-header", dest="header", action="store_false")
    p.add_argument("--delimiter", default=",")


def _add_config(p: argparse.ArgumentParser) -> None:
    d = RunConfig()
    p.add_argument("--delta", type=float, default=d.delta, help="RK4 step size")
    p.add_argument("--epsilon", type=float, default=d.epsilon, help="cosine-distance threshold")
    p.add_argument("--nu", type=float, default=d.nu, help="plateau tolerance on |R| per step")
    p.add_argument("--coupling", type=float, default=d.coupling)
    p.add_argument("--t-max", type=float, default=d.t_max)
    p.add_argument("--min-cluster-size", type=int, default=d.min_cluster_size)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--manual-T", dest="manual_t", type=float, default=None,
                   help="extract clusters at this time instead of the plateau")


def _config(args, **override) -> RunConfig:
    kw = dict(
        delta=args.delta,
        epsilon=args.epsilon,
        nu=args.nu,
        coupling=args.coupling,
        t_max=args.t_max,
        min_cluster_size=args.min_cluster_size,
        seed=args.seed,
        manual_t=args.manual_t,
    )
    kw.update(override)
    try:
        return RunConfig(**kw)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _load(args, need_labels: bool = False) -> PointCloud:
    if args.input == BUILTIN_IRIS:
        cloud = load_iris()
    else:
        label = args.label_col
        if label == "none":
            label = None
        elif label == "auto":
            label = None
            if args.header:
                with open(args.input, newline="") as fh:
                    first = next(csv.reader(fh, delimiter=args.delimiter), [])
                if "label" in [h.strip() for h in first]:
                    label = "label"
        cloud = load_csv(DatasetFile(args.input, args.delimiter, args.header, label))
    if need_labels and cloud.labels is None:
        raise DataError(f"{args.input}: labels required (use --label-col)")
    return cloud


@contextmanager
def _out(path: Optional[str]):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _report_row(name: str, rep: MetricReport) -> dict:
    return {"algorithm": name, **rep.as_dict()}


def _write_rows(rows: list[dict], fields: Sequence[str], out) -> None:
    w = csv.DictWriter(out, fieldnames=list(fields), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})


# -- commands ---------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.recipe == "dat1":
        cloud = make_dat1(args.seed)
    elif args.recipe == "dat2":
        cloud = make_dat2(args.seed)
    elif args.recipe == "iris":
        cloud = load_iris()
    else:
        if not args.mu:
            raise UsageError("vmf recipe needs at least one --mu")
        kappas = args.kappa or [None]
        ns = args.n or [None]
        if len(kappas) not in (1, len(args.mu)) or len(ns) not in (1, len(args.mu)):
            raise UsageError("--kappa and --n must be given once or once per --mu")
        groups = []
        for i, mu in enumerate(args.mu):
            kappa = kappas[i if len(kappas) > 1 else 0]
            n = ns[i if len(ns) > 1 else 0]
            if kappa is None or n is None:
                raise UsageError("vmf recipe needs --kappa and --n")
            if kappa < 0 or n < 1:
                raise UsageError("--kappa must be >= 0 and --n >= 1")
            try:
                normalize(mu)
            except ValueError as exc:
                raise UsageError(f"invalid --mu {mu}: {exc}") from None
            groups.append((mu, kappa, n))
        cloud = vmf_mixture(groups, args.seed)
    with _out(args.output) as fh:
        write_cloud_csv(cloud, fh)
    print(f"seed: {args.seed}", file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_cluster(args) -> int:
    config = _config(args)
    cloud = _load(args)
    if cloud.n < 2:
        raise DataError("need at least two points")
    # warnings travel in the summary and on stderr below
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = cluster(cloud, config)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "assignments.csv", "w", newline="") as fh:
        write_assignments(result, fh)
    summary = summary_dict(result, cloud, config)
    with open(out / "summary.json", "w") as fh:
        write_summary(summary, fh)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            write_trace(result.r_trace, fh)
    print(f"k={result.k} T={result.stop_time:g} |R(T)|={result.r_norm_final:.6f} sizes={list(result.cluster_sizes)}")
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _parse_baseline(text: str) -> tuple[str, int, int]:
    name, _, opts = text.partition(":")
    if name != "spkmeans":
        raise UsageError(f"unknown baseline {name!r} (supported: spkmeans)")
    params = dict(kv.split("=", 1) for kv in opts.split(",") if "=" in kv)
    try:
        return name, int(params["k"]), int(params.get("n_init", 1))
    except (KeyError, ValueError):
        raise UsageError("baseline must look like spkmeans:k=3 or spkmeans:k=3,n_init=10") from None


def cmd_eval(args) -> int:
    cloud = _load(args, need_labels=True)
    pred = read_assignments(args.assignments)
    if len(pred) != cloud.n:
        raise DataError(f"{len(pred)} assignments for {cloud.n} labelled points")
    rows = [_report_row("sync", evaluate(cloud.labels, pred))]
    if args.baseline:
        name, k, n_init = _parse_baseline(args.baseline)
        if not 1 <= k <= cloud.n or n_init < 1:
            raise UsageError(f"baseline needs 1 <= k <= {cloud.n} and n_init >= 1")
        km = spherical_kmeans(cloud, k, seed=args.seed, n_init=n_init)
        rows.append(_report_row(name, evaluate(cloud.labels, km.assignments.tolist())))
    with _out(args.output) as fh:
        _write_rows(rows, REPORT_FIELDS, fh)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _config(args)
    cloud = _load(args, need_labels=True)
    eps = args.epsilons if args.epsilons is not None else list(DEFAULT_EPSILON_GRID)
    for e in eps:
        _config(args, epsilon=e)
    nus = args.nus
    if nus is not None:
        for nu in nus:
            _config(args, nu=nu)
    rows = sweep(cloud, config, eps, nus)
    fields = ["nu", "epsilon", "k", "n_outlier_clusters", "T", "r_norm_final",
              "macro_recall", "macro_precision", "ari", "nmi", "n_clusters"]
    with _out(args.output) as fh:
        _write_rows([r.as_dict() for r in rows], fields, fh)
    return EXIT_OK


def cmd_trace(args) -> int:
    config = _config(args)
    cloud = _load(args)
    state = evolve(cloud, config)
    with _out(args.output) as fh:
        write_trace(state.r_history, fh, every=args.every)
    if not state.plateau_reached:
        print("warning: plateau not reached before t_max", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spheresync", description="Kuramoto synchronization clustering on the unit hypersphere")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic or bundled dataset as CSV")
    g.add_argument("recipe", choices=["dat1", "dat2", "vmf", "iris"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--mu", type=_floats, action="append", help="mean direction, e.g. 1,0,0 (repeatable)")
    g.add_argument("--kappa", type=float, action="append")
    g.add_argument("--n", type=int, action="append")
    g.add_argument("--output", "-o", default=None)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("cluster", help="run the synchronization clustering pipeline")
    _add_input(c)
    _add_config(c)
    c.add_argument("--output", "-o", required=True, help="directory for assignments.csv and summary.json")
    c.add_argument("--trace", default=None, help="also write the (t, r_norm) trace to this CSV")
    c.set_defaults(func=cmd_cluster)

    e = sub.add_parser("eval", help="score assignments against dataset labels")
    _add_input(e)
    e.add_argument("--assignments", "-a", required=True)
    e.add_argument("--baseline", default=None, help="e.g. spkmeans:k=3")
    e.add_argument("--seed", type=int, default=0, help="seed for the baseline")
    e.add_argument("--output", "-o", default=None)
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="grid over epsilon (and nu) with metrics per setting")
    _add_input(s)
    _add_config(s)
    s.add_argument("--epsilons", type=_floats, default=None, help="comma-separated thresholds")
    s.add_argument("--nus", type=_floats, default=None, help="comma-separated plateau tolerances")
    s.add_argument("--output", "-o", default=None)
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("trace", help="write the order-parameter trace only")
    _add_input(t)
    _add_config(t)
    t.add_argument("--every", type=int, default=1, help="keep every n-th sample")
    t.add_argument("--output", "-o", default=None)
    t.set_defaults(func=cmd_trace)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"spheresync: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError, OSError) as exc:
        print(f"spheresync: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
