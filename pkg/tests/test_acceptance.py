"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they
happen; they are also repeated in the terminal summary. The household
check runs only with ``--household PATH``.
"""

import io
import itertools
import math
import time

import numpy as np
import pytest

from conftest import random_antisymmetric, random_cloud
from oracles import (
    ari_pairs,
    blocks,
    nmi_entropy,
    set_partitions,
    transitive_closure_components,
    vmf_mean_resultant_bessel,
)
from spheresync.baseline import spherical_kmeans
from spheresync.clustering import build_adjacency, cluster, connected_components
from spheresync.dynamics import (
    RunConfig,
    SyncState,
    integrate_fixed,
    integrate_until_plateau,
    kuramoto_rhs,
    kuramoto_rhs_general,
    rk4_step,
)
from spheresync.io import DatasetFile, load_csv, load_iris, write_assignments
from spheresync.metrics import ari, nmi
from spheresync.sphere import normalize
from spheresync.sweep import DEFAULT_EPSILON_GRID, best_row, sweep
from spheresync.synthetic import VmfParams, make_dat1, make_dat2, sample_vmf

# published rows: recall, precision, ARI, NMI (and k for Iris)
TABLE1 = (0.987, 0.987, 0.960, 0.942)
TABLE2 = (0.980, 0.995, 0.980, 0.959)
TABLE3 = (0.850, 0.885, 0.478, 0.510)
TABLE4 = (1.0, 0.667, 0.568, 0.734)
SEEDS = range(5)  # fixed before any acceptance run

RESULTS: list[str] = []


def report(n: int, title: str, ok, detail: str) -> None:
    status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
    line = f"criterion {n} [{title}]: {status} | {detail}"
    RESULTS.append(line)
    print("\n" + line)


def _metrics(r):
    return (r.macro_recall, r.macro_precision, r.ari, r.nmi)


def _fmt(v):
    return "(" + ", ".join(f"{x:.3f}" for x in v) + ")"


def _sweep_seeds(make):
    out = []
    for seed in SEEDS:
        cloud = make(seed)
        t0 = time.perf_counter()
        row = best_row(sweep(cloud, RunConfig(seed=seed), DEFAULT_EPSILON_GRID))
        out.append((seed, cloud, row, time.perf_counter() - t0))
    return out


def _band(rows, table, tol=0.05):
    mean = np.mean([_metrics(r.report) for _, _, r, _ in rows], axis=0)
    return mean, bool(np.all(np.abs(mean - np.array(table)) <= tol))


def test_criterion_1_dat1():
    rows = _sweep_seeds(make_dat1)
    fails = []
    for seed, cloud, row, dt in rows:
        r, res = row.report, row.result
        truth = np.asarray(cloud.labels)
        majorities = {int(np.bincount(truth[res.labels == c]).argmax()) for c in range(min(3, res.k))}
        if r.macro_recall < 0.95 or r.ari < 0.90 or majorities != {1, 2, 3} or dt > 10:
            fails.append(f"seed {seed}: k={r.n_clusters} {_fmt(_metrics(r))} {dt:.2f}s")
    mean, in_band = _band(rows, TABLE1)
    ok = not fails and in_band
    detail = f"mean {_fmt(mean)} vs {_fmt(TABLE1)}; k per seed {[r.k for _, _, r, _ in rows]}"
    report(1, "Dat_1", ok, detail + ("; " + "; ".join(fails) if fails else ""))
    assert ok


def test_criterion_2_dat2():
    rows = _sweep_seeds(make_dat2)
    fails = []
    for seed, cloud, row, dt in rows:
        r = row.report
        trace = np.array([v for _, v in row.result.r_trace])
        monotone = bool(np.all(np.diff(trace) >= -1e-12))
        if r.n_clusters != 2 or r.ari < 0.95 or not monotone or trace[-1] >= 1.0 or dt > 10:
            fails.append(
                f"seed {seed}: k={r.n_clusters} sizes={row.result.cluster_sizes[:4]} "
                f"ARI={r.ari:.3f} monotone={monotone} R(T)={trace[-1]:.6f}"
            )
    mean, in_band = _band(rows, TABLE2)
    ok = not fails and in_band
    detail = f"mean {_fmt(mean)} vs {_fmt(TABLE2)}; k per seed {[r.k for _, _, r, _ in rows]}"
    report(2, "Dat_2", ok, detail + ("; " + "; ".join(fails) if fails else ""))
    assert ok


def test_criterion_3_iris():
    cloud = load_iris()
    t0 = time.perf_counter()
    rows = sweep(cloud, RunConfig(), DEFAULT_EPSILON_GRID)
    dt = time.perf_counter() - t0
    setosa = frozenset(i for i, l in enumerate(cloud.labels) if l == "setosa")
    hits = [r for r in rows if r.k == 2 and setosa in blocks(r.result.labels.tolist())]
    good = [r for r in hits if np.all(np.abs(np.array(_metrics(r.report)) - TABLE4) <= 0.02)]
    ok = bool(good) and dt <= 5
    shown = good[0] if good else (hits[0] if hits else None)
    detail = f"{len(hits)} grid values give setosa + one more cluster; runtime {dt:.2f}s"
    if shown is not None:
        detail += f"; eps={shown.epsilon:.3g} {_fmt(_metrics(shown.report))} vs {_fmt(TABLE4)}"
    report(3, "Iris", ok, detail)
    assert ok


def test_criterion_4_determinism():
    cloud = load_iris()
    outputs = set()
    for _ in range(20):
        buf = io.StringIO()
        write_assignments(cluster(cloud, RunConfig()), buf)
        outputs.add(buf.getvalue().encode())
    parts = {frozenset(blocks(spherical_kmeans(cloud, 3, seed=s).assignments.tolist())) for s in range(20)}
    ok = len(outputs) == 1 and len(parts) >= 2
    report(4, "determinism", ok, f"{len(outputs)} distinct sync outputs over 20 runs; "
                                 f"{len(parts)} distinct spkmeans partitions over 20 seeds")
    assert ok


def test_criterion_5_dynamics():
    rng = np.random.default_rng(2024)
    # (a) tangency, plain and rotating
    worst_tan = 0.0
    for i in range(1000):
        d = (2, 3, 5, 10)[i % 4]
        q = random_cloud(rng, int(rng.integers(2, 30)), d)
        w = np.stack([random_antisymmetric(rng, d) for _ in range(q.shape[0])])
        for f in (kuramoto_rhs(q), kuramoto_rhs_general(q, w)):
            worst_tan = max(worst_tan, float(np.max(np.abs(np.sum(f * q, axis=1)))))
    ok_a = worst_tan <= 1e-10

    # (b) unit norms after a step
    worst_norm = 0.0
    for i in range(200):
        d = (2, 3, 5, 10)[i % 4]
        cfg = RunConfig(delta=float(rng.choice([0.001, 0.01, 0.1])))
        s = rk4_step(SyncState.initial(random_cloud(rng, 20, d)), cfg)
        worst_norm = max(worst_norm, float(np.max(np.abs(np.linalg.norm(s.positions, axis=1) - 1))))
    ok_b = worst_norm <= 1e-9

    # (c) monotone order parameter
    worst_drop = 0.0
    for i in range(100):
        q = random_cloud(rng, int(rng.integers(3, 40)), (2, 3, 5, 10)[i % 4])
        trace = [r for _, r in integrate_until_plateau(q, RunConfig(t_max=10.0)).r_history]
        worst_drop = max(worst_drop, float(-np.min(np.diff(trace), initial=0.0)))
    ok_c = worst_drop <= 1e-8

    # (d) observed order from three step sizes at a fixed horizon
    q0 = random_cloud(np.random.default_rng(7), 10, 3)
    ends = [integrate_fixed(q0, RunConfig(delta=h), 1.0).positions for h in (0.1, 0.05, 0.025)]
    order = math.log2(np.max(np.abs(ends[0] - ends[1])) / np.max(np.abs(ends[1] - ends[2])))
    ok_d = order >= 3.5

    # (e) zero frequencies
    ok_e = all(
        np.array_equal(kuramoto_rhs_general(q, np.zeros((q.shape[0], q.shape[1], q.shape[1]))), kuramoto_rhs(q))
        for q in (random_cloud(rng, n, d) for n, d in itertools.product((2, 7, 31), (2, 3, 5, 10)))
    )
    ok = ok_a and ok_b and ok_c and ok_d and ok_e
    report(5, "dynamics", ok, f"(a) max |<f,q>|={worst_tan:.1e} (b) max norm err={worst_norm:.1e} "
                              f"(c) max drop={worst_drop:.1e} (d) order={order:.2f} (e) zero-W equal={ok_e}")
    assert ok


def test_criterion_6_oracles():
    rng = np.random.default_rng(99)
    comp_bad = 0
    for _ in range(500):
        n = int(rng.integers(1, 13))
        upper = np.triu(rng.random((n, n)) < rng.uniform(0.05, 0.5), 1)
        adj = upper | upper.T | np.eye(n, dtype=bool)
        comp_bad += blocks(connected_components(adj).tolist()) != transitive_closure_components(adj)
    sym_ok = all(
        np.array_equal(a, a.T)
        for a in (build_adjacency(random_cloud(rng, 15, 3), float(e)) for e in rng.uniform(0.01, 1.9, 50))
    )

    metric_bad = checked = 0
    for n in range(1, 9):
        parts = list(set_partitions(n))
        if n <= 5:
            pairs = itertools.product(parts, parts)
        else:
            refs = [parts[0], parts[-1]] + [parts[int(i)] for i in rng.integers(0, len(parts), 3)]
            pairs = ((p, r) for p in parts for r in refs)
        for t, p in pairs:
            checked += 1
            metric_bad += abs(ari(t, p) - ari_pairs(t, p)) > 1e-12 or abs(nmi(t, p) - nmi_entropy(t, p)) > 1e-12
    ok = comp_bad == 0 and sym_ok and metric_bad == 0
    report(6, "oracles", ok, f"{comp_bad}/500 component mismatches; symmetric adjacency={sym_ok}; "
                             f"{metric_bad}/{checked} metric mismatches over partitions of n<=8")
    assert ok


def test_criterion_7_vmf():
    lines, ok = [], True
    for d in (3, 5):
        mu = normalize(np.arange(1.0, d + 1))
        x = sample_vmf(VmfParams(mu, 20.0, 5000), seed=d).points
        got, want = float(np.linalg.norm(x.mean(axis=0))), vmf_mean_resultant_bessel(20.0, d)
        ok &= abs(got - want) <= 0.02
        lines.append(f"d={d} {got:.4f} vs {want:.4f}")
    for d in (3, 5):
        x = sample_vmf(VmfParams(np.eye(d)[0], 0.0, 5000), seed=10 + d).points
        r0 = float(np.linalg.norm(x.mean(axis=0)))
        ok &= r0 <= 0.03
        lines.append(f"kappa=0 d={d} {r0:.4f}")
    report(7, "vMF", ok, "; ".join(lines))
    assert ok


def test_criterion_8_household(request):
    path = request.config.getoption("--household")
    if not path:
        report(8, "household", "SKIP", "no --household file given (optional)")
        pytest.skip("household CSV not supplied")
    cloud = load_csv(DatasetFile(path, label_column="gender"))
    rows = sweep(cloud, RunConfig(), DEFAULT_EPSILON_GRID)
    hits = [r for r in rows if r.k == 2 and np.all(np.abs(np.array(_metrics(r.report)) - TABLE3) <= 0.05)]
    two = [r for r in rows if r.k == 2]
    shown = hits[0] if hits else (max(two, key=lambda r: r.report.ari) if two else None)
    detail = f"{len(two)} grid values give k=2"
    if shown is not None:
        detail += f"; eps={shown.epsilon:.3g} {_fmt(_metrics(shown.report))} vs {_fmt(TABLE3)}"
    report(8, "household", bool(hits), detail)
    assert hits
