"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line (printed in the terminal summary by
conftest) and then asserts the criterion. Tolerances are the stated ones;
nothing here is loosened to make a run pass.
"""
import math
import time

import numpy as np
import pytest

from kinetikos import cli
from kinetikos import scenario as scn
from kinetikos.counting import build_counter, random_queries, run_queries
from kinetikos.discrepancy import color_random, improve_coloring, kinetic_discrepancy, loglog_slope, union_bound
from kinetikos.hypergraph import enumerate_kinetic_hyperedges, sampled_catalog, shatter_function, vc_dimension_estimate
from kinetikos.interference import (
    assign_hub_protocol,
    count_combinatorial_changes,
    grid_depth,
    interference_series,
    max_depth,
)
from kinetikos.sampling import SampleConfig, build_eps_net, verify_eps_net
from kinetikos.voronoi import select_facilities, verify_balanced

from conftest import random_points

RESULTS = {}


def record(k, ok, detail):
    RESULTS[k] = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[k])
    return ok


def _scenario(n, d, seed, family, s=1):
    return scn.generate_scenario(n, dimension=d, degree=s, seed=seed, family=family)


def test_criterion_1_oracle_equivalence():
    mismatches, slowest, runs = [], 0.0, 0
    for i in range(50):
        rng = np.random.default_rng(i)
        d = 1 + i % 2
        s = int(rng.integers(0, 3))
        n = int(rng.integers(3, 9))
        P = random_points(1000 + i, n, d, s=s)
        t0 = time.perf_counter()
        for tag in (("intervals",) if d == 1 else ()) + ("halfspaces", "balls"):
            cat = enumerate_kinetic_hyperedges(P, tag).edge_set()
            dense = sampled_catalog(P, tag, samples=10_000)
            runs += 1
            if cat != dense:
                mismatches.append((i, tag, len(cat ^ dense)))
        slowest = max(slowest, time.perf_counter() - t0)
    ok = not mismatches and slowest < 10.0
    record(1, ok, f"{runs} catalogs, mismatches={mismatches}, slowest instance {slowest:.2f}s")
    assert ok


def test_criterion_2_eps_net_soundness():
    t0 = time.perf_counter()
    bad = []
    for seed in range(20):
        P = random_points(seed, 100, 1)
        cat = enumerate_kinetic_hyperedges(P, "intervals")
        net = build_eps_net(P, "intervals", 0.2, SampleConfig(seed=seed), catalog=cat)
        rep = verify_eps_net(net, P, "intervals", cat)
        if not (net.verified and net.attempts <= 20 and rep.ok and rep.threshold == 20):
            bad.append(seed)
    took = time.perf_counter() - t0
    ok = not bad and took < 120
    record(2, ok, f"{20 - len(bad)}/20 verified nets, failing seeds {bad}, {took:.1f}s")
    assert ok


def test_criterion_3_balanced_voronoi(tmp_path):
    t0 = time.perf_counter()
    fails, worst, sizes = [], 0, []
    for seed in range(10):
        sc = _scenario(400, 2, 11 + seed, "bounded_cones")
        out = cli.run_experiment("voronoi", sc, tmp_path / str(seed), cli.Options(k=8, grid=1000, C=4.0))
        worst = max(worst, out.summary.get("max_load", 10**9))
        sizes.append(out.summary.get("facilities"))
        fails += out.failures
    took = time.perf_counter() - t0
    ok = not fails and worst <= 300 and took < 300
    record(3, ok, f"max load {worst} (bound 300), facility sizes {sorted(set(sizes))} "
                  f"(size bound {math.ceil(4 * 6 * 8 * math.log(8))}), failures {fails}, {took:.1f}s")
    assert ok


def test_criterion_4_interference():
    t0 = time.perf_counter()
    ns = (64, 144, 256)
    means, problems = [], []
    for n in ns:
        vals = []
        for seed in range(10):
            P = random_points(4000 + 100 * n + seed, n, 2)
            sch = assign_hub_protocol(P, SampleConfig(seed=seed))
            rep = interference_series(P, sch, np.linspace(0, 1, 500))
            ch = count_combinatorial_changes(sch)
            if not all(s.connected and s.diameter <= 3 for s in rep.samples):
                problems.append((n, seed, "diameter"))
            if rep.max_interference > 8 * math.sqrt(n * math.log(n)):
                problems.append((n, seed, "interference"))
            if ch.total > 4 * n**1.5 * math.sqrt(math.log(n)):
                problems.append((n, seed, "changes"))
            vals.append(rep.max_interference)
        means.append(float(np.mean(vals)))
    slope = loglog_slope(ns, means)
    took = time.perf_counter() - t0
    ok = not problems and slope <= 0.6 and took < 600
    record(4, ok, f"mean max I {dict(zip(ns, means))}, log-log slope {slope:.3f} (limit 0.6), "
                  f"bound violations {problems}, {took:.1f}s")
    assert ok


def test_criterion_5_approximate_counting():
    t0 = time.perf_counter()
    P = random_points(5, 200, 2)
    counter = build_counter(P, "balls", 0.1, SampleConfig(seed=5))
    res = run_queries(counter, random_queries(P, "balls", 1000, seed=5))
    bad = sum(q.error > 0.1 + 1e-12 for q in res)
    took = time.perf_counter() - t0
    ok = counter.approximation.verified is True and bad == 0 and took < 60
    record(5, ok, f"|A|={len(counter.approximation)}, worst error {max(q.error for q in res):.4f}, "
                  f"{bad} violations, {took:.1f}s")
    assert ok


def test_criterion_6_vc_and_shatter():
    t0 = time.perf_counter()
    static = [vc_dimension_estimate(random_points(600 + i, 8, 2, s=0), "halfspaces") for i in range(10)]
    kinetic = [vc_dimension_estimate(random_points(i, 12, 1), "intervals") for i in range(10)]
    slopes = []
    for i in range(3):
        P = random_points(700 + i, 8, 2)
        cat = enumerate_kinetic_hyperedges(P, "halfspaces")
        ms = np.arange(2, 9)
        pis = [shatter_function(P, "halfspaces", int(m), catalog=cat) for m in ms]
        slopes.append(loglog_slope(ms, pis))
    limit = 2 * 2 + 1 + math.log2(2 * 1) + 0.5
    took = time.perf_counter() - t0
    ok_static = all(v == 3 for v in static)
    ok_kinetic = all(v <= 4 for v in kinetic)
    ok_shatter = max(slopes) <= limit
    ok = ok_static and ok_kinetic and ok_shatter and took < 300
    record(6, ok, f"static halfplane VC {static}; kinetic interval VC {kinetic} (limit 4); "
                  f"shatter slopes {[round(s, 2) for s in slopes]} (limit {limit}); {took:.1f}s")
    assert ok


def test_criterion_7_discrepancy_trend():
    t0 = time.perf_counter()
    ns = (16, 32, 64, 128)
    medians, cells, under = [], 0, 0
    for n in ns:
        vals = []
        for seed in range(20):
            P = random_points(seed, n, 1)
            cat = enumerate_kinetic_hyperedges(P, "intervals")
            chi = color_random(n, seed)
            d0 = kinetic_discrepancy(P, "intervals", chi, cat)[0]
            cells += 1
            under += d0 <= union_bound(n, len(cat))
            vals.append(kinetic_discrepancy(P, "intervals", improve_coloring(P, "intervals", chi, catalog=cat),
                                            cat)[0])
        medians.append(float(np.median(vals)))
    slope = loglog_slope(ns, medians)
    took = time.perf_counter() - t0
    ok = slope <= 0.65 and under >= 0.9 * cells and took < 300
    record(7, ok, f"medians {dict(zip(ns, medians))}, slope {slope:.3f} (limit 0.65), "
                  f"baseline under bound {under}/{cells}, {took:.1f}s")
    assert ok


def test_criterion_8_planar_depth_oracle():
    t0 = time.perf_counter()
    over, equal = 0, 0
    for seed in range(50):
        rng = np.random.default_rng(800 + seed)
        C = rng.uniform(0, 1, (32, 2))
        R2 = rng.uniform(0.02, 0.25, 32) ** 2
        exact = max_depth(C, R2)[0]
        grid = grid_depth(C, R2, 1000)
        over += grid > exact
        equal += grid == exact
    took = time.perf_counter() - t0
    ok = over == 0 and equal >= 48 and took < 120
    record(8, ok, f"grid above exact {over}/50, equal {equal}/50, {took:.1f}s")
    assert ok


@pytest.mark.parametrize("command,n,d,family", [
    ("net", 100, 1, "intervals"),
    ("voronoi", 400, 2, "bounded_cones"),
    ("interference", 144, 2, "balls"),
    ("count", 200, 2, "balls"),
])
def test_criterion_9_determinism(command, n, d, family, tmp_path):
    sc = _scenario(n, d, 9, family)
    opts = cli.Options(k=8 if command == "voronoi" else None)
    a = cli.run_experiment(command, sc, tmp_path / "a", opts)
    b = cli.run_experiment(command, sc, tmp_path / "b", opts)
    diff = [f for f in a.files + ["failures.json"]
            if (tmp_path / "a" / f).read_bytes() != (tmp_path / "b" / f).read_bytes()]
    ok = a.files == b.files and not diff
    prev = RESULTS.get(9, "")
    done = prev.split("  ", 1)[1] + "; " if prev else ""
    line_ok = ok and "FAIL" not in prev
    record(9, line_ok, f"{done}{command}: {len(a.files)} files {'identical' if ok else f'differ {diff}'}")
    assert ok
