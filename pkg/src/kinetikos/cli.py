"""Command-line experiments: ``kinetikos COMMAND --scenario PATH --out DIR``.

Every command writes its report files into ``--out``, a ``failures.json``
list of failed assertions and one summary line on standard output.

Exit status: 0 all assertions hold (or ``--report-only``), 1 assertion
failure, 2 usage error, 3 input/output error.

CSV columns per command:
  net           net_report.csv: edge,size,witness_time
  approx        approx_report.csv: edge,deviation,witness_time
  voronoi       load.csv, load_S<j>.csv: time,max_load,argmax_site
  interference  interference.csv: t,interference,connected,diameter,num_edges
                changes.csv: point_index,change_count
  count         results.csv: time,estimate,exact,error
  disc          coloring.csv: index,color; disc.csv: coloring,discrepancy,witness
                trend.csv: n,measured_disc,ref_kinetic,ref_shatter
  oracle        catalog_<family>.txt: indices | witness time | witness range
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import scenario as scn
from .counting import build_counter, max_relative_error, random_queries, read_queries, run_queries, write_results
from .discrepancy import (color_random, improve_coloring, kinetic_discrepancy, loglog_slope, union_bound,
                          write_trend)
from .hypergraph import enumerate_kinetic_hyperedges, sampled_catalog
from .interference import assign_hub_protocol, count_combinatorial_changes, interference_series
from .ranges import FAMILIES, GuardExceeded, family
from .sampling import SampleConfig, SamplingError, build_eps_approximation, build_eps_net, verify_eps_approximation, verify_eps_net
from .svg import line_plot
from .voronoi import select_facilities, verify_balanced

COMMANDS = ("net", "approx", "voronoi", "interference", "count", "disc", "oracle")
EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

DEFAULT_EPS = {"net": 0.2, "approx": 0.2, "count": 0.1}
DEFAULT_GRID = {"voronoi": 1000, "interference": 500, "oracle": 10_000}
TREND_SLOPE_MAX = 0.65
ROBUSTNESS_SETS = 3


class InputError(OSError):
    """Unreadable or malformed input file."""


@dataclass
class Options:
    seed: int | None = None
    epsilon: float | None = None
    k: int | None = None
    grid: int | None = None
    C: float = 4.0
    threads: int | None = None
    report_only: bool = False
    queries: str | None = None
    num_queries: int = 1000
    trend: tuple = ()
    trials: int = 5


@dataclass
class Outcome:
    command: str
    summary: dict
    failures: list = field(default_factory=list)
    files: list = field(default_factory=list)

    def line(self) -> str:
        parts = " ".join(f"{k}={_show(v)}" for k, v in self.summary.items())
        status = "PASS" if not self.failures else f"FAIL({len(self.failures)})"
        return f"{self.command}: {parts} {status}"


def _show(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _param(sc, opts, name, default):
    v = getattr(opts, name)
    if v is None:
        v = sc.params.get(name, default)
    return v


def _cfg(sc, opts) -> SampleConfig:
    seed = sc.seed if opts.seed is None else opts.seed
    return SampleConfig(seed=int(seed), C=opts.C, workers=opts.threads)


class _Run:
    def __init__(self, command, out):
        self.out = out
        self.o = Outcome(command, {})

    def path(self, name):
        p = os.path.join(self.out, name)
        self.o.files.append(name)
        return p

    def check(self, ok, message):
        if not ok:
            self.o.failures.append(message)


def _net(sc, opts, r):
    P, fam = sc.moving_points(), family(sc.family)
    eps = _param(sc, opts, "epsilon", DEFAULT_EPS["net"])
    cfg = _cfg(sc, opts)
    try:
        cat = enumerate_kinetic_hyperedges(P, fam, workers=opts.threads)
    except GuardExceeded:
        cat = None
    try:
        net = build_eps_net(P, fam, eps, cfg, catalog=cat)
    except SamplingError as exc:
        r.check(False, f"net: {exc}")
        return
    net.export(r.path("net.txt"))
    r.o.summary.update(n=P.n, eps=eps, size=len(net), attempts=net.attempts)
    if cat is None:
        r.check(False, "net: catalog too large to verify")
        return
    rep = verify_eps_net(net, P, fam, cat)
    with open(r.path("net_report.csv"), "w") as fh:
        fh.write("edge,size,witness_time\n")
        for edge, t, _ in rep.uncovered:
            fh.write(f"{' '.join(map(str, edge))},{len(edge)},{t!r}\n")
    r.o.summary.update(edges=rep.checked_edges, uncovered=len(rep))
    r.check(rep.ok, f"net: {len(rep)} uncovered edges of size >= {rep.threshold}")


def _approx(sc, opts, r):
    P, fam = sc.moving_points(), family(sc.family)
    eps = _param(sc, opts, "epsilon", DEFAULT_EPS["approx"])
    try:
        cat = enumerate_kinetic_hyperedges(P, fam, workers=opts.threads)
    except GuardExceeded:
        r.check(False, "approx: catalog too large to verify")
        return
    try:
        A = build_eps_approximation(P, fam, eps, _cfg(sc, opts), catalog=cat)
    except SamplingError as exc:
        r.check(False, f"approx: {exc}")
        return
    A.export(r.path("approx.txt"))
    rep = verify_eps_approximation(A, P, fam, cat)
    with open(r.path("approx_report.csv"), "w") as fh:
        fh.write("edge,deviation,witness_time\n")
        for edge, dev, t in rep.violations:
            fh.write(f"{' '.join(map(str, edge))},{dev!r},{t!r}\n")
    r.o.summary.update(n=P.n, eps=eps, size=len(A), attempts=A.attempts, max_deviation=rep.max_deviation)
    r.check(rep.ok, f"approx: {len(rep.violations)} edges deviate by more than {eps}")


def _voronoi(sc, opts, r):
    P = sc.moving_points()
    cfg = _cfg(sc, opts)
    k = int(_param(sc, opts, "k", 8))
    grid = int(_param(sc, opts, "grid", DEFAULT_GRID["voronoi"]))
    try:
        N = select_facilities(P, k, cfg)
    except SamplingError as exc:
        r.check(False, f"voronoi: {exc}")
        return
    with open(r.path("facilities.txt"), "w") as fh:
        fh.write(f"# k: {k}\n# C: {N.C!r}\n# vc: {N.vc}\n# verified: {N.verified}\n# size: {len(N)}\n")
        fh.writelines(f"{i}\n" for i in N.indices)
    r.check(len(N) <= N.size_bound, f"voronoi: {len(N)} facilities exceed {N.size_bound}")
    rep = verify_balanced(P, N, grid=grid, k=k)
    rep.export(r.path("load.csv"))
    r.check(rep.ok, f"voronoi: max load {rep.max_load} > {rep.bound} at t={rep.time_of_max!r}")
    line_plot(r.path("load.svg"), {"max load": (rep.times, rep.max_loads),
                                   "bound": (rep.times[[0, -1]], [rep.bound] * 2)},
              "maximum cell load", "time", "points")
    rng = np.random.default_rng([cfg.seed, 0x5E])
    lo, hi = P.horizon
    X = np.concatenate([P.positions(t) for t in np.linspace(lo, hi, 11)])
    worst = rep.max_load
    for j in range(ROBUSTNESS_SETS):
        m = int(rng.integers(1, 6))
        S = rng.uniform(X.min(axis=0), X.max(axis=0), (m, P.dimension))
        rs = verify_balanced(P, N, S, grid=grid, k=k)
        rs.export(r.path(f"load_S{j}.csv"))
        worst = max(worst, rs.max_load)
        r.check(rs.ok, f"voronoi: with static set {j} max load {rs.max_load} > {rs.bound}")
    r.o.summary.update(n=P.n, k=k, facilities=len(N), max_load=worst, bound=rep.bound, events=rep.events)


def _interference(sc, opts, r):
    P = sc.moving_points()
    n = P.n
    grid = int(_param(sc, opts, "grid", DEFAULT_GRID["interference"]))
    k = _param(sc, opts, "k", None)
    try:
        sch = assign_hub_protocol(P, _cfg(sc, opts), k=None if k is None else int(k))
    except SamplingError as exc:
        r.check(False, f"interference: {exc}")
        return
    sch.dump(r.path("schedule.txt"))
    times = np.linspace(*P.horizon, grid)
    rep = interference_series(P, sch, times)
    rep.export(r.path("interference.csv"))
    ch = count_combinatorial_changes(sch)
    ch.export(r.path("changes.csv"))
    line_plot(r.path("interference.svg"), {"interference": (times, rep.values)},
              "interference over time", "time", "I")
    i_bound = 8.0 * math.sqrt(n * math.log(n))
    c_bound = 4.0 * n**1.5 * math.sqrt(math.log(n))
    bad = [s.time for s in rep.samples if not s.connected or s.diameter > 3]
    r.check(not bad, f"interference: {len(bad)} snapshots disconnected or of diameter > 3")
    r.check(rep.max_interference <= i_bound, f"interference: I={rep.max_interference} > {i_bound:.6g}")
    r.check(ch.total <= c_bound, f"interference: {ch.total} changes > {c_bound:.6g}")
    r.check(ch.within_caps, "interference: some point exceeds its envelope change cap")
    r.o.summary.update(n=n, hubs=len(sch.hubs), max_interference=rep.max_interference, bound=i_bound,
                       max_diameter=max(s.diameter for s in rep.samples), changes=ch.total)


def _count(sc, opts, r):
    P, fam = sc.moving_points(), family(sc.family)
    eps = _param(sc, opts, "epsilon", DEFAULT_EPS["count"])
    cfg = _cfg(sc, opts)
    try:
        counter = build_counter(P, fam, eps, cfg)
    except (SamplingError, GuardExceeded) as exc:
        r.check(False, f"count: {exc}")
        return
    counter.approximation.export(r.path("approx.txt"))
    if opts.queries:
        try:
            queries = read_queries(opts.queries, P.dimension)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    else:
        queries = random_queries(P, fam, opts.num_queries, seed=cfg.seed)
    res = run_queries(counter, queries)
    write_results(r.path("results.csv"), res)
    worst = max_relative_error(res)
    bad = sum(q.error > eps + 1e-12 for q in res)
    r.check(counter.approximation.verified is not False, "count: approximation not verified")
    r.check(bad == 0, f"count: {bad} queries with |k'-l| > {eps} n")
    r.o.summary.update(n=P.n, eps=eps, sample=len(counter.approximation), queries=len(res), max_error=worst)


def _disc_once(sc, seed):
    P, fam = sc.moving_points(), family(sc.family)
    cat = enumerate_kinetic_hyperedges(P, fam)
    chi = color_random(P.n, seed)
    d0, w0 = kinetic_discrepancy(P, fam, chi, cat)
    better = improve_coloring(P, fam, chi, catalog=cat)
    d1, w1 = kinetic_discrepancy(P, fam, better, cat)
    return cat, chi, better, (d0, w0), (d1, w1)


def _disc(sc, opts, r):
    seed = int(sc.seed if opts.seed is None else opts.seed)
    try:
        cat, chi, better, (d0, w0), (d1, w1) = _disc_once(sc, seed)
    except GuardExceeded as exc:
        r.check(False, f"disc: {exc}")
        return
    better.export(r.path("coloring.csv"))
    with open(r.path("disc.csv"), "w") as fh:
        fh.write("coloring,discrepancy,witness\n")
        fh.write(f"random,{d0},{' '.join(map(str, w0))}\n")
        fh.write(f"improved,{d1},{' '.join(map(str, w1))}\n")
    ub = union_bound(sc.n, len(cat))
    r.check(d1 <= d0, f"disc: improved {d1} > random {d0}")
    r.check(d0 <= ub, f"disc: random coloring {d0} above {ub:.6g}")
    r.o.summary.update(n=sc.n, edges=len(cat), random=d0, improved=d1)
    if not opts.trend:
        return
    rows = []
    for n in opts.trend:
        vals = []
        for j in range(opts.trials):
            inst = scn.generate_scenario(n, sc.dimension, sc.degree, sc.horizon, seed=seed + j,
                                         generator="uniform", family=sc.family)
            vals.append(_disc_once(inst, seed + j)[4][0])
        rows.append((n, float(np.median(vals))))
    write_trend(r.path("trend.csv"), rows, sc.dimension)
    ns = [a for a, _ in rows]
    line_plot(r.path("trend.svg"), {"median disc": (ns, [b for _, b in rows]),
                                    "sqrt n": (ns, [math.sqrt(a) for a in ns])},
              "discrepancy trend", "n", "disc", log=True)
    if len(rows) >= 2:
        slope = loglog_slope(ns, [max(b, 1.0) for _, b in rows])
        r.o.summary.update(trend_slope=slope)
        r.check(slope <= TREND_SLOPE_MAX, f"disc: trend slope {slope:.4f} > {TREND_SLOPE_MAX}")


def _oracle(sc, opts, r):
    P = sc.moving_points()
    samples = int(_param(sc, opts, "grid", DEFAULT_GRID["oracle"]))
    sizes = {}
    for tag in FAMILIES:
        if tag == "intervals" and P.dimension != 1:
            continue
        try:
            cat = enumerate_kinetic_hyperedges(P, tag, workers=opts.threads)
        except GuardExceeded as exc:
            r.check(False, f"oracle: {tag}: {exc}")
            continue
        cat.export(r.path(f"catalog_{tag}.txt"))
        sizes[tag] = len(cat)
        if tag != "bounded_cones":
            dense = sampled_catalog(P, tag, samples=samples, workers=opts.threads)
            missing = len(dense - cat.edge_set())
            extra = len(cat.edge_set() - dense)
            r.check(missing == 0, f"oracle: {tag}: {missing} sampled edges missing from the catalog")
            if extra:
                # short-lived edges may fall between samples; witnesses decide
                bad = cat.verify_witnesses()
                r.check(not bad, f"oracle: {tag}: {len(bad)} witnesses fail")
    r.o.summary.update(n=P.n, **{f"edges_{k}": v for k, v in sizes.items()})


_RUNNERS = {"net": _net, "approx": _approx, "voronoi": _voronoi, "interference": _interference,
            "count": _count, "disc": _disc, "oracle": _oracle}


def run_experiment(command: str, sc: scn.Scenario, out, opts: Options | None = None) -> Outcome:
    """Run one command on a scenario, writing report files into ``out``."""
    if command not in _RUNNERS:
        raise ValueError(f"unknown command {command!r}")
    opts = opts or Options()
    os.makedirs(out, exist_ok=True)
    r = _Run(command, out)
    _RUNNERS[command](sc, opts, r)
    with open(os.path.join(out, "failures.json"), "w") as fh:
        json.dump({"command": command, "failures": r.o.failures}, fh, indent=1)
        fh.write("\n")
    return r.o


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kinetikos", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        c = sub.add_parser(name)
        c.add_argument("--scenario", required=True)
        c.add_argument("--out", required=True)
        c.add_argument("--seed", type=int)
        c.add_argument("--epsilon", type=float)
        c.add_argument("--k", type=int)
        c.add_argument("--grid", type=int)
        c.add_argument("--constant-c", type=float, default=4.0, dest="C")
        c.add_argument("--threads", type=int)
        mode = c.add_mutually_exclusive_group()
        mode.add_argument("--assert", dest="report_only", action="store_false")
        mode.add_argument("--report-only", dest="report_only", action="store_true")
        c.set_defaults(report_only=False)
        if name == "count":
            c.add_argument("--queries")
            c.add_argument("--num-queries", type=int, default=1000)
        if name == "disc":
            c.add_argument("--trend", default="", help="comma-separated n values, e.g. 16,32,64,128")
            c.add_argument("--trials", type=int, default=5)
    g = sub.add_parser("generate")
    g.add_argument("--out", required=True, help="scenario file to write")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dimension", type=int, default=2)
    g.add_argument("--degree", type=int, default=1)
    g.add_argument("--horizon", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--generator", choices=scn.GENERATORS, default="uniform")
    g.add_argument("--family", choices=FAMILIES)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--k", type=int)
    g.add_argument("--grid", type=int)
    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "generate":
            params = {k: getattr(args, k) for k in ("epsilon", "k", "grid") if getattr(args, k) is not None}
            sc = scn.generate_scenario(args.n, args.dimension, args.degree, args.horizon, args.seed,
                                       args.generator, args.family, params=params)
            sc.save(args.out)
            print(f"generate: n={sc.n} d={sc.dimension} s={sc.degree} perturbed={sc.perturbed} -> {args.out}")
            return EXIT_OK
        sc = scn.load(args.scenario)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    trend = tuple(int(x) for x in getattr(args, "trend", "").split(",") if x.strip())
    opts = Options(args.seed, args.epsilon, args.k, args.grid, args.C, args.threads, args.report_only,
                   getattr(args, "queries", None), getattr(args, "num_queries", 1000), trend,
                   getattr(args, "trials", 5))
    try:
        outcome = run_experiment(args.command, sc, args.out, opts)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(outcome.line())
    for f in outcome.failures:
        print(f"  failure: {f}", file=sys.stderr)
    if outcome.failures and not opts.report_only:
        return EXIT_ASSERT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
