"""Kinetic ε-nets and ε-approximations by seeded sampling with verification.

Each attempt draws a uniform sample without replacement from
``np.random.default_rng([seed, attempt])`` and is checked against the
exhaustive kinetic catalog when that catalog is within its guard.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import bits
from .hypergraph import (
    HyperedgeCatalog,
    default_workers,
    enumerate_kinetic_hyperedges,
    vc_dimension_estimate,
)
from .ranges import GuardExceeded, RangeFamily, family
from .trajectory import MovingPointSet

# Static VC-dimensions used when no hint is given. Planar 60-degree bounded
# cones: largest shattered set found by exhaustive search on random static
# 9- and 11-point instances. Spatial cones: heuristic lower bound.
_CONE_VC = {1: 2, 2: 6, 3: 5}
ESTIMATE_POINTS = 12
ESTIMATE_POINTS_CONES = 6


class SamplingError(RuntimeError):
    """No attempt passed verification; carries the worst report seen."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class SampleConfig:
    seed: int = 0
    C: float = 4.0
    vc_hint: Union[int, str] = "auto"
    max_attempts: int = 20
    workers: int | None = None

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("size constant C must be positive")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")
        if not (isinstance(self.vc_hint, int) and self.vc_hint >= 1) and self.vc_hint not in ("auto", "estimate"):
            raise ValueError("vc_hint must be a positive integer, 'auto' or 'estimate'")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def static_vc(fam: RangeFamily, d: int) -> int:
    fam = family(fam)
    if fam.tag == "intervals":
        return 2
    if fam.tag in ("halfspaces", "balls"):
        return d + 1
    return _CONE_VC.get(d, 2 * d)


def resolve_vc(P: MovingPointSet, fam, cfg: SampleConfig) -> int:
    fam = family(fam)
    if isinstance(cfg.vc_hint, int):
        return cfg.vc_hint
    if cfg.vc_hint == "auto":
        return static_vc(fam, P.dimension)
    size = ESTIMATE_POINTS_CONES if fam.tag == "bounded_cones" else ESTIMATE_POINTS
    size = min(P.n, size)
    rng = np.random.default_rng([int(cfg.seed), 0xFC])
    sub = np.sort(rng.choice(P.n, size, replace=False))
    return max(1, vc_dimension_estimate(P.subset(sub), fam))


def net_size(n: int, eps: float, vc: int, C: float) -> int:
    return min(n, math.ceil(C * (vc / eps) * math.log(1.0 / eps) - 1e-9))


def approximation_size(n: int, eps: float, vc: int, C: float) -> int:
    return min(n, math.ceil(C * vc / eps**2 - 1e-9))


def _check_eps(eps):
    if not 0.0 < eps < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")


def _draw(n, m, seed, attempt):
    rng = np.random.default_rng([int(seed), int(attempt)])
    return tuple(sorted(rng.choice(n, m, replace=False).tolist()))


def _catalog_or_none(P, fam, catalog, workers):
    if catalog is not None:
        return catalog
    try:
        return enumerate_kinetic_hyperedges(P, fam, workers=workers)
    except GuardExceeded:
        return None


# --------------------------------------------------------------------------
# ε-nets


@dataclass
class NetReport:
    """Edges of size at least ``threshold`` that miss the net."""

    threshold: int
    uncovered: list = field(default_factory=list)  # (edge, witness time, witness range)
    checked_edges: int = 0

    @property
    def ok(self) -> bool:
        return not self.uncovered

    def __len__(self):
        return len(self.uncovered)


@dataclass(frozen=True)
class EpsNet:
    indices: tuple
    epsilon: float
    family: RangeFamily
    seed: int
    attempts: int
    verified: bool | None  # None: too large to verify
    C: float = 4.0
    vc: int = 0

    def __post_init__(self):
        if not self.indices:
            raise ValueError("a net is nonempty")

    def __len__(self):
        return len(self.indices)

    def export(self, path) -> None:
        _export(path, "eps-net", self)


def heavy_threshold(n: int, eps: float) -> int:
    return max(1, math.ceil(eps * n - 1e-9))


def verify_eps_net(net, P: MovingPointSet, fam, catalog: HyperedgeCatalog | None = None,
                   eps: float | None = None, witnesses: bool = True) -> NetReport:
    """Every cataloged edge of size ``>= ceil(eps n)`` must meet the net."""
    fam = family(fam)
    eps = net.epsilon if eps is None else eps
    idx = net.indices if hasattr(net, "indices") else tuple(net)
    threshold = heavy_threshold(P.n, eps)
    if catalog is None:
        catalog = enumerate_kinetic_hyperedges(P, fam)
    report = NetReport(threshold, checked_edges=len(catalog))
    if len(catalog) == 0:
        return report
    sel = bits.from_indices(idx, P.n)
    heavy = catalog.sizes() >= threshold
    miss = ~np.any(catalog.masks & sel != 0, axis=1)
    for i in np.flatnonzero(heavy & miss).tolist():
        edge = bits.to_indices(catalog.masks[i])
        if witnesses:
            t, r = catalog.witness(i)
            report.uncovered.append((edge, t, r))
        else:
            report.uncovered.append((edge, float(catalog.witness_times[i]), None))
    return report


def _attempt_order(cfg, verify):
    """Run ``verify(attempt)`` for attempts 0.. until one passes.

    With several workers attempts are evaluated in parallel rounds; the
    smallest passing attempt index wins, as in sequential execution.
    """
    workers = default_workers(cfg.workers)
    worst = None
    results = {}
    attempt = 0
    with ThreadPoolExecutor(workers) if workers > 1 else _Inline() as ex:
        while attempt < cfg.max_attempts:
            batch = list(range(attempt, min(cfg.max_attempts, attempt + workers)))
            for a, res in zip(batch, ex.map(verify, batch)):
                results[a] = res
            for a in batch:
                sample, report, score = results[a]
                if report.ok:
                    return a, sample, report
                if worst is None or score > worst[2]:
                    worst = (a, report, score)
            attempt = batch[-1] + 1
    raise SamplingError(f"no sample passed verification in {cfg.max_attempts} attempts", worst[1])


class _Inline:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def map(self, fn, items):
        return map(fn, items)


def build_eps_net(P: MovingPointSet, fam, eps: float, cfg: SampleConfig = SampleConfig(),
                  catalog: HyperedgeCatalog | None = None) -> EpsNet:
    """Uniform sample of size ``min(n, ceil(C (vc/eps) ln(1/eps)))``, verified."""
    fam = family(fam)
    _check_eps(eps)
    vc = resolve_vc(P, fam, cfg)
    m = net_size(P.n, eps, vc, cfg.C)
    meta = dict(epsilon=eps, family=fam, seed=int(cfg.seed), C=cfg.C, vc=vc)
    if m >= P.n:
        return EpsNet(tuple(range(P.n)), attempts=1, verified=True, **meta)
    catalog = _catalog_or_none(P, fam, catalog, cfg.workers)
    if catalog is None:
        return EpsNet(_draw(P.n, m, cfg.seed, 0), attempts=1, verified=None, **meta)

    def verify(a):
        sample = _draw(P.n, m, cfg.seed, a)
        rep = verify_eps_net(sample, P, fam, catalog, eps=eps, witnesses=False)
        return sample, rep, len(rep)

    a, sample, _ = _attempt_order(cfg, verify)
    return EpsNet(sample, attempts=a + 1, verified=True, **meta)


# --------------------------------------------------------------------------
# ε-approximations


@dataclass
class ApproximationReport:
    max_deviation: float
    epsilon: float
    violations: list = field(default_factory=list)  # (edge, deviation, witness time)
    checked_edges: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class EpsApproximation:
    indices: tuple
    epsilon: float
    family: RangeFamily
    seed: int
    attempts: int
    verified: bool | None
    C: float = 4.0
    vc: int = 0

    def __post_init__(self):
        if not self.indices:
            raise ValueError("an approximation is nonempty")

    def __len__(self):
        return len(self.indices)

    def export(self, path) -> None:
        _export(path, "eps-approximation", self)


def approximation_deviations(sample, catalog: HyperedgeCatalog) -> np.ndarray:
    """``| |e ∩ A| / |A| - |e| / n |`` for every cataloged edge."""
    sel = bits.from_indices(sample, catalog.n)
    inside = bits.popcount(catalog.masks & sel)
    return np.abs(inside / len(sample) - catalog.sizes() / catalog.n)


def verify_eps_approximation(approx, P: MovingPointSet, fam, catalog: HyperedgeCatalog | None = None,
                             eps: float | None = None) -> ApproximationReport:
    fam = family(fam)
    eps = approx.epsilon if eps is None else eps
    idx = approx.indices if hasattr(approx, "indices") else tuple(approx)
    if catalog is None:
        catalog = enumerate_kinetic_hyperedges(P, fam)
    dev = approximation_deviations(idx, catalog) if len(catalog) else np.zeros(0)
    rep = ApproximationReport(float(dev.max(initial=0.0)), eps, checked_edges=len(catalog))
    for i in np.flatnonzero(dev > eps + 1e-12).tolist():
        rep.violations.append((bits.to_indices(catalog.masks[i]), float(dev[i]), float(catalog.witness_times[i])))
    return rep


def build_eps_approximation(P: MovingPointSet, fam, eps: float, cfg: SampleConfig = SampleConfig(),
                            catalog: HyperedgeCatalog | None = None) -> EpsApproximation:
    """Uniform sample of size ``min(n, ceil(C vc / eps^2))``, verified."""
    fam = family(fam)
    _check_eps(eps)
    vc = resolve_vc(P, fam, cfg)
    m = approximation_size(P.n, eps, vc, cfg.C)
    meta = dict(epsilon=eps, family=fam, seed=int(cfg.seed), C=cfg.C, vc=vc)
    if m >= P.n:
        return EpsApproximation(tuple(range(P.n)), attempts=1, verified=True, **meta)
    catalog = _catalog_or_none(P, fam, catalog, cfg.workers)
    if catalog is None:
        return EpsApproximation(_draw(P.n, m, cfg.seed, 0), attempts=1, verified=None, **meta)

    def verify(a):
        sample = _draw(P.n, m, cfg.seed, a)
        rep = verify_eps_approximation(sample, P, fam, catalog, eps=eps)
        return sample, rep, rep.max_deviation

    a, sample, _ = _attempt_order(cfg, verify)
    return EpsApproximation(sample, attempts=a + 1, verified=True, **meta)


def _export(path, kind, obj) -> None:
    with open(path, "w") as fh:
        fh.write(f"# kind: {kind}\n")
        fh.write(f"# epsilon: {obj.epsilon!r}\n# C: {obj.C!r}\n# seed: {obj.seed}\n")
        fh.write(f"# family: {obj.family}\n# vc: {obj.vc}\n")
        fh.write(f"# attempts: {obj.attempts}\n# verified: {obj.verified}\n")
        fh.write(f"# size: {len(obj.indices)}\n")
        for i in obj.indices:
            fh.write(f"{i}\n")
