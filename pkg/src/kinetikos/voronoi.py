"""Balanced Voronoi facilities from bounded-cone ε-nets.

Sites are the facilities ``N`` (moving with their points) followed by any
extra static sites ``S``. Each point belongs to its nearest site, ties going
to the smaller site index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .envelope import merge_pieces, sqdist_polys, sqdist_to_static, track
from .ranges import RangeFamily
from .sampling import SampleConfig, build_eps_net, static_vc
from .trajectory import MovingPointSet

SIXTY = math.pi / 3
CONE_FAMILY = RangeFamily("bounded_cones", SIXTY)

# 20 axes whose 30-degree caps cover the sphere. Found by minimising the
# largest circumradius of the hull triangles; exact covering angle 29.919 deg.
_COVER_3D = (
    (0.4032493531270321, -0.4815283037500758, 0.7781519465311418),
    (-0.3829041358420542, -0.02389611631598337, 0.9234789647740023),
    (-0.7032501789442018, -0.6934325022556381, -0.1568137450303152),
    (0.3586573636698697, 0.34274802171682117, 0.8682676367886715),
    (0.9385535361369611, 0.11034370911638605, 0.32701915182943736),
    (-0.30769671587261566, -0.2876720607407856, -0.9069550796540901),
    (0.4632943033068265, -0.8815352776534596, 0.09085121229725124),
    (-0.5718851235810788, 0.5790858469494421, -0.5810395746328314),
    (0.9440338035305237, -0.329008966250883, -0.02352186043275576),
    (-0.2690063314879703, -0.7986820128554043, 0.5382774711620618),
    (0.7490860495680105, 0.40555978500491924, -0.5238237786979089),
    (0.5366820376221323, 0.8341839831089793, 0.1269230980483626),
    (-0.8986266591923427, -0.13165235434710146, 0.4184946654184188),
    (-0.042040643925277885, 0.94019971048331, -0.33801936137660565),
    (-0.222941180541267, 0.7930981590879065, 0.566826728436689),
    (-0.7114894424945823, 0.642123742200104, 0.28541176030724935),
    (0.11452446100720531, 0.3895791575092538, -0.9138447504173722),
    (0.5450894282373203, -0.39136262477748274, -0.7414262007450171),
    (-0.9257595763677642, -0.0005709838275725315, -0.3781122594426773),
    (-0.03591381712223519, -0.9187764691676467, -0.39314119275845794),
)


@dataclass(frozen=True)
class FacilitySet:
    indices: tuple
    k: int
    seed: int
    C: float
    vc: int
    verified: bool | None
    attempts: int = 1

    @property
    def epsilon(self) -> float:
        return 1.0 / self.k

    @property
    def size_bound(self) -> int:
        return math.ceil(self.C * self.vc * self.k * math.log(self.k) - 1e-9)

    def __len__(self):
        return len(self.indices)


def select_facilities(P: MovingPointSet, k: int, cfg: SampleConfig = SampleConfig(), catalog=None) -> FacilitySet:
    """ε-net for 60-degree bounded cones with ε = 1/k."""
    if not 2 <= k <= P.n:
        raise ValueError(f"k must satisfy 2 <= k <= n (got k={k}, n={P.n})")
    net = build_eps_net(P, CONE_FAMILY, 1.0 / k, cfg, catalog=catalog)
    return FacilitySet(net.indices, k, int(cfg.seed), cfg.C, net.vc, net.verified, net.attempts)


def _indices(N):
    return np.asarray(N.indices if hasattr(N, "indices") else N, dtype=np.int64)


def _static_sites(S, d):
    if S is None:
        return np.zeros((0, d))
    S = np.asarray(S, dtype=float)
    return S.reshape(-1, d)


def site_positions(P: MovingPointSet, N, S, t) -> np.ndarray:
    idx = _indices(N)
    return np.concatenate([P.positions(t)[idx], _static_sites(S, P.dimension)])


@dataclass
class CellLoadReport:
    time: float
    loads: np.ndarray  # per site: facilities first, then static sites
    assignment: np.ndarray

    @property
    def max_load(self) -> int:
        return int(self.loads.max(initial=0))

    @property
    def argmax_site(self) -> int:
        return int(np.argmax(self.loads)) if len(self.loads) else -1


def cell_loads(P: MovingPointSet, N, S=None, t: float = 0.0) -> CellLoadReport:
    t = P.check_time(t)
    sites = site_positions(P, N, S, t)
    if len(sites) == 0:
        raise ValueError("no sites")
    owner = kernels.nearest_sites(P.positions(t), sites)
    loads = np.bincount(owner, minlength=len(sites))
    return CellLoadReport(t, loads, owner)


def nearest_site_events(P: MovingPointSet, N, S=None) -> np.ndarray:
    """Times inside the horizon at which some point changes its nearest site."""
    idx = _indices(N)
    Sx = _static_sites(S, P.dimension)
    if P.is_static():
        return np.zeros(0)
    out = []
    for i in range(P.n):
        parts = [sqdist_polys(P, i, idx)]
        if len(Sx):
            parts.append(sqdist_to_static(P, i, Sx))
        F = np.concatenate(parts)
        pieces = merge_pieces(track(F, P.horizon, maximize=False))
        out.extend(e for _, e, _ in pieces[:-1])
    return np.unique(np.asarray(out, dtype=float))


@dataclass
class BalanceReport:
    times: np.ndarray
    max_loads: np.ndarray
    argmax_sites: np.ndarray
    bound: int | None
    events: int = 0

    @property
    def max_load(self) -> int:
        return int(self.max_loads.max(initial=0))

    @property
    def time_of_max(self) -> float:
        return float(self.times[int(np.argmax(self.max_loads))])

    @property
    def violations(self) -> np.ndarray:
        if self.bound is None:
            return np.zeros(0)
        return self.times[self.max_loads > self.bound]

    @property
    def ok(self) -> bool:
        return len(self.violations) == 0

    def export(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("time,max_load,argmax_site\n")
            for t, m, a in zip(self.times.tolist(), self.max_loads.tolist(), self.argmax_sites.tolist()):
                fh.write(f"{t!r},{m},{a}\n")


def load_bound(n: int, k: int, d: int) -> int:
    return sixty_degree_cover(d).count * math.ceil(n / k)


def verify_balanced(P: MovingPointSet, N, S=None, grid: int = 1000, k: int | None = None,
                    assert_bound: bool = False) -> BalanceReport:
    """Maximum cell load over all times at which the loads can change.

    Checked times: every nearest-site change time, the midpoints between
    consecutive ones, both horizon ends and a uniform grid of ``grid`` times.
    With ``k`` given the bound ``C_d * ceil(n / k)`` is recorded, and
    ``assert_bound`` raises ``AssertionError`` when it is exceeded.
    """
    lo, hi = P.horizon
    ev = nearest_site_events(P, N, S)
    pts = np.unique(np.concatenate([[lo, hi], ev]))
    mids = 0.5 * (pts[:-1] + pts[1:])
    times = np.unique(np.concatenate([pts, mids, np.linspace(lo, hi, grid)]))
    if P.is_static():
        times = times[:1]
    maxes = np.empty(len(times), dtype=np.int64)
    arg = np.empty(len(times), dtype=np.int64)
    for j, t in enumerate(times.tolist()):
        rep = cell_loads(P, N, S, t)
        maxes[j] = rep.max_load
        arg[j] = rep.argmax_site
    if k is None and hasattr(N, "k"):
        k = N.k
    bound = load_bound(P.n, k, P.dimension) if k else None
    report = BalanceReport(times, maxes, arg, bound, len(ev))
    if assert_bound and not report.ok:
        raise AssertionError(f"cell load {report.max_load} exceeds {bound} at t={report.time_of_max!r}")
    return report


# --------------------------------------------------------------------------
# sixty-degree cone covers


@dataclass(frozen=True)
class ConeCover:
    axes: np.ndarray

    @property
    def count(self) -> int:
        return len(self.axes)

    @property
    def dimension(self) -> int:
        return self.axes.shape[1]

    def max_gap_degrees(self, samples: int = 100_000, seed: int = 0) -> float:
        """Largest sampled angle from a unit vector to its nearest axis."""
        d = self.dimension
        if d == 1:
            return 0.0
        rng = np.random.default_rng(seed)
        U = rng.normal(size=(samples, d))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        cos = np.clip((U @ self.axes.T).max(axis=1), -1.0, 1.0)
        return float(np.degrees(np.arccos(cos.min())))


def sixty_degree_cover(d: int) -> ConeCover:
    if d == 1:
        return ConeCover(np.array([[1.0], [-1.0]]))
    if d == 2:
        a = np.arange(6) * SIXTY
        return ConeCover(np.stack([np.cos(a), np.sin(a)], axis=1))
    if d == 3:
        A = np.array(_COVER_3D, dtype=float)
        return ConeCover(A / np.linalg.norm(A, axis=1, keepdims=True))
    raise ValueError(f"no sixty-degree cover for d={d} (supported: 1, 2, 3)")
