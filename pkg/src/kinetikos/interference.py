"""Hub protocol for moving transmitters and its interference measurements.

Hubs (a bounded-cone ε-net with ε = 1/k, k = round(sqrt(n / ln n))) always
reach their current furthest point; every other point reaches its current
nearest hub. The resulting communication graph is connected with hop
diameter at most 3, and interference is the maximum depth of the disk
arrangement.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .envelope import ds_cap, merge_pieces, sqdist_polys, track
from .sampling import SampleConfig
from .trajectory import MovingPointSet
from .voronoi import FacilitySet, select_facilities


def hub_count_k(n: int) -> int:
    if n < 2:
        raise ValueError("need at least two points")
    return max(2, round(math.sqrt(n / math.log(n))))


@dataclass
class AssignmentSchedule:
    """Partner of every point as event-separated pieces ``(start, end, q)``."""

    hubs: FacilitySet
    pieces: list
    horizon: tuple
    max_degree: int = 1
    _starts: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self._starts = [[s for s, _, _ in pc] for pc in self.pieces]

    @property
    def n(self) -> int:
        return len(self.pieces)

    @property
    def hub_set(self) -> frozenset:
        return frozenset(self.hubs.indices)

    def partner_at(self, i: int, t: float) -> int:
        j = bisect.bisect_right(self._starts[i], t) - 1
        return self.pieces[i][max(j, 0)][2]

    def partners_at(self, t: float) -> np.ndarray:
        return np.array([self.partner_at(i, t) for i in range(self.n)], dtype=np.int64)

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"# hubs: {','.join(map(str, self.hubs.indices))}\n")
            fh.write("# point: start end partner; ...\n")
            for i, pc in enumerate(self.pieces):
                body = "; ".join(f"{s!r} {e!r} {q}" for s, e, q in pc)
                fh.write(f"{i}: {body}\n")


def assign_hub_protocol(P: MovingPointSet, cfg: SampleConfig = SampleConfig(), hubs: FacilitySet | None = None,
                        k: int | None = None, allow_small: bool = False) -> AssignmentSchedule:
    """Hub set plus exact partner schedules from envelope tracking."""
    n = P.n
    if n < 4 and not allow_small:
        raise ValueError("the hub protocol needs n >= 4")
    if hubs is None:
        k = hub_count_k(n) if k is None else k
        hubs = select_facilities(P, min(k, n), cfg)
    hub_idx = np.asarray(hubs.indices, dtype=np.int64)
    is_hub = np.zeros(n, dtype=bool)
    is_hub[hub_idx] = True
    pieces = []
    for i in range(n):
        if is_hub[i]:
            cand = np.array([q for q in range(n) if q != i], dtype=np.int64)
            maximize = True
        else:
            cand = hub_idx
            maximize = False
        if len(cand) == 0:
            pieces.append([(P.horizon[0], P.horizon[1], i)])
            continue
        F = sqdist_polys(P, i, cand)
        pc = merge_pieces(track(F, P.horizon, maximize=maximize))
        pieces.append([(s, e, int(cand[q])) for s, e, q in pc])
    return AssignmentSchedule(hubs, pieces, P.horizon, P.max_degree)


def direct_partners(P: MovingPointSet, schedule: AssignmentSchedule, t: float) -> np.ndarray:
    """Partners by a direct scan at time t (oracle for the envelope schedule)."""
    X = P.positions(t)
    diff = X[:, None, :] - X[None, :, :]
    D2 = (diff**2).sum(axis=2)
    hubs = np.asarray(schedule.hubs.indices)
    out = np.empty(P.n, dtype=np.int64)
    for i in range(P.n):
        if i in schedule.hub_set:
            row = D2[i].copy()
            row[i] = -np.inf
            out[i] = int(np.argmax(row)) if P.n > 1 else i
        else:
            out[i] = int(hubs[np.argmin(D2[i, hubs])])
    return out


# --------------------------------------------------------------------------
# snapshots


def _sqdist_matrix(X):
    diff = X[:, None, :] - X[None, :, :]
    out = diff[..., 0] * diff[..., 0]
    for k in range(1, X.shape[1]):
        out = out + diff[..., k] * diff[..., k]
    return out


@dataclass
class NetworkSnapshot:
    time: float
    positions: np.ndarray
    radii_sq: np.ndarray
    adjacency: np.ndarray

    @property
    def radii(self) -> np.ndarray:
        return np.sqrt(self.radii_sq)

    @property
    def num_edges(self) -> int:
        return int(np.triu(self.adjacency, 1).sum())


def snapshot_from_radii(X, radii_sq, t=0.0) -> NetworkSnapshot:
    X = np.asarray(X, dtype=float)
    R2 = np.asarray(radii_sq, dtype=float)
    D2 = _sqdist_matrix(X)
    adj = D2 <= np.minimum(R2[:, None], R2[None, :])
    np.fill_diagonal(adj, False)
    return NetworkSnapshot(t, X, R2, adj)


def communication_graph(P: MovingPointSet, schedule: AssignmentSchedule, t: float) -> NetworkSnapshot:
    t = P.check_time(t)
    X = P.positions(t)
    D2 = _sqdist_matrix(X)
    partners = schedule.partners_at(t)
    R2 = D2[np.arange(P.n), partners]
    adj = D2 <= np.minimum(R2[:, None], R2[None, :])
    np.fill_diagonal(adj, False)
    return NetworkSnapshot(t, X, R2, adj)


def connectivity_and_diameter(snap: NetworkSnapshot) -> tuple[bool, int]:
    """Connectivity and hop diameter (-1 when disconnected)."""
    A = snap.adjacency
    n = len(A)
    if n <= 1:
        return True, 0
    step = A.astype(np.float32)
    reach = np.eye(n, dtype=bool) | A
    hops = 1
    while not reach.all():
        grown = reach | ((reach.astype(np.float32) @ step) > 0)
        if (grown == reach).all():
            return False, -1
        reach = grown
        hops += 1
    return True, hops


# --------------------------------------------------------------------------
# interference


def _circle_intersections(C, R2):
    """Pairwise intersection points of circles in the plane."""
    n = len(C)
    if n < 2:
        return np.zeros((0, 2))
    i, j = np.triu_indices(n, k=1)
    dv = C[j] - C[i]
    D2 = dv[:, 0] ** 2 + dv[:, 1] ** 2
    ok = D2 > 0
    i, j, dv, D2 = i[ok], j[ok], dv[ok], D2[ok]
    a = (R2[i] - R2[j] + D2) / (2.0 * D2)  # fraction of the centre distance
    h2 = R2[i] / D2 - a * a
    ok = h2 >= 0
    i, dv, a, h2 = i[ok], dv[ok], a[ok], h2[ok]
    h = np.sqrt(h2)
    base = C[i] + a[:, None] * dv
    perp = np.stack([-dv[:, 1], dv[:, 0]], axis=1) * h[:, None]
    return np.concatenate([base + perp, base - perp])


DEPTH_RTOL = 1e-9


def max_depth(centers, radii_sq, seed: int = 0, extra_samples: int = 4096):
    """Maximum number of closed disks covering a point.

    In the plane the maximum is attained at a centre or at an intersection of
    two boundary circles, so checking those candidates is exact. In higher
    dimensions the same candidates plus random samples give a lower bound.
    Returns ``(depth, witness, exact)``.
    """
    C = np.asarray(centers, dtype=float)
    R2 = np.asarray(radii_sq, dtype=float)
    n, d = C.shape
    if n == 0:
        return 0, None, True
    if d == 2:
        cand = np.concatenate([C, _circle_intersections(C, R2)])
        exact = True
    else:
        rng = np.random.default_rng(seed)
        i, j = np.triu_indices(n, k=1)
        mids = 0.5 * (C[i] + C[j])
        pick = rng.integers(0, n, extra_samples)
        U = rng.normal(size=(extra_samples, d))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        samp = C[pick] + U * (np.sqrt(R2[pick]) * rng.random(extra_samples) ** (1.0 / d))[:, None]
        cand = np.concatenate([C, mids, samp])
        exact = False
    depth = kernels.ball_depth(cand, C, R2, DEPTH_RTOL, 0.0)
    best = int(np.argmax(depth))
    return int(depth[best]), cand[best], exact


def grid_depth(centers, radii_sq, per_axis: int = 1000):
    """Maximum depth over a uniform grid spanning the disks (planar oracle)."""
    C = np.asarray(centers, dtype=float)
    R = np.sqrt(np.asarray(radii_sq, dtype=float))
    lo = (C - R[:, None]).min(axis=0)
    hi = (C + R[:, None]).max(axis=0)
    xs = np.linspace(lo[0], hi[0], per_axis)
    ys = np.linspace(lo[1], hi[1], per_axis)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    Q = np.stack([gx.ravel(), gy.ravel()], axis=1)
    depth = kernels.ball_depth(Q, C, np.asarray(radii_sq, dtype=float), 0.0, 0.0)
    return int(depth.max())


@dataclass
class InterferenceSample:
    time: float
    interference: int
    witness: np.ndarray
    exact: bool
    connected: bool
    diameter: int
    num_edges: int
    hub_depth: int = 0
    nonhub_depth: int = 0


def interference_at(P: MovingPointSet, schedule: AssignmentSchedule, t: float):
    """``(I, witness point, exact)`` for the protocol's disks at time t."""
    snap = communication_graph(P, schedule, t)
    return max_depth(snap.positions, snap.radii_sq)


def sample_network(P: MovingPointSet, schedule: AssignmentSchedule, t: float) -> InterferenceSample:
    snap = communication_graph(P, schedule, t)
    depth, wit, exact = max_depth(snap.positions, snap.radii_sq)
    conn, diam = connectivity_and_diameter(snap)
    hubs = np.asarray(schedule.hubs.indices, dtype=np.int64)
    mask = np.ones(P.n, dtype=bool)
    mask[hubs] = False
    non = np.flatnonzero(mask)
    nd = max_depth(snap.positions[non], snap.radii_sq[non])[0] if len(non) else 0
    return InterferenceSample(snap.time, depth, wit, exact, conn, diam, snap.num_edges, len(hubs), nd)


@dataclass
class InterferenceReport:
    samples: list

    @property
    def values(self) -> np.ndarray:
        return np.array([s.interference for s in self.samples], dtype=np.int64)

    @property
    def max_interference(self) -> int:
        return int(self.values.max(initial=0))

    def export(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,interference,connected,diameter,num_edges\n")
            for s in self.samples:
                fh.write(f"{s.time!r},{s.interference},{int(s.connected)},{s.diameter},{s.num_edges}\n")


def interference_series(P: MovingPointSet, schedule: AssignmentSchedule, times) -> InterferenceReport:
    return InterferenceReport([sample_network(P, schedule, float(t)) for t in times])


@dataclass
class ChangeLog:
    total: int
    per_point: np.ndarray
    event_times: np.ndarray
    caps: np.ndarray

    @property
    def within_caps(self) -> bool:
        return bool(np.all(self.per_point <= self.caps))

    def export(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("point_index,change_count\n")
            for i, c in enumerate(self.per_point.tolist()):
                fh.write(f"{i},{c}\n")


def count_combinatorial_changes(schedule: AssignmentSchedule) -> ChangeLog:
    """Partner changes strictly inside the horizon, with envelope caps."""
    n = schedule.n
    lo, hi = schedule.horizon
    hubs = schedule.hub_set
    per = np.zeros(n, dtype=np.int64)
    caps = np.zeros(n, dtype=np.int64)
    times = []
    for i, pc in enumerate(schedule.pieces):
        inner = [e for _, e, _ in pc[:-1] if lo < e < hi]
        per[i] = len(inner)
        times.extend(inner)
        m = n - 1 if i in hubs else len(hubs)
        caps[i] = ds_cap(m, schedule.max_degree)
    return ChangeLog(int(per.sum()), per, np.sort(np.asarray(times, dtype=float)), caps)
