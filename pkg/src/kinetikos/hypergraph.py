"""Kinetic hypergraphs: event timelines, hyperedge catalogs, shatter counts.

A catalog is the union over all times of the traces ``r ∩ P(t)``. Traces
only change when some tuple of points becomes degenerate for the family
(coincident, affinely dependent, cospherical), so it suffices to take the
static traces at one time inside every open interval between such events,
plus the horizon endpoints.
"""
from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bits, kernels
from .ranges import DESCR_WIDTH, GuardExceeded, RangeFamily, estimated_traces, family, trace_table, witness_range
from .trajectory import ROOT_TOL, MovingPointSet, affine_rows, cauchy_bound, det_poly_batch, lifted_rows

log = logging.getLogger(__name__)

# rows x times of static trace work allowed for one exhaustive enumeration
WORK_GUARD = 300_000_000
# cone tables are costlier per row; this admits n <= 6 kinetic planar instances
CONE_WORK_GUARD = 2_000_000_000
SUBSET_GUARD = 100_000
# degeneracy tuples examined by one event search
EVENT_GUARD = 5_000_000
CONE_GRID_PER_POINT = 64
_BATCH_WORDS = 4_000_000


def default_workers(workers=None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("KINETIKOS_THREADS")
    return max(1, int(env)) if env and env.isdigit() else 1


# --------------------------------------------------------------------------
# events


@dataclass(frozen=True)
class EventTimeline:
    """Sorted degeneracy times inside the horizon and sample times between them."""

    events: np.ndarray
    horizon: tuple
    extra_breaks: np.ndarray = field(default_factory=lambda: np.zeros(0))
    degenerate: tuple = ()
    beyond_horizon: float | None = None

    def __post_init__(self):
        ev = np.asarray(self.events, dtype=float)
        if len(ev) > 1 and np.any(np.diff(ev) <= 0):
            raise ValueError("event times must be strictly increasing")
        object.__setattr__(self, "events", ev)

    def __len__(self):
        return len(self.events)

    def breakpoints(self) -> np.ndarray:
        lo, hi = self.horizon
        pts = np.concatenate([[lo, hi], self.events, self.extra_breaks])
        return np.unique(pts[(pts >= lo) & (pts <= hi)])

    def representatives(self, refine: int = 1) -> np.ndarray:
        """Interior sample times: ``refine`` evenly spaced per open interval."""
        b = self.breakpoints()
        if len(b) < 2:
            return b.copy()
        fr = np.arange(1, refine + 1) / (refine + 1)
        reps = b[:-1, None] + (b[1:] - b[:-1])[:, None] * fr[None, :]
        return reps.ravel()

    def sample_times(self, refine: int = 1) -> np.ndarray:
        """Representatives plus both horizon endpoints, increasing."""
        lo, hi = self.horizon
        return np.unique(np.concatenate([[lo, hi], self.representatives(refine)]))


def _combos(n, k):
    if n < k:
        return np.zeros((0, k), dtype=np.int64)
    return np.array(list(itertools.combinations(range(n), k)), dtype=np.int64).reshape(-1, k)


def event_polynomials(P: MovingPointSet, fam) -> tuple[np.ndarray, np.ndarray]:
    """Degeneracy polynomials for the family and the tuples they belong to.

    Returns ``(coeffs, tuples)`` where tuples is a list of index tuples (as an
    object array, since tuple sizes differ between polynomial kinds).
    """
    fam = family(fam)
    n, d = P.n, P.dimension
    C = P.coeffs
    polys, owners = [], []

    def add(rows, tuples):
        if len(tuples):
            polys.append(det_poly_batch(rows))
            owners.extend(map(tuple, tuples.tolist()))

    if fam.tag == "intervals" or d == 1:
        tup = _combos(n, 2)
        add(affine_rows(C, tup), tup)
    elif fam.tag == "halfspaces":
        tup = _combos(n, d + 1)
        add(affine_rows(C, tup), tup)
    else:
        tup = _combos(n, d + 1)
        add(affine_rows(C, tup), tup)
        tup = _combos(n, d + 2)
        add(lifted_rows(C, tup), tup)
    if not polys:
        return np.zeros((0, 1)), np.array([], dtype=object)
    width = max(p.shape[1] for p in polys)
    coeffs = np.concatenate([np.pad(p, ((0, 0), (0, width - p.shape[1]))) for p in polys])
    owner_arr = np.empty(len(owners), dtype=object)
    owner_arr[:] = owners
    return coeffs, owner_arr


def event_tuple_count(n: int, d: int, fam) -> int:
    fam = family(fam)
    if fam.tag == "intervals" or d == 1:
        return math.comb(n, 2)
    if fam.tag == "halfspaces":
        return math.comb(n, d + 1)
    return math.comb(n, d + 1) + math.comb(n, d + 2)


def _negligible_rows(coeffs, P):
    scale = max(1.0, float(np.abs(P.coeffs).max()))
    deg = max(1, coeffs.shape[1])
    return np.all(np.abs(coeffs) <= 1e-12 * scale ** min(deg, 8), axis=1)


def event_times(P: MovingPointSet, fam, tol: float = ROOT_TOL, check_horizon: bool = True) -> EventTimeline:
    """All degeneracy times of the family's tuples inside ``[0, T]``.

    Identically vanishing polynomials are reported in ``degenerate`` and
    contribute no events. Bounded cones additionally get a uniform grid of
    ``64 n`` breakpoints, since their events are over-approximated.
    """
    fam = family(fam)
    lo, hi = P.horizon
    coeffs, owners = event_polynomials(P, fam)
    zero = _negligible_rows(coeffs, P) if len(coeffs) else np.zeros(0, dtype=bool)
    live = coeffs[~zero]
    roots, _ = kernels.real_roots_batch(live, lo, hi, tol) if len(live) else (np.zeros(0), None)
    roots = _merge_close(np.sort(roots), tol)
    beyond = None
    if check_horizon and len(live):
        bound = float(np.max(cauchy_bound(live), initial=0.0))
        if bound > hi:
            late, _ = kernels.real_roots_batch(live, hi, bound, tol)
            late = late[late > hi + tol]
            if len(late):
                beyond = float(late.max())
                log.warning("degeneracy events continue after the horizon T=%g (last at t=%.6g)", hi, beyond)
    extra = np.zeros(0)
    if fam.tag == "bounded_cones":
        extra = np.linspace(lo, hi, CONE_GRID_PER_POINT * P.n + 1)
    return EventTimeline(roots, (lo, hi), extra, tuple(owners[zero].tolist()), beyond)


def _merge_close(sorted_roots, tol):
    if len(sorted_roots) == 0:
        return sorted_roots
    keep = np.concatenate([[True], np.diff(sorted_roots) > 2.0 * tol])
    return sorted_roots[keep]


# --------------------------------------------------------------------------
# catalogs


@dataclass
class HyperedgeCatalog:
    """Distinct nonempty traces over the horizon, each with a witness."""

    points: MovingPointSet
    family: RangeFamily
    masks: np.ndarray
    witness_times: np.ndarray
    witness_descr: np.ndarray
    sample_count: int = 0

    @property
    def n(self) -> int:
        return self.points.n

    def __len__(self):
        return len(self.masks)

    def edges(self) -> list:
        return [bits.to_indices(r) for r in self.masks]

    def edge_set(self) -> set:
        return set(self.edges())

    def __contains__(self, edge):
        key = bits.from_indices(sorted(edge), self.n)
        return bool(np.any(np.all(self.masks == key, axis=1)))

    def sizes(self) -> np.ndarray:
        return bits.popcount(self.masks)

    def witness(self, i: int):
        """``(time, range)`` realizing edge ``i``."""
        t = float(self.witness_times[i])
        X = self.points.positions(t)
        return t, witness_range(X, self.family, self.witness_descr[i])

    def verify_witnesses(self, indices=None) -> list:
        """Indices of edges whose witness does not reproduce them."""
        bad = []
        idx = range(len(self)) if indices is None else indices
        for i in idx:
            t, r = self.witness(i)
            got = tuple(np.flatnonzero(r.contains_many(self.points.positions(t))).tolist())
            if got != bits.to_indices(self.masks[i]):
                bad.append(i)
        return bad

    def restricted_count(self, subset) -> int:
        """Number of distinct nonempty traces on ``subset``."""
        return len(_distinct_codes(self.masks, np.asarray(subset, dtype=np.int64)))

    def export(self, path, witnesses: bool = True) -> None:
        lo, hi = self.points.horizon
        with open(path, "w") as fh:
            fh.write(f"# family: {self.family}\n")
            fh.write(f"# n: {self.n}\n# dimension: {self.points.dimension}\n")
            fh.write(f"# horizon: {lo!r} {hi!r}\n# edges: {len(self)}\n")
            fh.write("# line: indices | witness time | witness range\n")
            for i, row in enumerate(self.masks):
                line = ",".join(map(str, bits.to_indices(row)))
                if witnesses:
                    t, r = self.witness(i)
                    line += f" | {t!r} | {r!r}"
                fh.write(line + "\n")


def _check_guard(n, d, fam, count, guard):
    work = estimated_traces(n, d, fam) * count
    if fam.tag == "bounded_cones" and d >= 2 and guard == WORK_GUARD:
        guard = CONE_WORK_GUARD
    if work > guard:
        raise GuardExceeded(
            f"exhaustive enumeration needs about {work:.3g} trace rows (guard {guard:.3g}); "
            f"n={n} is too large for the {fam} oracle"
        )


def _table_batches(P, fam, times, workers):
    """Yield ``(start, masks, descr)`` for consecutive batches of times."""
    n = P.n
    rows = max(1, estimated_traces(n, P.dimension, fam)) * bits.n_words(n)
    step = max(1, _BATCH_WORDS // rows)
    starts = list(range(0, len(times), step))

    def run(s):
        return s, trace_table(P.positions_at(times[s:s + step]), fam)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(workers) as ex:
            for s, (m, dsc) in ex.map(run, starts):
                yield s, m, dsc
    else:
        for s in starts:
            _, (m, dsc) = run(s)
            yield s, m, dsc


def collect_traces(P: MovingPointSet, fam, times, workers=None):
    """Distinct nonempty traces over the given times, with first witnesses.

    Returns ``(masks, time_index, descr)`` sorted by mask.
    """
    fam = family(fam)
    times = np.asarray(times, dtype=float)
    workers = default_workers(workers)
    chunks_m, chunks_t, chunks_d = [], [], []
    prev = None
    for s, masks, descr in _table_batches(P, fam, times, workers):
        if isinstance(masks, list):  # per-time descriptors
            for b, (m, dsc) in enumerate(zip(masks, descr)):
                chunks_m.append(m)
                chunks_t.append(np.full(len(m), s + b, dtype=np.int64))
                chunks_d.append(dsc)
            continue
        # keep only rows that changed since the previous time
        stack = masks if prev is None else np.concatenate([prev[None], masks])
        changed = np.any(stack[1:] != stack[:-1], axis=2)
        if prev is None:
            changed = np.concatenate([np.ones((1, masks.shape[1]), dtype=bool), changed])
        prev = masks[-1]
        b_idx, m_idx = np.nonzero(changed)
        chunks_m.append(masks[b_idx, m_idx])
        chunks_t.append(s + b_idx)
        chunks_d.append(descr[m_idx])
    W = bits.n_words(P.n)
    if not chunks_m:
        return np.zeros((0, W), dtype=np.uint64), np.zeros(0, dtype=np.int64), np.zeros((0, DESCR_WIDTH), dtype=np.int64)
    M = np.concatenate(chunks_m)
    Ti = np.concatenate(chunks_t)
    Dd = np.concatenate(chunks_d)
    keep = bits.nonzero_rows(M)
    M, Ti, Dd = M[keep], Ti[keep], Dd[keep]
    # earliest witness first so that unique() keeps it
    order = np.argsort(Ti, kind="stable")
    M, Ti, Dd = M[order], Ti[order], Dd[order]
    uniq, first = bits.unique_rows(M)
    return uniq, Ti[first], Dd[first]


def enumerate_kinetic_hyperedges(
    P: MovingPointSet,
    fam,
    timeline: EventTimeline | None = None,
    refine: int = 1,
    workers=None,
    guard: int = WORK_GUARD,
) -> HyperedgeCatalog:
    """Exhaustive kinetic catalog from static traces at all sample times."""
    fam = family(fam)
    _check_guard(P.n, P.dimension, fam, 1, guard)  # before the event search
    if timeline is None and P.is_static():
        timeline = EventTimeline(np.zeros(0), P.horizon)  # one snapshot suffices
    if timeline is None:
        tuples = event_tuple_count(P.n, P.dimension, fam)
        if tuples > EVENT_GUARD:
            raise GuardExceeded(f"event search over {tuples} tuples exceeds guard {EVENT_GUARD}")
        timeline = event_times(P, fam)
    times = timeline.sample_times(refine)
    if P.is_static():
        times = times[:1]
    _check_guard(P.n, P.dimension, fam, len(times), guard)
    masks, ti, descr = collect_traces(P, fam, times, workers)
    return HyperedgeCatalog(P, fam, masks, times[ti], descr, len(times))


def sampled_catalog(P: MovingPointSet, fam, samples: int = 10_000, workers=None) -> set:
    """Traces seen at ``samples`` uniformly spaced times (dense-time oracle)."""
    fam = family(fam)
    lo, hi = P.horizon
    times = np.linspace(lo, hi, samples)
    masks, _, _ = collect_traces(P, fam, times, workers)
    return {bits.to_indices(r) for r in masks}


# --------------------------------------------------------------------------
# shatter function and VC-dimension


def _codes(masks, subset):
    """Trace of every edge on ``subset`` as an integer code (``len(subset) <= 63``)."""
    code = np.zeros(len(masks), dtype=np.uint64)
    for pos, i in enumerate(subset.tolist()):
        bit = (masks[:, i // 64] >> np.uint64(i % 64)) & np.uint64(1)
        code |= bit << np.uint64(pos)
    return code


def _distinct_codes(masks, subset):
    if len(subset) <= 63:
        c = np.unique(_codes(masks, subset))
        return c[c != 0]
    sub = bits.from_indices(subset, masks.shape[1] * 64)[: masks.shape[1]]
    r = masks & sub
    r = r[bits.nonzero_rows(r)]
    return bits.unique_rows(r)[0]


def _catalog_for(P, fam, catalog):
    if catalog is not None:
        return catalog
    return enumerate_kinetic_hyperedges(P, fam)


def shatter_function(P: MovingPointSet, fam, m: int, catalog: HyperedgeCatalog | None = None,
                     guard: int = SUBSET_GUARD) -> int:
    """Largest number of distinct nonempty traces on any ``m`` points."""
    n = P.n
    if not 0 <= m <= n:
        raise ValueError(f"m must lie in [0, {n}]")
    if math.comb(n, m) > guard:
        raise GuardExceeded(f"C({n},{m}) subsets exceed guard {guard}")
    cat = _catalog_for(P, fam, catalog)
    best = 0
    for sub in itertools.combinations(range(n), m):
        best = max(best, cat.restricted_count(sub))
    return best


def shattered(catalog: HyperedgeCatalog, subset) -> bool:
    subset = np.asarray(subset, dtype=np.int64)
    return len(_distinct_codes(catalog.masks, subset)) == 2 ** len(subset) - 1


def vc_dimension_estimate(P: MovingPointSet, fam, catalog: HyperedgeCatalog | None = None,
                          guard: int = SUBSET_GUARD) -> int:
    """Size of the largest shattered subset (exhaustive, level by level).

    Shattering is hereditary, so the search stops at the first size with no
    shattered subset. The empty trace is implicit: it is realizable by any
    family through a range far from the points.
    """
    cat = _catalog_for(P, fam, catalog)
    n = P.n
    best = 0
    for k in range(1, n + 1):
        if math.comb(n, k) > guard:
            raise GuardExceeded(f"C({n},{k}) subsets exceed guard {guard}")
        if len(cat) < 2**k - 1:
            break
        if any(shattered(cat, sub) for sub in itertools.combinations(range(n), k)):
            best = k
        else:
            break
    return best
