"""Approximate kinetic range counting by scanning a fixed ε-approximation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ranges import Ball, BoundedCone, Halfspace, IntervalRange, family
from .sampling import EpsApproximation, SampleConfig, build_eps_approximation
from .trajectory import MovingPointSet


@dataclass(frozen=True)
class ApproxCounter:
    points: MovingPointSet
    approximation: EpsApproximation

    @property
    def n(self) -> int:
        return self.points.n

    @property
    def sample(self) -> np.ndarray:
        return np.asarray(self.approximation.indices, dtype=np.int64)

    @property
    def scale(self) -> float:
        return self.n / len(self.approximation)


def build_counter(P: MovingPointSet, fam, eps: float, cfg: SampleConfig = SampleConfig(), catalog=None) -> ApproxCounter:
    return ApproxCounter(P, build_eps_approximation(P, fam, eps, cfg, catalog=catalog))


def raw_count(counter: ApproxCounter, r, t: float) -> int:
    X = counter.points.positions(t)[counter.sample]
    return int(np.count_nonzero(r.contains_many(X)))


def approx_count(counter: ApproxCounter, r, t: float) -> float:
    """Estimated number of points of ``P(t)`` inside ``r``."""
    return raw_count(counter, r, t) * counter.scale


def exact_count(P: MovingPointSet, r, t: float) -> int:
    return int(np.count_nonzero(r.contains_many(P.positions(t))))


# --------------------------------------------------------------------------
# query batches: "time tag parameters..." per line


def format_range(r) -> str:
    def nums(v):
        return " ".join(repr(float(x)) for x in v)

    if isinstance(r, Halfspace):
        return f"halfspace {nums(r.normal)} {r.offset!r}"
    if isinstance(r, Ball):
        return f"ball {nums(r.center)} {r.radius!r}"
    if isinstance(r, BoundedCone):
        return f"cone {nums(r.apex)} {nums(r.direction)} {r.angle!r} {r.cap_radius!r}"
    if isinstance(r, IntervalRange):
        return f"interval {r.lower!r} {r.upper!r}"
    raise TypeError(f"unsupported range {r!r}")


def parse_range(tag: str, values, d: int):
    v = [float(x) for x in values]
    if tag == "halfspace" and len(v) == d + 1:
        return Halfspace(tuple(v[:d]), v[d])
    if tag == "ball" and len(v) == d + 1:
        return Ball(tuple(v[:d]), v[d])
    if tag == "cone" and len(v) == 2 * d + 2:
        return BoundedCone(tuple(v[:d]), tuple(v[d:2 * d]), v[2 * d], v[2 * d + 1])
    if tag == "interval" and len(v) == 2 and d == 1:
        return IntervalRange(v[0], v[1])
    raise ValueError(f"bad query: {tag} with {len(v)} parameters in dimension {d}")


def read_queries(path, d: int) -> list:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                out.append((float(parts[0]), parse_range(parts[1], parts[2:], d)))
            except (IndexError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return out


def write_queries(path, queries) -> None:
    with open(path, "w") as fh:
        for t, r in queries:
            fh.write(f"{float(t)!r} {format_range(r)}\n")


def random_queries(P: MovingPointSet, fam, m: int, seed: int = 0) -> list:
    """Seeded random ``(time, range)`` pairs of the family around ``P(t)``."""
    fam = family(fam)
    rng = np.random.default_rng(seed)
    lo, hi = P.horizon
    d = P.dimension
    out = []
    for _ in range(m):
        t = float(rng.uniform(lo, hi))
        X = P.positions(t)
        a, b = X.min(axis=0), X.max(axis=0)
        span = float(np.max(b - a)) or 1.0
        if fam.tag == "intervals":
            u, v = np.sort(rng.uniform(a[0] - 0.1 * span, b[0] + 0.1 * span, 2))
            r = IntervalRange(u, v)
        elif fam.tag == "halfspaces":
            nrm = rng.normal(size=d)
            nrm /= np.linalg.norm(nrm)
            proj = X @ nrm
            r = Halfspace(tuple(nrm), float(rng.uniform(proj.min(), proj.max())))
        elif fam.tag == "balls":
            c = rng.uniform(a, b)
            r = Ball(tuple(c), float(rng.uniform(0.0, span)))
        else:
            c = rng.uniform(a, b)
            u = rng.normal(size=d)
            u /= np.linalg.norm(u)
            r = BoundedCone(tuple(c), tuple(u), fam.angle, float(rng.uniform(0.05, 1.0) * span))
        out.append((t, r))
    return out


@dataclass
class QueryResult:
    time: float
    estimate: float
    exact: int | None
    n: int

    @property
    def error(self) -> float | None:
        return None if self.exact is None else abs(self.estimate - self.exact) / self.n


def run_queries(counter: ApproxCounter, queries, oracle: bool = True) -> list:
    out = []
    for t, r in queries:
        est = approx_count(counter, r, t)
        ex = exact_count(counter.points, r, t) if oracle else None
        out.append(QueryResult(t, est, ex, counter.n))
    return out


def write_results(path, results) -> None:
    with open(path, "w") as fh:
        fh.write("time,estimate,exact,error\n")
        for q in results:
            ex = "" if q.exact is None else str(q.exact)
            err = "" if q.error is None else repr(q.error)
            fh.write(f"{q.time!r},{q.estimate!r},{ex},{err}\n")


def max_relative_error(results) -> float:
    errs = [q.error for q in results if q.error is not None]
    return max(errs) if errs else math.nan
