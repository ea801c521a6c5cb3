"""Range families, membership predicates and canonical trace enumeration.

All ranges are closed: boundary points are members.

Static trace enumeration works on point sets at one or several times and
returns packed hyperedges together with integer *descriptors*. A descriptor
is time independent; :func:`witness_range` turns it, plus the positions at a
given time, into a concrete range realizing exactly that trace.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import bits

FAMILIES = ("halfspaces", "balls", "bounded_cones", "intervals")

# descriptor kinds (first column)
_FULL, _SUBSET, _TUPLE, _BLOCK, _CONE = 0, 1, 2, 3, 4
DESCR_WIDTH = 8

CANONICAL_GUARD = 10**7


class GuardExceeded(ValueError):
    """An exhaustive enumeration would exceed its configured size guard."""


def _rowdot(a, b):
    """Sum of products over the last axis, component by component.

    Used instead of ``@``/``np.dot`` so that vectorised and scalar paths run
    the same floating-point operations (BLAS may fuse or reorder).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = a[..., 0] * b[..., 0]
    for k in range(1, max(a.shape[-1], b.shape[-1])):
        out = out + a[..., k] * b[..., k]
    return out


def _as_point(x, d=None):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or (d is not None and len(x) != d):
        raise ValueError(f"expected a point of dimension {d}, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class Halfspace:
    """Closed halfspace ``normal . x >= offset`` with a unit normal."""

    normal: tuple
    offset: float

    def __post_init__(self):
        nrm = tuple(float(v) for v in np.atleast_1d(self.normal))
        if abs(math.sqrt(sum(v * v for v in nrm)) - 1.0) > 1e-12:
            raise ValueError("halfspace normal must be a unit vector")
        object.__setattr__(self, "normal", nrm)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dimension(self):
        return len(self.normal)

    def contains_many(self, X):
        return _rowdot(X, np.array(self.normal)) >= self.offset


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in np.atleast_1d(self.center)))
        if not self.radius >= 0:
            raise ValueError("ball radius must be nonnegative")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dimension(self):
        return len(self.center)

    def contains_many(self, X):
        diff = np.asarray(X, dtype=float) - np.array(self.center)
        return _rowdot(diff, diff) <= self.radius * self.radius


@dataclass(frozen=True)
class BoundedCone:
    """Cone with apex ``apex``, unit axis ``direction`` (so the axis point is
    ``apex + direction``), full opening ``angle`` and cap radius ``cap_radius``."""

    apex: tuple
    direction: tuple
    angle: float
    cap_radius: float

    def __post_init__(self):
        a = tuple(float(v) for v in np.atleast_1d(self.apex))
        u = tuple(float(v) for v in np.atleast_1d(self.direction))
        if len(a) != len(u):
            raise ValueError("apex and direction dimensions differ")
        if abs(math.sqrt(sum(v * v for v in u)) - 1.0) > 1e-12:
            raise ValueError("cone direction must be a unit vector")
        if not 0.0 < self.angle <= math.pi:
            raise ValueError("cone angle must lie in (0, pi]")
        if not self.cap_radius > 0:
            raise ValueError("cap radius must be positive")
        object.__setattr__(self, "apex", a)
        object.__setattr__(self, "direction", u)
        object.__setattr__(self, "angle", float(self.angle))
        object.__setattr__(self, "cap_radius", float(self.cap_radius))

    @property
    def dimension(self):
        return len(self.apex)

    @property
    def axis_point(self):
        return tuple(a + u for a, u in zip(self.apex, self.direction))

    def contains_many(self, X):
        v = np.asarray(X, dtype=float) - np.array(self.apex)
        dist = np.sqrt(_rowdot(v, v))
        along = _rowdot(v, np.array(self.direction))
        return (along >= dist * math.cos(self.angle / 2.0)) & (dist <= self.cap_radius)


@dataclass(frozen=True)
class IntervalRange:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError("interval lower bound exceeds upper bound")
        object.__setattr__(self, "lower", float(self.lower))
        object.__setattr__(self, "upper", float(self.upper))

    @property
    def dimension(self):
        return 1

    def contains_many(self, X):
        x = np.asarray(X, dtype=float)[..., 0]
        return (x >= self.lower) & (x <= self.upper)


Range = Union[Halfspace, Ball, BoundedCone, IntervalRange]


@dataclass(frozen=True)
class RangeFamily:
    tag: str
    angle: float = math.pi / 3  # bounded cones only

    def __post_init__(self):
        if self.tag not in FAMILIES:
            raise ValueError(f"unknown range family {self.tag!r}; expected one of {FAMILIES}")

    def __str__(self):
        if self.tag == "bounded_cones":
            return f"bounded_cones(angle={self.angle!r})"
        return self.tag


def family(tag, **kw) -> RangeFamily:
    return tag if isinstance(tag, RangeFamily) else RangeFamily(tag, **kw)


def contains(r: Range, x) -> bool:
    """Closed-range membership of one point."""
    x = _as_point(x)
    if len(x) != r.dimension:
        raise ValueError(f"point dimension {len(x)} does not match range dimension {r.dimension}")
    return bool(r.contains_many(x[None, :])[0])


def contains_many(r: Range, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != r.dimension:
        raise ValueError("points must have shape (m, range dimension)")
    return r.contains_many(X)


# --------------------------------------------------------------------------
# static trace tables


def estimated_traces(n: int, d: int, fam: RangeFamily) -> int:
    """Rows produced by :func:`trace_table` for one time (an upper bound)."""
    if fam.tag == "intervals":
        return n * (n + 1) // 2
    if fam.tag == "halfspaces":
        return math.comb(n, d) * 2 ** (d + 1) + 1 if n > d else 2**n
    if fam.tag == "balls":
        return math.comb(n, d + 1) * 2 ** (d + 1) + 1 if n > d else 2**n
    if d == 1:
        return n * (n + 1) // 2
    pairs = n * (n - 1) // 2
    curves = 4 * pairs
    return (n * n + 4 * curves * curves) * 5 * n * n


def trace_table(Xb: np.ndarray, fam: RangeFamily):
    """Traces realized at each of several times.

    ``Xb`` has shape ``(B, n, d)``. Returns ``(masks, descr)`` with masks of
    shape ``(B, M, W)`` and descriptors ``(M, DESCR_WIDTH)`` shared by all
    times. Rows that are empty or degenerate at a time are all-zero.
    """
    Xb = np.asarray(Xb, dtype=float)
    if Xb.ndim == 2:
        Xb = Xb[None]
    B, n, d = Xb.shape
    fam = family(fam)
    if fam.tag == "intervals":
        if d != 1:
            raise ValueError("interval ranges are one-dimensional")
        return _interval_table(Xb)
    if fam.tag == "halfspaces":
        return _hyperplane_table(Xb, lifted=False)
    if fam.tag == "balls":
        return _hyperplane_table(Xb, lifted=True)
    return _cone_table(Xb, fam.angle)


def _descr(rows):
    out = np.full((len(rows), DESCR_WIDTH), -1, dtype=np.int64)
    for i, r in enumerate(rows):
        out[i, : len(r)] = r
    return out


def _interval_table(Xb):
    B, n, _ = Xb.shape
    order = np.argsort(Xb[:, :, 0], axis=1, kind="stable")
    onehot = np.zeros((B, n, n), dtype=bool)
    onehot[np.arange(B)[:, None], np.arange(n)[None, :], order] = True
    prefix = np.zeros((B, n + 1, n), dtype=bool)
    prefix[:, 1:, :] = np.logical_or.accumulate(onehot, axis=1)
    pw = bits.pack(prefix)  # (B, n+1, W)
    lo, hi = np.triu_indices(n + 1, k=1)
    masks = pw[:, hi, :] ^ pw[:, lo, :]
    # a block that splits equal coordinates is not cut out by any interval
    sv = np.take_along_axis(Xb[:, :, 0], order, axis=1)
    tie = np.zeros((B, n + 1), dtype=bool)
    tie[:, 1:n] = sv[:, :-1] == sv[:, 1:]
    masks[tie[:, lo] | tie[:, hi]] = 0
    descr = np.full((len(lo), DESCR_WIDTH), -1, dtype=np.int64)
    descr[:, 0] = _BLOCK
    descr[:, 1] = lo
    descr[:, 2] = hi - 1
    return masks, descr


def _cofactors(rows):
    """Coefficients of the affine function vanishing on k points of R^k.

    ``rows`` has shape ``(..., k, k)``; returns ``(..., k + 1)`` such that
    ``f(y) = sum_j c_j y_j + c_k`` equals ``det([[rows, 1], [y, 1]])``.
    """
    k = rows.shape[-1]
    A = np.concatenate([rows, np.ones(rows.shape[:-1] + (1,))], axis=-1)  # (..., k, k+1)
    out = np.empty(rows.shape[:-2] + (k + 1,))
    for j in range(k + 1):
        minor = np.delete(A, j, axis=-1)
        out[..., j] = (-1) ** (k + j) * np.linalg.det(minor)
    return out


def _lift(X):
    return np.concatenate([X, _rowdot(X, X)[..., None]], axis=-1)


def _hyperplane_table(Xb, lifted):
    B, n, d = Xb.shape
    k = d + 1 if lifted else d
    if n < k or (not lifted and n == k and False):
        return _subset_table(Xb)
    if n <= d:
        return _subset_table(Xb)
    Y = _lift(Xb) if lifted else Xb
    tuples = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
    M = len(tuples)
    coef = _cofactors(Y[:, tuples, :])  # (B, M, dimY + 1)
    dimY = Y.shape[-1]
    F = _rowdot(Y[:, None, :, :], coef[:, :, None, :dimY]) + coef[:, :, None, dimY]  # (B, M, n)
    in_tuple = np.zeros((M, n), dtype=bool)
    in_tuple[np.arange(M)[:, None], tuples] = True
    if lifted:
        cz = coef[..., d]
        valid = np.abs(cz) > 1e-12 * np.maximum(1.0, np.abs(coef).max(axis=-1))
        inside = (-np.sign(cz))[..., None] * F > 0.0
        sides = [inside & ~in_tuple[None]]
        orients = [1]
    else:
        norm = np.sqrt(_rowdot(coef[..., :d], coef[..., :d]))
        valid = norm > 0.0
        sides = [(F > 0.0) & ~in_tuple[None], (F < 0.0) & ~in_tuple[None]]
        orients = [1, -1]
    patterns = list(itertools.product([False, True], repeat=k))
    rows = []
    descr = []
    for side, o in zip(sides, orients):
        base = bits.pack(side)  # (B, M, W)
        for pbits, pat in enumerate(patterns):
            add = np.zeros((M, n), dtype=bool)
            sel = np.array(pat)
            add[np.arange(M)[:, None], tuples[:, sel]] = True
            rows.append(base | bits.pack(add)[None])
            for m in range(M):
                descr.append((_TUPLE, o, pbits) + tuple(tuples[m]))
    masks = np.concatenate(rows, axis=1)
    valid_rows = np.tile(valid, (1, len(rows)))
    masks[~valid_rows] = 0
    full = np.broadcast_to(bits.pack(np.ones(n, dtype=bool)), (B, 1, bits.n_words(n)))
    masks = np.concatenate([masks, full], axis=1)
    descr.append((_FULL,))
    return masks, _descr(descr)


def _subset_table(Xb):
    B, n, d = Xb.shape
    rows, descr = [], []
    for code in range(1, 2**n):
        flags = np.array([(code >> i) & 1 for i in range(n)], dtype=bool)
        rows.append(flags)
        descr.append((_SUBSET, code))
    masks = np.broadcast_to(bits.pack(np.array(rows))[None], (B, len(rows), bits.n_words(n)))
    return np.array(masks), _descr(descr)


# --------------------------------------------------------------------------
# bounded cones
#
# For a fixed apex the traces are (angular window) & (distance prefix), and
# both are enumerated exactly. In the plane the apex only matters up to the
# cell it occupies in the arrangement of: lines through point pairs (angular
# order), perpendicular bisectors (distance order) and the circles on which a
# pair subtends the cone angle. Candidate apices are the arrangement vertices
# nudged into each incident cell, plus the points themselves. In d >= 3 the
# apex set is a heuristic (points, nudged points, pair midpoints).

_APEX_NUDGE = 1e-6  # relative to the point-set scale
_RAY_TURN = 1e-9  # radians


def _scale_of(X):
    span = X.max(axis=0) - X.min(axis=0)
    return max(float(np.max(span)), 1.0)


def _perp(v):
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def _unit(v):
    return v / np.sqrt(_rowdot(v, v))[..., None]


def _planar_curves(X, angle):
    n = len(X)
    i, j = np.triu_indices(n, k=1)
    chord = X[j] - X[i]
    c = np.sqrt(_rowdot(chord, chord))
    ok = c > 0
    i, j, chord, c = i[ok], j[ok], chord[ok], c[ok]
    e = chord / c[:, None]
    mid = 0.5 * (X[i] + X[j])
    lines_p = np.concatenate([X[i], mid])
    lines_e = np.concatenate([e, _perp(e)])
    if angle < math.pi:
        R = c / (2.0 * math.sin(angle / 2.0))
        h = np.sqrt(np.maximum(R * R - 0.25 * c * c, 0.0))
        nrm = _perp(e)
        circ_c = np.concatenate([mid + h[:, None] * nrm, mid - h[:, None] * nrm])
        circ_r = np.concatenate([R, R])
    else:
        circ_c = np.zeros((0, 2))
        circ_r = np.zeros(0)
    return lines_p, lines_e, circ_c, circ_r


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _planar_vertices(lp, le, cc, cr):
    """Pairwise intersections with the unit tangents of both curves there."""
    pts, t1, t2 = [], [], []
    nl, nc = len(lp), len(cc)
    if nl > 1:
        a, b = np.triu_indices(nl, k=1)
        den = _cross(le[a], le[b])
        ok = np.abs(den) > 1e-14
        a, b, den = a[ok], b[ok], den[ok]
        s = _cross(lp[b] - lp[a], le[b]) / den
        pts.append(lp[a] + s[:, None] * le[a])
        t1.append(le[a])
        t2.append(le[b])
    if nl and nc:
        a, b = np.meshgrid(np.arange(nl), np.arange(nc), indexing="ij")
        a, b = a.ravel(), b.ravel()
        w = lp[a] - cc[b]
        bb = _rowdot(w, le[a])
        disc = bb * bb - (_rowdot(w, w) - cr[b] ** 2)
        ok = disc > 0
        a, b, bb, disc = a[ok], b[ok], bb[ok], disc[ok]
        for sgn in (1.0, -1.0):
            s = -bb + sgn * np.sqrt(disc)
            x = lp[a] + s[:, None] * le[a]
            pts.append(x)
            t1.append(le[a])
            t2.append(_unit(_perp(x - cc[b])))
    if nc > 1:
        a, b = np.triu_indices(nc, k=1)
        dv = cc[b] - cc[a]
        D = np.sqrt(_rowdot(dv, dv))
        ok = (D > 0) & (D < cr[a] + cr[b]) & (D > np.abs(cr[a] - cr[b]))
        a, b, dv, D = a[ok], b[ok], dv[ok], D[ok]
        along = (cr[a] ** 2 - cr[b] ** 2 + D * D) / (2.0 * D)
        h = np.sqrt(np.maximum(cr[a] ** 2 - along * along, 0.0))
        ev = dv / D[:, None]
        for sgn in (1.0, -1.0):
            x = cc[a] + along[:, None] * ev + sgn * h[:, None] * _perp(ev)
            pts.append(x)
            t1.append(_unit(_perp(x - cc[a])))
            t2.append(_unit(_perp(x - cc[b])))
    if not pts:
        return np.zeros((0, 2)), np.zeros((0, 2)), np.zeros((0, 2))
    return np.concatenate(pts), np.concatenate(t1), np.concatenate(t2)


def _cone_apices(X, angle):
    n, d = X.shape
    scale = _scale_of(X)
    delta = _APEX_NUDGE * scale
    out = [X]
    if n > 1:
        i, j = np.nonzero(~np.eye(n, dtype=bool))
        v = X[j] - X[i]
        nv = np.sqrt(_rowdot(v, v))
        ok = nv > 0
        out.append(X[i[ok]] + (delta / nv[ok])[:, None] * v[ok])
        if d != 2:
            out.append(0.5 * (X[i[ok]] + X[j[ok]]))
    if d == 2 and n > 1:
        V, t1, t2 = _planar_vertices(*_planar_curves(X, angle))
        far = np.all(np.abs(V - X.mean(axis=0)) < 1e3 * scale, axis=1)
        V, t1, t2 = V[far], t1[far], t2[far]
        for s1 in (1.0, -1.0):
            for s2 in (1.0, -1.0):
                w = s1 * t1 + s2 * t2
                nw = np.sqrt(_rowdot(w, w))
                good = nw > 1e-12
                out.append(V[good] + (delta / nw[good])[:, None] * w[good])
    return np.concatenate(out)


def _cone_axes(V, angle):
    """Axis candidates at each apex: every cell of the circle of directions.

    ``V`` holds apex-to-point vectors ``(A, n, d)``; returns ``(A, D, d)``.
    """
    A, n, d = V.shape
    if d == 2:
        phi = np.arctan2(V[..., 1], V[..., 0])
        offs = [0.0]
        for side in (angle / 2.0, -angle / 2.0):
            offs += [side - _RAY_TURN, side + _RAY_TURN]
        cand = np.concatenate([phi + o for o in offs], axis=1)
        return np.stack([np.cos(cand), np.sin(cand)], axis=-1)
    dist = np.sqrt(_rowdot(V, V))
    U = V / np.where(dist > 0, dist, 1.0)[..., None]
    i, j = np.triu_indices(n, k=1)
    S = U[:, i, :] + U[:, j, :]
    cand = np.concatenate([U, S], axis=1)
    nc = np.sqrt(_rowdot(cand, cand))
    fallback = np.zeros(d)
    fallback[0] = 1.0
    return np.where((nc > 1e-12)[..., None], cand / np.where(nc > 0, nc, 1.0)[..., None], fallback)


def _cone_words(X, angle, apices):
    """Packed traces ``(A, D, n)``, one per (apex, axis, distance rank)."""
    n = len(X)
    V = X[None, :, :] - apices[:, None, :]
    dist = np.sqrt(_rowdot(V, V))  # (A, n)
    U = _cone_axes(V, angle)
    along = _rowdot(V[:, None, :, :], U[:, :, None, :])  # (A, D, n)
    inside = along >= dist[:, None, :] * math.cos(angle / 2.0)
    weights = np.left_shift(np.uint64(1), np.arange(n, dtype=np.uint64))
    wedge = (inside * weights).sum(axis=-1, dtype=np.uint64)  # (A, D)
    within = dist[:, None, :] <= dist[:, :, None]  # (A, rank j, n)
    prefix = (within * weights).sum(axis=-1, dtype=np.uint64)  # (A, n)
    return wedge[:, :, None] & prefix[:, None, :], U, dist


def _cone_trace_rows(X, angle):
    n, d = X.shape
    if n > 64:
        raise GuardExceeded("bounded-cone traces are enumerated for n <= 64 only")
    apices = _cone_apices(X, angle)
    D = 5 * n if d == 2 else n + n * (n - 1) // 2
    step = max(1, 2_000_000 // (D * n))
    seen = {}
    for s in range(0, len(apices), step):
        words, _, _ = _cone_words(X, angle, apices[s:s + step])
        flat = words.ravel()
        uniq = np.unique(flat)
        first = np.full(len(uniq), len(flat), dtype=np.int64)
        np.minimum.at(first, np.searchsorted(uniq, flat), np.arange(len(flat)))
        for w, f in zip(uniq.tolist(), first.tolist()):
            if w and w not in seen:
                seen[w] = s * D * n + f
    uniq = np.array(sorted(seen), dtype=np.uint64)
    first = np.array([seen[w] for w in uniq.tolist()], dtype=np.int64)
    a, rest = np.divmod(first, D * n)
    k, j = np.divmod(rest, n)
    descr = np.full((len(uniq), DESCR_WIDTH), -1, dtype=np.int64)
    descr[:, 0] = _CONE
    descr[:, 1] = a
    descr[:, 2] = k
    descr[:, 3] = j
    masks = np.zeros((len(uniq), bits.n_words(n)), dtype=np.uint64)
    masks[:, 0] = uniq
    return masks, descr


def _cone_table(Xb, angle):
    B, n, d = Xb.shape
    if d == 1:
        return _interval_table(Xb)
    masks, descr = [], []
    for b in range(B):
        m, dsc = _cone_trace_rows(Xb[b], angle)
        masks.append(m)
        descr.append(dsc)
    return masks, descr


def _cone_witness(X, angle, a, k, j):
    apices = _cone_apices(X, angle)
    _, U, dist = _cone_words(X, angle, apices[a:a + 1])
    s = np.unique(dist[0])
    sj = dist[0, j]
    above = s[s > sj]
    rho = 0.5 * (sj + above[0]) if len(above) else sj + 1.0
    if rho <= 0.0:
        rho = 0.5 * float(above[0]) if len(above) else 1.0
    return BoundedCone(tuple(apices[a]), tuple(U[0, k]), angle, float(rho))


def _interval_as_cone(X, lo, hi, angle):
    return BoundedCone((lo,), (1.0,), angle, hi - lo)
# --------------------------------------------------------------------------
# witnesses


def _affine_fit(P, values):
    """Min-norm affine w (last entry constant) with w . [P, 1] = values."""
    A = np.concatenate([P, np.ones((len(P), 1))], axis=1)
    w, *_ = np.linalg.lstsq(A, np.asarray(values, dtype=float), rcond=None)
    return w


def _halfspace_from_affine(a, c):
    """Range {x : a . x + c >= 0}."""
    na = math.sqrt(float(_rowdot(a, a)))
    return Halfspace(tuple(a / na), -c / na)


def _ball_from_affine(X, a, c):
    """Large ball approximating {x : a . x + c >= 0} on the points X."""
    na = math.sqrt(float(_rowdot(a, a)))
    u = a / na
    s = (_rowdot(X, a) + c) / na
    margin = float(np.min(np.abs(s)))
    x0 = -c / na * u
    diff = X - x0
    R = float(np.max(_rowdot(diff, diff))) / (2.0 * margin) + 1.0
    return Ball(tuple(x0 + R * u), R)


def witness_range(X: np.ndarray, fam: RangeFamily, descr) -> Range:
    """Concrete range realizing the trace described by ``descr`` on points X."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    fam = family(fam)
    descr = [int(v) for v in descr]
    kind = descr[0]
    if kind == _FULL:
        if fam.tag == "halfspaces":
            e = np.zeros(d)
            e[0] = 1.0
            return Halfspace(tuple(e), float(X[:, 0].min()) - 1.0)
        centre = X.mean(axis=0)
        diff = X - centre
        return Ball(tuple(centre), math.sqrt(float(np.max(_rowdot(diff, diff)))) + 1.0)
    if kind == _BLOCK:
        order = np.argsort(X[:, 0], kind="stable")
        x = X[order, 0]
        i, j = descr[1], descr[2]
        lo = 0.5 * (x[i - 1] + x[i]) if i > 0 else x[i] - 1.0
        hi = 0.5 * (x[j] + x[j + 1]) if j < n - 1 else x[j] + 1.0
        if fam.tag == "bounded_cones":
            return _interval_as_cone(X, lo, hi, fam.angle)
        return IntervalRange(lo, hi)
    if kind == _SUBSET:
        code = descr[1]
        sigma = np.array([1.0 if (code >> i) & 1 else -1.0 for i in range(n)])
        if np.all(sigma > 0):
            return witness_range(X, fam, (_FULL,))
        w = _affine_fit(X, sigma)
        if fam.tag == "halfspaces":
            return _halfspace_from_affine(w[:d], w[d])
        return _ball_from_affine(X, w[:d], w[d])
    if kind == _TUPLE:
        return _tuple_witness(X, fam, descr)
    if kind == _CONE:
        return _cone_witness(X, fam.angle, descr[1], descr[2], descr[3])
    raise ValueError(f"unknown descriptor kind {kind}")


def _tuple_witness(X, fam, descr):
    n, d = X.shape
    lifted = fam.tag == "balls"
    k = d + 1 if lifted else d
    o, pbits = descr[1], descr[2]
    tup = np.array(descr[3:3 + k], dtype=np.int64)
    pattern = list(itertools.product([False, True], repeat=k))[pbits]
    sigma = np.where(pattern, 1.0, -1.0)
    Y = _lift(X) if lifted else X
    coef = _cofactors(Y[tup][None])[0]
    others = np.setdiff1d(np.arange(n), tup)
    if lifted:
        cz = coef[d]
        # F = -z + a . x + b, positive inside the ball
        a = -np.sign(cz) * coef[:d] / abs(cz)
        b = -np.sign(cz) * coef[d + 1] / abs(cz)
        F = _rowdot(X, a) + b - Y[:, d]
    else:
        nrm = math.sqrt(float(_rowdot(coef[:d], coef[:d])))
        a = o * coef[:d] / nrm
        b = o * coef[d] / nrm
        F = _rowdot(X, a) + b
    margin = float(np.min(np.abs(F[others]))) if len(others) else 1.0
    w = _affine_fit(X[tup], sigma)
    h = _rowdot(X, w[:d]) + w[d]
    eta = 0.5 * margin / max(1.0, float(np.max(np.abs(h))))
    a2 = a + eta * w[:d]
    b2 = b + eta * w[d]
    if lifted:
        centre = 0.5 * a2
        r2 = b2 + float(_rowdot(centre, centre))
        return Ball(tuple(centre), math.sqrt(max(r2, 0.0)))
    return _halfspace_from_affine(a2, b2)


def canonical_ranges(points, fam, guard: int = CANONICAL_GUARD) -> list:
    """Ranges realizing every subset of ``points`` cut out by the family.

    Built from d-tuples (halfspaces), (d+1)-tuples (balls), gap midpoints
    (intervals) or apex/axis/cap candidates (bounded cones: exhaustive from
    the planar arrangement in d=2, heuristic in d=3).
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, d = X.shape
    fam = family(fam)
    if math.comb(n, d) * n > guard:
        raise GuardExceeded(f"C({n},{d})*{n} exceeds guard {guard}")
    masks, descr = trace_table(X[None], fam)
    if isinstance(masks, list):
        masks, descr = masks[0], descr[0]
    else:
        masks = masks[0]
    keep = bits.nonzero_rows(masks)
    out = []
    for row in descr[keep]:
        r = witness_range(X, fam, row)
        out.append(r)
    return out


def static_traces(points, fam) -> set:
    """Distinct nonempty traces (as index tuples) cut out of a static point set."""
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    masks, _ = trace_table(X[None], family(fam))
    m = masks[0]
    m = m[bits.nonzero_rows(m)]
    uniq, _ = bits.unique_rows(m)
    return {bits.to_indices(r) for r in uniq}
