import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinetikos import bits
from kinetikos.ranges import (
    Ball,
    BoundedCone,
    GuardExceeded,
    Halfspace,
    IntervalRange,
    RangeFamily,
    canonical_ranges,
    contains,
    contains_many,
    static_traces,
)

SIXTY = math.pi / 3


def test_contains_examples():
    assert contains(Halfspace((1.0, 0.0), 0.0), (1.0, 1.0))
    cone = BoundedCone((0.0, 0.0), (1.0, 0.0), SIXTY, 10.0)
    assert contains(cone, (1.0, 0.0))
    assert not contains(cone, (0.0, 1.0))
    assert contains(Ball((0.0, 0.0), 1.0), (1.0, 0.0))
    assert contains(IntervalRange(0.0, 1.0), (1.0,))


def test_contains_dimension_mismatch():
    with pytest.raises(ValueError):
        contains(Ball((0.0, 0.0), 1.0), (1.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        contains_many(Ball((0.0, 0.0), 1.0), np.zeros((3, 3)))


def test_range_invariants():
    with pytest.raises(ValueError):
        Halfspace((1.0, 1.0), 0.0)
    with pytest.raises(ValueError):
        Ball((0.0,), -1.0)
    with pytest.raises(ValueError):
        IntervalRange(1.0, 0.0)
    with pytest.raises(ValueError):
        RangeFamily("strips")


def test_cone_boundary_and_cap():
    cone = BoundedCone((0.0, 0.0), (1.0, 0.0), SIXTY, 2.0)
    edge = (math.cos(SIXTY / 2), math.sin(SIXTY / 2))
    assert contains(cone, (edge[0] * 0.999, edge[1] * 0.999))
    assert not contains(cone, (math.cos(SIXTY / 2 + 1e-6), math.sin(SIXTY / 2 + 1e-6)))
    assert contains(cone, (2.0, 0.0))
    assert not contains(cone, (2.0 + 1e-9, 0.0))
    assert contains(cone, (0.0, 0.0))


def test_thin_cone_accepts_only_near_axis():
    cone = BoundedCone((0.0, 0.0), (0.0, 1.0), 1e-6, 10.0)
    rng = np.random.default_rng(0)
    X = rng.uniform(-5, 5, (2000, 2))
    inside = contains_many(cone, X)
    ang = np.abs(np.arctan2(X[:, 0], X[:, 1]))
    assert not np.any(inside & (ang > 1e-6))
    assert contains(cone, (0.0, 3.0))


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 5))
def test_ball_membership_is_distance(x, y, r):
    assert contains(Ball((0.0, 0.0), r), (x, y)) == (x * x + y * y <= r * r)


def test_canonical_intervals_on_three_points():
    # 6 nonempty contiguous subsets plus the empty trace: 7 realizable subsets
    tr = static_traces([0.0, 1.0, 2.0], "intervals")
    assert tr == {(0,), (1,), (2,), (0, 1), (1, 2), (0, 1, 2)}
    assert not contains(IntervalRange(5.0, 6.0), (1.0,))


def test_canonical_halfplanes_convex_quad():
    X = np.array([[0.0, 0.0], [1.0, 0.1], [1.1, 1.0], [-0.1, 0.9]])
    tr = static_traces(X, "halfspaces")
    assert len(tr) == 13
    assert (0, 2) not in tr and (1, 3) not in tr


def test_canonical_balls_three_points():
    X = np.array([[0.0, 0.0], [1.0, 0.2], [0.3, 0.8]])
    assert len(static_traces(X, "balls")) == 7


@pytest.mark.parametrize("tag", ["halfspaces", "balls", "bounded_cones", "intervals"])
def test_canonical_ranges_realize_their_traces(tag):
    rng = np.random.default_rng(1)
    d = 1 if tag == "intervals" else 2
    X = rng.uniform(-1, 1, (7, d))
    fam = RangeFamily(tag)
    got = {bits.to_indices(bits.pack(contains_many(r, X)[None])[0]) for r in canonical_ranges(X, fam)}
    got.discard(())
    assert got == static_traces(X, fam)


def test_canonical_guard():
    X = np.random.default_rng(0).uniform(size=(200, 2))
    with pytest.raises(GuardExceeded):
        canonical_ranges(X, "halfspaces", guard=1000)


def _sweep(X, tag, rng, m):
    n, d = X.shape
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = float(np.max(hi - lo))
    if tag == "halfspaces":
        U = rng.normal(size=(m, d))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        proj = X @ U.T  # (n, m)
        c = rng.uniform(proj.min(axis=0) - 0.1, proj.max(axis=0) + 0.1)
        return (proj >= c).T
    if tag == "balls":
        C = rng.uniform(lo - span, hi + span, (m, d))
        R = rng.uniform(0, 2 * span, m)
        D = np.linalg.norm(X[None] - C[:, None], axis=2)
        return D <= R[:, None]
    if tag == "intervals":
        a = rng.uniform(lo[0] - 0.1, hi[0] + 0.1, (m, 2))
        a.sort(axis=1)
        return (X[None, :, 0] >= a[:, :1]) & (X[None, :, 0] <= a[:, 1:])
    A = rng.uniform(lo - span, hi + span, (m, d))
    U = rng.normal(size=(m, d))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    R = rng.uniform(0, 3 * span, m)
    V = X[None] - A[:, None]
    L = np.linalg.norm(V, axis=2)
    return ((V * U[:, None]).sum(axis=2) >= L * math.cos(SIXTY / 2)) & (L <= R[:, None])


@pytest.mark.parametrize("tag,n", [("halfspaces", 8), ("balls", 7), ("bounded_cones", 6), ("intervals", 8)])
@pytest.mark.parametrize("seed", range(2))
def test_canonical_complete_against_dense_sweep(tag, n, seed):
    rng = np.random.default_rng(100 + seed)
    d = 1 if tag == "intervals" else 2
    X = rng.uniform(-1, 1, (n, d))
    M = _sweep(X, tag, rng, 100_000)
    swept = {bits.to_indices(r) for r in bits.unique_rows(bits.pack(M))[0]}
    swept.discard(())
    assert swept <= static_traces(X, tag)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 9))
def test_halfplane_traces_bounded_by_counting(seed, n):
    X = np.random.default_rng(seed).uniform(-1, 1, (n, 2))
    # n points in general position admit at most n(n-1)+2 halfplane traces incl. empty
    assert len(static_traces(X, "halfspaces")) <= n * (n - 1) + 1
