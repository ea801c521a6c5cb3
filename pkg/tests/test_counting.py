import math

import numpy as np
import pytest

from kinetikos.counting import (
    approx_count,
    build_counter,
    exact_count,
    format_range,
    max_relative_error,
    parse_range,
    random_queries,
    raw_count,
    read_queries,
    run_queries,
    write_queries,
    write_results,
)
from kinetikos.ranges import Ball, BoundedCone, Halfspace, IntervalRange, contains
from kinetikos.sampling import SampleConfig
from kinetikos.trajectory import MovingPointSet

from conftest import random_points


def test_full_sample_is_exact():
    P = random_points(0, 40, 2)
    c = build_counter(P, "balls", 0.3)
    assert c.scale == 1.0
    for t, r in random_queries(P, "balls", 50, seed=1):
        assert approx_count(c, r, t) == exact_count(P, r, t)


def test_single_point():
    P = MovingPointSet([[[0.2, 0.0], [0.3, 1.0]]])
    c = build_counter(P, "balls", 0.5)
    assert c.sample.tolist() == [0] and c.scale == 1.0


def test_empty_and_covering_ranges():
    P = random_points(1, 30, 2)
    c = build_counter(P, "balls", 0.3)
    far = Ball((50.0, 50.0), 1.0)
    assert approx_count(c, far, 0.5) == 0 and exact_count(P, far, 0.5) == 0
    assert exact_count(P, Ball((0.0, 0.0), 100.0), 0.5) == 30


def test_counter_size_and_contract():
    P = random_points(2, 200, 2)
    c = build_counter(P, "balls", 0.1, SampleConfig(seed=2, C=1.0, vc_hint=3))
    assert len(c.approximation) == min(200, math.ceil(1.0 * 3 / 0.01))
    assert len(c.approximation) == 200  # C=1 already asks for 300 >= n


def test_subsampled_counter_is_scale_consistent():
    P = random_points(3, 300, 1)
    c = build_counter(P, "intervals", 0.25, SampleConfig(seed=3, C=0.5))
    assert c.scale > 1
    for t, r in random_queries(P, "intervals", 100, seed=3):
        k = approx_count(c, r, t)
        assert k / c.scale == pytest.approx(raw_count(c, r, t))
    if c.approximation.verified:
        res = run_queries(c, random_queries(P, "intervals", 200, seed=4))
        assert max_relative_error(res) <= 0.25


def test_exact_count_is_predicate_sum():
    P = random_points(4, 25, 2)
    rng = np.random.default_rng(4)
    for _ in range(20):
        u = rng.normal(size=2)
        r = Halfspace(tuple(u / np.linalg.norm(u)), float(rng.normal()))
        t = float(rng.uniform())
        assert exact_count(P, r, t) == sum(contains(r, x) for x in P.positions(t))


@pytest.mark.parametrize("r,d", [
    (Halfspace((0.6, 0.8), 0.1), 2),
    (Ball((0.1, 0.2), 0.3), 2),
    (BoundedCone((0.0, 0.0), (1.0, 0.0), math.pi / 3, 2.0), 2),
    (IntervalRange(-0.5, 0.25), 1),
])
def test_range_format_roundtrip(r, d):
    tag, *vals = format_range(r).split()
    assert parse_range(tag, [float(v) for v in vals], d) == r


def test_query_file_roundtrip(tmp_path):
    P = random_points(5, 20, 2)
    qs = random_queries(P, "bounded_cones", 10, seed=5)
    path = tmp_path / "q.txt"
    write_queries(path, qs)
    assert read_queries(path, 2) == qs


def test_query_file_errors(tmp_path):
    path = tmp_path / "q.txt"
    path.write_text("# comment\n0.5 ball 0 0\n")
    with pytest.raises(ValueError, match=":2"):
        read_queries(path, 2)


def test_results_csv(tmp_path):
    P = random_points(6, 10, 2)
    c = build_counter(P, "balls", 0.5)
    res = run_queries(c, random_queries(P, "balls", 3, seed=6))
    write_results(tmp_path / "r.csv", res)
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "time,estimate,exact,error" and len(lines) == 4
    assert run_queries(c, random_queries(P, "balls", 2), oracle=False)[0].error is None
