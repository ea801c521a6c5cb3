import math

import numpy as np
import pytest

from kinetikos.interference import (
    assign_hub_protocol,
    communication_graph,
    connectivity_and_diameter,
    count_combinatorial_changes,
    direct_partners,
    grid_depth,
    hub_count_k,
    interference_series,
    max_depth,
    sample_network,
    snapshot_from_radii,
)
from kinetikos.sampling import SampleConfig
from kinetikos.trajectory import MovingPointSet

from conftest import random_points


def test_min_rule_edges():
    X = [[0.0, 0.0], [1.0, 0.0]]
    assert snapshot_from_radii(X, [1.0, 1.0]).num_edges == 1
    assert snapshot_from_radii(X, [1.0, 0.25]).num_edges == 0


def test_single_and_isolated_vertices():
    assert connectivity_and_diameter(snapshot_from_radii([[0.0, 0.0]], [0.0])) == (True, 0)
    assert connectivity_and_diameter(snapshot_from_radii([[0.0, 0.0], [1.0, 0.0]], [0.0, 0.0])) == (False, -1)


def test_path_diameter():
    X = [[float(i), 0.0] for i in range(4)]
    assert connectivity_and_diameter(snapshot_from_radii(X, [1.0] * 4)) == (True, 3)


def test_depth_small_cases():
    assert max_depth([[0.0, 0.0]], [1.0])[0] == 1
    assert max_depth([[0.0, 0.0], [5.0, 0.0]], [1.0, 1.0])[0] == 1
    depth, wit, exact = max_depth([[0.0, 0.0], [1.5, 0.0]], [1.0, 1.0])
    assert depth == 2 and exact
    assert np.linalg.norm(wit) <= 1 + 1e-9 and np.linalg.norm(wit - [1.5, 0]) <= 1 + 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_exact_depth_dominates_grid(seed):
    rng = np.random.default_rng(seed)
    C = rng.uniform(0, 1, (32, 2))
    R2 = rng.uniform(0.01, 0.15, 32) ** 2
    assert max_depth(C, R2)[0] >= grid_depth(C, R2, 400)


def test_hub_count():
    assert hub_count_k(4) == 2
    assert hub_count_k(256) == round(math.sqrt(256 / math.log(256)))
    with pytest.raises(ValueError):
        hub_count_k(1)


def test_small_n_needs_flag():
    P = random_points(0, 3, 2)
    with pytest.raises(ValueError):
        assign_hub_protocol(P)


def test_two_points_no_changes():
    P = random_points(1, 2, 2)
    sch = assign_hub_protocol(P, allow_small=True, k=2)
    log = count_combinatorial_changes(sch)
    assert log.total == 0
    assert sch.partner_at(0, 0.5) == 1 and sch.partner_at(1, 0.5) == 0


def test_static_one_interval_each():
    P = random_points(2, 20, 2, s=0)
    sch = assign_hub_protocol(P, SampleConfig(seed=2))
    assert all(len(pc) == 1 for pc in sch.pieces)
    assert count_combinatorial_changes(sch).total == 0


@pytest.fixture(scope="module")
def n64():
    P = random_points(5, 64, 2)
    return P, assign_hub_protocol(P, SampleConfig(seed=5))


def test_schedule_matches_direct_scan(n64):
    P, sch = n64
    X0 = None
    for t in np.random.default_rng(5).uniform(0, 1, 200):
        got, want = sch.partners_at(t), direct_partners(P, sch, t)
        X0 = P.positions(t)
        for i in np.flatnonzero(got != want):
            dg = ((X0[i] - X0[got[i]]) ** 2).sum()
            dw = ((X0[i] - X0[want[i]]) ** 2).sum()
            assert dg == pytest.approx(dw, rel=1e-9)


def test_schedule_partitions_horizon(n64):
    _, sch = n64
    for pc in sch.pieces:
        assert pc[0][0] == 0.0 and pc[-1][1] == 1.0
        assert all(a[1] == b[0] and a[2] != b[2] for a, b in zip(pc, pc[1:]))


def test_snapshots_connected_diameter_three(n64):
    P, sch = n64
    hubs = sorted(sch.hub_set)
    for t in np.linspace(0, 1, 25):
        snap = communication_graph(P, sch, t)
        conn, diam = connectivity_and_diameter(snap)
        assert conn and diam <= 3
        A = snap.adjacency
        assert np.array_equal(A, A.T)
        assert all(A[a, b] for a in hubs for b in hubs if a != b)
        part = sch.partners_at(t)
        for i in range(P.n):
            if i not in sch.hub_set:
                assert A[i, part[i]]
        X = P.positions(t)
        assert np.allclose(snap.radii_sq, ((X - X[part]) ** 2).sum(axis=1))


def test_interference_decomposition(n64):
    P, sch = n64
    rep = interference_series(P, sch, np.linspace(0, 1, 20))
    for s in rep.samples:
        assert 1 <= s.interference <= P.n
        assert s.interference <= s.hub_depth + s.nonhub_depth


def test_changes_within_caps_and_budget(n64):
    P, sch = n64
    log = count_combinatorial_changes(sch)
    assert log.within_caps
    assert log.total == sum(len(pc) - 1 for pc in sch.pieces)
    assert log.total <= 4 * 64**1.5 * math.sqrt(math.log(64))
    assert np.all(np.diff(log.event_times) >= 0)


def test_exports(tmp_path, n64):
    P, sch = n64
    rep = interference_series(P, sch, [0.0, 0.5])
    rep.export(tmp_path / "i.csv")
    assert (tmp_path / "i.csv").read_text().startswith("t,interference,connected,diameter,num_edges\n")
    count_combinatorial_changes(sch).export(tmp_path / "c.csv")
    assert len((tmp_path / "c.csv").read_text().splitlines()) == 65
    sch.dump(tmp_path / "s.txt")
    assert (tmp_path / "s.txt").read_text().startswith("# hubs: ")


def test_three_dim_depth_is_lower_bound():
    P = random_points(6, 12, 3)
    sch = assign_hub_protocol(P, SampleConfig(seed=6))
    s = sample_network(P, sch, 0.3)
    assert not s.exact and s.interference >= 1
