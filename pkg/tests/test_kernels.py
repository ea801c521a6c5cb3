import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinetikos import kernels

MODS = kernels.backends()
needs_native = pytest.mark.skipif("native" not in MODS, reason="native extension not built")


def test_backend_reported():
    assert kernels.BACKEND in MODS


def test_fallback_roots_and_depth():
    fb = MODS["python"]
    roots, owner = fb.real_roots_batch(np.array([[-1.0, 0.0, 1.0], [2.0, -3.0, 1.0]]), 0.0, 3.0, 1e-12)
    got = sorted(zip(owner.tolist(), roots.tolist()))
    assert [o for o, _ in got] == [0, 1, 1]
    assert np.allclose([r for _, r in got], [1.0, 1.0, 2.0])
    depth = fb.ball_depth(np.array([[0.0, 0.0], [5.0, 5.0]]), np.array([[0.0, 0.0], [1.0, 0.0]]),
                          np.array([1.0, 1.0]), 0.0, 0.0)
    assert depth.tolist() == [2, 0]


def test_nearest_ties_go_to_smaller_site():
    fb = MODS["python"]
    assert fb.nearest_sites(np.array([[0.5]]), np.array([[0.0], [1.0]])).tolist() == [0]


@needs_native
@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_native_matches_fallback(seed, deg):
    rng = np.random.default_rng(seed)
    nat, fb = MODS["native"], MODS["python"]
    C = rng.uniform(-1, 1, (20, deg + 1))
    a, b = nat.real_roots_batch(C, -1.0, 2.0, 1e-10), fb.real_roots_batch(C, -1.0, 2.0, 1e-10)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    Q, X = rng.uniform(0, 1, (200, 2)), rng.uniform(0, 1, (15, 2))
    R2 = rng.uniform(0.001, 0.1, 15)
    assert np.array_equal(nat.ball_depth(Q, X, R2, 1e-9, 0.0), fb.ball_depth(Q, X, R2, 1e-9, 0.0))
    assert np.array_equal(nat.nearest_sites(Q, X), fb.nearest_sites(Q, X))
