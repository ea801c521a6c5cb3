import math

import numpy as np
import pytest

from kinetikos import scenario as scn
from kinetikos.hypergraph import event_times
from kinetikos.svg import line_plot
from kinetikos.trajectory import validate_general_position


def test_static_line_instance():
    sc = scn.generate_scenario(4, dimension=1, degree=0, generator="static", seed=1)
    assert sc.points.shape == (4, 1, 1) and sc.family == "intervals"
    assert validate_general_position(sc.moving_points()).valid


@pytest.mark.parametrize("gen,d", [("uniform", 2), ("uniform", 3), ("static", 2), ("linear1d", 1),
                                   ("crossing_fan", 1)])
def test_roundtrip_is_byte_identical(gen, d, tmp_path):
    sc = scn.generate_scenario(7, dimension=d, seed=3, generator=gen, params={"epsilon": 0.2, "k": 4})
    text = sc.dumps()
    assert scn.loads(text).dumps() == text
    path = tmp_path / "s.json"
    sc.save(path)
    back = scn.load(path)
    assert np.array_equal(back.points, sc.points) and back.params == sc.params


def test_seeded_generation_reproducible():
    a = scn.generate_scenario(20, seed=9).dumps()
    assert a == scn.generate_scenario(20, seed=9).dumps()
    assert a != scn.generate_scenario(20, seed=10).dumps()


def test_crossing_fan_events():
    n = 20
    sc = scn.generate_scenario(n, dimension=1, generator="crossing_fan", seed=0)
    ev = event_times(sc.moving_points(), "intervals")
    assert len(ev) >= 0.9 * math.comb(n, 2)


def test_degenerate_input_is_perturbed():
    coeffs = np.zeros((3, 1, 2))
    coeffs[:, 0, 1] = 1.0  # three identical trajectories
    sc = scn._finish(coeffs, 1, 1, 1.0, 0, "intervals", None, "custom")
    assert sc.perturbed and validate_general_position(sc.moving_points()).valid


def test_invalid_parameters():
    with pytest.raises(ValueError):
        scn.generate_scenario(5, generator="spiral")
    with pytest.raises(ValueError):
        scn.generate_scenario(5, dimension=2, generator="crossing_fan")
    with pytest.raises(ValueError):
        scn.generate_scenario(0)
    with pytest.raises(ValueError):
        scn.loads("{not json")
    with pytest.raises(ValueError):
        scn.loads('{"dimension": 1}')
    with pytest.raises(ValueError):
        scn.Scenario(1, 0, 1.0, 0, np.zeros((1, 1, 1)), "intervals", {"alpha": 1})
    assert scn.with_params(scn.generate_scenario(3), k=5).params == {"k": 5}


def test_svg_is_deterministic(tmp_path):
    series = {"a": ([1, 2, 4], [1.0, 2.0, 3.0]), "b": ([1, 2, 4], [2.0, 2.5, 2.0])}
    line_plot(tmp_path / "a.svg", series, "t", "x", "y", log=True)
    line_plot(tmp_path / "b.svg", series, "t", "x", "y", log=True)
    text = (tmp_path / "a.svg").read_text()
    assert text.startswith("<svg") and text == (tmp_path / "b.svg").read_text()
