import json
import os
from pathlib import Path

import numpy as np
import pytest

import freqinv

SCENARIOS = Path(os.environ.get("FREQINV_SCENARIO_DIR",
                                Path(__file__).resolve().parents[2] / "scenarios"))


def test_scenario_round_trip():
    s = freqinv.load_scenario(SCENARIOS / "case1.json")
    assert s.step == 0.2 and s.m == 2 and s.n_bar == 7
    assert len(s.inclusions) == 1
    assert s.inclusions[0].center == [0.0, 1.5, -1.5]
    assert freqinv.parse_scenario(s.to_json()) == s
    assert json.loads(s.to_json())["tail_update_mode"] == "bvp"


def test_invalid_scenario_raises_value_error():
    with pytest.raises(ValueError):
        freqinv.parse_scenario('{"unknown": 1}')
    s = freqinv.Scenario()
    s.inclusions = [freqinv.Inclusion([0.0, 0.0, -1.5], 0.5, 0.5)]
    with pytest.raises(ValueError):
        s.validate()


def test_ladder_weights():
    k, a = freqinv.ladder(1.0, 2.0, 0.1)
    assert len(k) == 11 and k[0] == pytest.approx(2.0) and k[-1] == pytest.approx(1.0)
    assert all(1.0 < x < 2.0 for x in a)
    assert a[0] == pytest.approx(1.0 + 1.9 / 2.0)


def test_plane_wave_is_second_order():
    coarse = freqinv.plane_wave_error(2.0, 0.25, 1.0)
    fine = freqinv.plane_wave_error(2.0, 0.125, 1.0)
    assert 3.0 < coarse / fine < 5.0


def test_coarse_background_pipeline(tmp_path):
    s = freqinv.load_scenario(SCENARIOS / "background.json")
    s.step = 0.5
    s.n_bar = 1
    s.m = 1
    s.noise_level = 0.0
    fwd, inv = freqinv.pipeline(s)
    assert fwd.traces.shape == (11, len(fwd.trace_points))
    assert fwd.u_kbar.shape == (13, 13, 13)
    # The plane wave exp(-i k x3) at k = 2 is constant over the bottom face,
    # with a modulus near 1 (the step 0.5 costs several percent).
    assert np.allclose(fwd.traces[0], fwd.traces[0][0])
    assert abs(abs(fwd.traces[0][0]) - 1.0) < 0.15
    assert inv.c.shape == (11, 11, 11)
    assert np.all(inv.c == 1.0)
    assert inv.cylinders == []
    assert inv.summary["max_c"] == 1.0
    assert len(inv.history) == 1
    freqinv.write_field_vtk(tmp_path / "c.vtk", inv)
    assert (tmp_path / "c.vtk").read_text().startswith("# vtk DataFile")


def test_inclusion_raises_the_coefficient():
    s = freqinv.Scenario()
    s.step = 0.5
    s.inclusions = [freqinv.Inclusion([0.0, 0.0, -1.0], 1.0, 3.0)]
    fwd = freqinv.forward(s)
    c = fwd.coefficient
    n = c.shape[0]
    assert c.max() == pytest.approx(3.0)
    # Axis order is x1, x2, x3: the inclusion sits below the middle plane.
    i3 = np.unravel_index(np.argmax(c), c.shape)[2]
    assert i3 < n // 2
