import math

import numpy as np
import pytest

import eschlab


def test_surface_tension_constant():
    s = eschlab.surface_tension_constant(eschlab.quartic_params())
    assert abs(s - math.sqrt(2.0) / 3.0) < 1e-6


def test_caps_event_time():
    p = eschlab.SphereModelParams(vbar=10.0, mbar=5.0)
    traj = eschlab.integrate_caps(eschlab.SharpCapState(0.8, 2.1), p, 0.2)
    assert traj.event is not None
    assert traj.event.kind == "south-cap-vanished"
    assert 0.09 <= traj.event.time <= 0.13


def test_config_round_trip():
    for name in eschlab.preset_names():
        preset = eschlab.builtin_preset(name)
        assert eschlab.parse_config(eschlab.render_config(preset)) == preset


def test_config_error_is_value_error():
    with pytest.raises(ValueError, match="line 2"):
        eschlab.parse_config("preset=stretch\nfoo=1")


def test_small_genesis_run(tmp_path):
    preset = eschlab.parse_config(
        "preset=genesis\nt_end=0.01\ndt=0.001\nn_cells=32\noutput_times=0,0.01\n"
        f"out_dir={tmp_path}"
    )
    out = eschlab.run_preset(preset)
    assert out.exit_code == 0
    run = out.runs[0]
    assert run.ok
    trace = eschlab.trace_array(run)
    assert trace.shape[1] == 3
    assert np.ptp(trace[:, 2]) < 1e-12
    assert (tmp_path / "summary.csv").exists()
    assert len(run.final_u) == 33
