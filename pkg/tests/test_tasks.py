"""Task stream definitions: values, periodicity, frame geometry."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lepm.tasks import (
    BouncingBallTask,
    IdentitySineTask,
    SawtoothTask,
    TwoSineTask,
    dump_frames,
    fourier_components,
    make_task,
    render_ball_frame,
    sawtooth_wave,
)


def test_fourier_components_known_values():
    vals = fourier_components(25.0, [100.0, 50.0])
    assert vals[0] == pytest.approx(1.0)          # quarter period
    assert vals[1] == pytest.approx(0.0, abs=1e-12)  # half period
    assert fourier_components(0.0, [10.0]) == pytest.approx(0.0)


def test_sawtooth_ramp_endpoints_and_wrap():
    assert sawtooth_wave(0.0, 100.0) == -1.0
    assert sawtooth_wave(50.0, 100.0) == 0.0
    assert sawtooth_wave(99.0, 100.0) == pytest.approx(0.98)
    assert sawtooth_wave(100.0, 100.0) == -1.0
    assert sawtooth_wave(-25.0, 100.0) == pytest.approx(0.5)


def test_two_sine_target_is_component_sum():
    task = TwoSineTask(dt_ms=5.0)
    assert task.in_dim == 2 and task.out_dim == 1
    for step in (0, 17, 123, 4000):
        x = task.x(step)
        assert task.y(step)[0] == pytest.approx(x.sum())
    # component periods are 200 and 400 steps
    assert np.allclose(task.x(0), task.x(400))
    assert np.allclose(task.x(100), [np.sin(2 * np.pi * 0.5), np.sin(2 * np.pi * 0.25)])


def test_sawtooth_task_dimensions_and_period():
    task = SawtoothTask(dt_ms=5.0)
    assert task.in_dim == 50 and task.out_dim == 1
    assert task.periods_ms[0] == 2.0 and task.periods_ms[-1] == 100.0
    assert task.y(0)[0] == -1.0
    assert task.y(5000)[0] == pytest.approx(0.0)   # half of the 10^4-step period
    assert task.y(10_000)[0] == pytest.approx(-1.0)


def test_ball_frame_sums_to_one_at_any_center():
    frame = render_ball_frame(3.0, 4.0)
    assert frame[4, 3] == 1.0
    assert frame.sum() == pytest.approx(1.0)
    frame = render_ball_frame(2.25, 5.75)
    assert frame.sum() == pytest.approx(1.0)
    assert frame[5, 2] == pytest.approx(0.75 * 0.25)
    assert frame[6, 3] == pytest.approx(0.25 * 0.75)


@settings(max_examples=100, deadline=None)
@given(cx=st.floats(0.0, 7.0), cy=st.floats(0.0, 7.0))
def test_ball_frame_intensity_conserved(cx, cy):
    frame = render_ball_frame(cx, cy)
    assert frame.sum() == pytest.approx(1.0, abs=1e-12)
    assert (frame >= 0.0).all()


def test_ball_trajectory_periodic_and_bounded():
    task = BouncingBallTask(dt_ms=5.0)
    for step in (0, 333, 9999):
        cx, cy = task.center(step)
        assert 0.0 <= cx <= 7.0 and 0.0 <= cy <= 7.0
        px, py = task.center(step + 45_000)
        assert cx == pytest.approx(px, abs=1e-9)
        assert cy == pytest.approx(py, abs=1e-9)
    # the trajectory actually moves
    assert task.center(0) != task.center(250)


def test_ball_input_concatenates_lagged_frames():
    task = BouncingBallTask(dt_ms=5.0)
    assert task.in_dim == 128 and task.out_dim == 64
    x = task.x(1000)
    assert np.allclose(x[:64], task.frame(200).ravel())
    assert np.allclose(x[64:], task.frame(500).ravel())
    assert np.allclose(task.y(1000), task.frame(1000).ravel())


def test_ball_reflection_off_walls():
    task = BouncingBallTask(dt_ms=5.0, start=(6.9, 0.0), speed=(0.05, -0.03))
    xs = [task.center(s)[0] for s in range(100)]
    ys = [task.center(s)[1] for s in range(100)]
    assert max(xs) <= 7.0 and min(ys) >= 0.0
    # x rises to the wall then comes back
    peak = int(np.argmax(xs))
    assert 0 < peak < 99
    assert xs[peak + 1] < xs[peak]


def test_identity_sine_passthrough():
    task = IdentitySineTask(dt_ms=1.0)
    for step in (0, 7, 110):
        assert task.y(step) == pytest.approx(task.x(step))
    assert np.allclose(task.x(0), task.x(100))


def test_make_task_dispatch_and_errors():
    task = make_task("two_sine", 5.0, {"periods_steps": (100, 300)})
    assert isinstance(task, TwoSineTask)
    assert task.periods_ms.tolist() == [500.0, 1500.0]
    with pytest.raises(ValueError, match="unknown task"):
        make_task("nope", 5.0, {})


def test_dump_frames_csv_and_pgm(tmp_path):
    task = BouncingBallTask(dt_ms=5.0)
    (csv_path,) = dump_frames(task, [0, 5], tmp_path / "csv")
    lines = open(csv_path).read().strip().split("\n")
    assert lines[0].startswith("step,px_0")
    assert len(lines) == 3
    paths = dump_frames(task, [3], tmp_path / "pgm", fmt="pgm")
    head = open(paths[0]).read().split("\n")[:2]
    assert head[0] == "P2" and head[1] == "8 8"
    with pytest.raises(ValueError):
        dump_frames(task, [0], tmp_path / "bad", fmt="png")
