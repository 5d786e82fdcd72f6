"""Input/target stream definitions for the experiment suite.

Each task maps an integer simulation step to an input vector ``x`` and a
target vector ``y``; everything is a closed-form function of the step, so
streams are deterministic, restartable and defined for negative times (the
video task looks hundreds of steps into its own past from step 0 onward).
"""

from __future__ import annotations

import numpy as np


def fourier_components(t_ms, periods_ms):
    """Unit-amplitude, zero-phase sines ``sin(2*pi*t/p)`` for each period."""
    t_ms = np.asarray(t_ms, dtype=float)
    periods = np.asarray(periods_ms, dtype=float)
    return np.sin(2.0 * np.pi * t_ms / periods)


def sawtooth_wave(t_ms, period_ms):
    """Rising ramp from -1 to 1 over each period; -1 at t = 0."""
    frac = np.mod(np.asarray(t_ms, dtype=float) / period_ms, 1.0)
    return 2.0 * frac - 1.0


class Task:
    """Deterministic stream of (input, target) pairs indexed by step."""

    name = "task"
    in_dim = 0
    out_dim = 0

    def __init__(self, dt_ms):
        self.dt_ms = float(dt_ms)

    def x(self, step):
        raise NotImplementedError

    def y(self, step):
        raise NotImplementedError


class TwoSineTask(Task):
    """Sum two component sines.

    Inputs are the components themselves; the target is their raw sum.
    Component periods are given in steps (defaults 200 and 400).
    """

    name = "two_sine"

    def __init__(self, dt_ms, periods_steps=(200, 400)):
        super().__init__(dt_ms)
        self.periods_ms = np.asarray(periods_steps, dtype=float) * self.dt_ms
        self.in_dim = len(self.periods_ms)
        self.out_dim = 1

    def x(self, step):
        return fourier_components(step * self.dt_ms, self.periods_ms)

    def y(self, step):
        return np.array([self.x(step).sum()])


class SawtoothTask(Task):
    """Map 50 fast sine components onto a slow sawtooth ramp.

    Component periods are evenly spaced over [2 ms, 100 ms]; the target ramp
    has a 50 s period, i.e. 10^4 steps at the 5 ms default step size.
    """

    name = "sawtooth"

    def __init__(self, dt_ms, n_components=50, component_period_lo_ms=2.0,
                 component_period_hi_ms=100.0, target_period_ms=50_000.0):
        super().__init__(dt_ms)
        self.periods_ms = np.linspace(
            component_period_lo_ms, component_period_hi_ms, n_components
        )
        self.target_period_ms = float(target_period_ms)
        self.in_dim = n_components
        self.out_dim = 1

    def x(self, step):
        return fourier_components(step * self.dt_ms, self.periods_ms)

    def y(self, step):
        return np.atleast_1d(sawtooth_wave(step * self.dt_ms, self.target_period_ms))


def _triangle(z, span):
    """Fold an unbounded coordinate into [0, span] by reflection."""
    m = np.mod(z, 2.0 * span)
    return np.where(m <= span, m, 2.0 * span - m)


def render_ball_frame(cx, cy, size=8):
    """Render a unit-intensity ball at center (cx, cy) with a bilinear footprint.

    The center lives in [0, size-1]^2; intensity is spread over the 2x2 cell
    block around it with bilinear weights, so every frame sums to exactly 1.
    Returns a (size, size) array indexed [row, col] = [y, x].
    """
    frame = np.zeros((size, size))
    ix, iy = int(np.floor(cx)), int(np.floor(cy))
    fx, fy = cx - ix, cy - iy
    for dx, wx in ((0, 1.0 - fx), (1, fx)):
        for dy, wy in ((0, 1.0 - fy), (1, fy)):
            w = wx * wy
            if w > 0.0:
                frame[iy + dy, ix + dx] = w
    return frame


class BouncingBallTask(Task):
    """Next-frame prediction on a deterministic bouncing-ball video.

    One ball moves with constant axis speeds inside an 8x8 frame, reflecting
    elastically off the walls.  The input at step t is the concatenation of
    the frames at t - 800 and t - 500 (128 values); the target is the frame
    at t (64 values).  Default speeds make the trajectory exactly periodic
    with period lcm(360, 625) = 45000 steps.
    """

    name = "bouncing_ball"

    def __init__(self, dt_ms, size=8, input_lags=(800, 500),
                 start=(1.3, 4.1), speed=(14.0 / 360.0, 14.0 / 625.0)):
        super().__init__(dt_ms)
        self.size = int(size)
        self.input_lags = tuple(int(l) for l in input_lags)
        self.start = (float(start[0]), float(start[1]))
        self.speed = (float(speed[0]), float(speed[1]))
        self.in_dim = self.size * self.size * len(self.input_lags)
        self.out_dim = self.size * self.size

    def center(self, step):
        """Ball center at an arbitrary (possibly negative) step."""
        span = float(self.size - 1)
        cx = _triangle(self.start[0] + self.speed[0] * step, span)
        cy = _triangle(self.start[1] + self.speed[1] * step, span)
        return float(cx), float(cy)

    def frame(self, step):
        return render_ball_frame(*self.center(step), size=self.size)

    def x(self, step):
        return np.concatenate([self.frame(step - l).ravel() for l in self.input_lags])

    def y(self, step):
        return self.frame(step).ravel()


class IdentitySineTask(Task):
    """Scalar sine passthrough: the target equals the input."""

    name = "identity_sine"

    def __init__(self, dt_ms, period_ms=100.0):
        super().__init__(dt_ms)
        self.period_ms = float(period_ms)
        self.in_dim = 1
        self.out_dim = 1

    def x(self, step):
        return np.atleast_1d(fourier_components(step * self.dt_ms, [self.period_ms]))

    def y(self, step):
        return self.x(step)


_TASKS = {
    "two_sine": TwoSineTask,
    "sawtooth": SawtoothTask,
    "bouncing_ball": BouncingBallTask,
    "identity_sine": IdentitySineTask,
}


def make_task(name, dt_ms, params=None):
    """Instantiate a task by config name with optional keyword overrides."""
    try:
        cls = _TASKS[name]
    except KeyError:
        raise ValueError(
            f"unknown task {name!r}; expected one of {sorted(_TASKS)}"
        ) from None
    return cls(dt_ms, **(params or {}))


def dump_frames(task, steps, out_dir, fmt="csv"):
    """Write video frames for inspection.

    ``fmt='csv'`` writes one row per step (step index followed by the
    row-major frame); ``fmt='pgm'`` writes one plain-text portable graymap
    per step, scaled to an 8-bit range.
    """
    import os

    os.makedirs(out_dir, exist_ok=True)
    if fmt == "csv":
        path = os.path.join(out_dir, "frames.csv")
        with open(path, "w") as fh:
            cols = ",".join(f"px_{i}" for i in range(task.out_dim))
            fh.write(f"step,{cols}\n")
            for s in steps:
                vals = ",".join(str(float(v)) for v in task.y(s))
                fh.write(f"{s},{vals}\n")
        return [path]
    if fmt == "pgm":
        paths = []
        for s in steps:
            frame = task.frame(s)
            px = np.clip(np.rint(frame * 255.0), 0, 255).astype(int)
            path = os.path.join(out_dir, f"frame_{s:08d}.pgm")
            with open(path, "w") as fh:
                fh.write(f"P2\n{frame.shape[1]} {frame.shape[0]}\n255\n")
                for row in px:
                    fh.write(" ".join(str(v) for v in row) + "\n")
            paths.append(path)
        return paths
    raise ValueError(f"unknown frame format {fmt!r}")
