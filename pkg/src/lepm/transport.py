"""Delay lines and exponential smoothing for transmitted signals.

Every inter-neuron signal in the simulator travels through a delay line: a
ring buffer holding the most recent values of one sender stream, one entry
per simulation step.  Receivers read the line with their own per-connection
delay, so a single line serves many connections that share a writer.
"""

from __future__ import annotations

import numpy as np


class DelayLineError(RuntimeError):
    """Misuse of a delay line (capacity overrun, out-of-order push, future read)."""


class DelayLine:
    """Fixed-capacity history of one vector-valued signal stream.

    Pushes are strictly sequential (step ``n`` follows step ``n - 1``; the
    first push is step 0).  A read at step ``t`` with delay ``d`` returns the
    value pushed at step ``t - d``.  Steps before the first push read as
    ``fill_value`` and are reported as pre-history; steps that were pushed but
    have since been evicted raise, because that means the line was sized too
    small for one of its consumers.

    Parameters
    ----------
    capacity : int
        Number of most recent steps retained.  Must cover the largest delay
        plus any extra lag a reader applies on top of it.
    width : int
        Length of the vector stored per step (1 for a scalar connection).
    fill_value : float
        Value returned for pre-history reads.
    """

    def __init__(self, capacity, width=1, fill_value=0.0):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        if width < 1:
            raise ValueError("width must be >= 1")
        self.capacity = int(capacity)
        self.width = int(width)
        self.fill_value = float(fill_value)
        self._buf = np.full((self.capacity, self.width), self.fill_value)
        self._latest = -1

    @property
    def latest_step(self):
        """Most recent pushed step, or -1 before the first push."""
        return self._latest

    def push(self, step, value):
        """Append the value sent at ``step``.

        Steps must arrive in order with no gaps.
        """
        if step != self._latest + 1:
            raise DelayLineError(
                f"out-of-order push: got step {step}, expected {self._latest + 1}"
            )
        row = np.asarray(value, dtype=float)
        if row.shape != (self.width,):
            row = row.reshape(self.width)
        self._buf[step % self.capacity] = row
        self._latest = step

    def read(self, step, delay_steps):
        """Value sent at ``step - delay_steps`` as a ``(width,)`` array."""
        value, _ = self.read_info(step, delay_steps)
        return value

    def read_info(self, step, delay_steps):
        """Like :meth:`read`, also reporting whether the read was pre-history."""
        if delay_steps < 0:
            raise DelayLineError(f"negative delay {delay_steps}")
        if delay_steps >= self.capacity:
            raise DelayLineError(
                f"delay {delay_steps} >= capacity {self.capacity}"
            )
        target = step - delay_steps
        if target < 0:
            return np.full(self.width, self.fill_value), True
        self._check_retained(target)
        return self._buf[target % self.capacity].copy(), False

    def take(self, steps, cols):
        """Gather entries at absolute ``steps`` and channel ``cols``.

        ``steps`` and ``cols`` are broadcast against each other; negative
        steps read as ``fill_value``.  Returns ``(values, prehistory_mask)``.
        """
        steps = np.asarray(steps)
        cols = np.asarray(cols)
        steps, cols = np.broadcast_arrays(steps, cols)
        pre = steps < 0
        self._check_retained(np.where(pre, self._latest, steps))
        values = self._buf[steps % self.capacity, cols]
        if pre.any():
            values = np.where(pre, self.fill_value, values)
        return values, pre

    def _check_retained(self, target):
        hi = np.max(target)
        if hi > self._latest:
            raise DelayLineError(
                f"read of step {hi} ahead of latest push {self._latest}"
            )
        lo = np.min(target)
        if lo <= self._latest - self.capacity:
            raise DelayLineError(
                f"step {lo} evicted (latest {self._latest}, capacity {self.capacity})"
            )


class Smoother:
    """First-order exponential smoother ``y <- alpha*x + (1 - alpha)*y``.

    ``alpha = 1`` disables smoothing.  The first update returns the raw input
    unchanged; state adopts the shape of that input.
    """

    def __init__(self, alpha):
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"smoothing factor must be in (0, 1], got {alpha}")
        self.alpha = float(alpha)
        self._state = None

    def update(self, raw):
        raw = np.asarray(raw, dtype=float)
        if self._state is None:
            self._state = raw.copy()
        else:
            self._state = self.alpha * raw + (1.0 - self.alpha) * self._state
        return self._state.copy()

    def reset(self):
        self._state = None
