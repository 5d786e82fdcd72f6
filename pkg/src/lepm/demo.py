"""Three-neuron streaming gradient descent with delayed messages.

A deliberately tiny chain, u1 -> u2 -> u3, trained online while every
inter-neuron message travels through a delay line. With zero delay the
weight gradients reduce to the textbook chain rule; with a delay that is
an appreciable fraction of the input period the gradient estimates are
built from mutually stale signals and oscillate instead of converging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .transport import DelayLine


@dataclass
class DemoTrace:
    """Per-step record emitted by :func:`demo_step`."""

    step: int
    grad_w1: float
    grad_w2: float
    w1: float
    w2: float
    loss: float


class StreamingGDDemo:
    """Scalar two-weight chain trained by delayed streaming gradients.

    Neuron 2 computes u2(t) = w1 * u1(t - delta) from the delayed input
    message; neuron 3 computes u3(t) = w2 * u2(t - delta) and forms the
    residual r(t) = u3(t) - y(t) locally. The gradient for w2 uses the
    delayed activation it received, grad_w2 = r(t) * u2(t - delta). The
    gradient for w1 uses the backward message w2*r, which takes another
    delta steps to arrive: grad_w1 = (w2*r)(t - delta) * u1(t - delta).

    ``read_log``, when enabled, records every delay-line consumption as
    (signal, reader step, source step) so tests can assert exactly which
    past values each gradient was assembled from.
    """

    def __init__(self, delta: int, lr: float = 0.05,
                 w_init: tuple[float, float] = (0.5, 0.5),
                 log_reads: bool = False) -> None:
        if delta < 0:
            raise ValueError("delta must be >= 0")
        self.delta = int(delta)
        self.lr = float(lr)
        self.w1, self.w2 = (float(w) for w in w_init)
        cap = self.delta + 1
        self._u1_line = DelayLine(cap)
        self._u2_line = DelayLine(cap)
        self._wr_line = DelayLine(cap)
        self.read_log: list[tuple[str, int, int]] = [] if log_reads else None
        self._step = 0

    def _read(self, line: DelayLine, name: str, step: int) -> float:
        value = line.read(step, self.delta)
        if self.read_log is not None:
            self.read_log.append((name, step, step - self.delta))
        return float(value[0])

    def step(self, x_t: float, y_t: float) -> DemoTrace:
        """Advance one step; returns the gradient/weight/loss trace row."""
        t = self._step
        self._u1_line.push(t, [x_t])
        u1_del = self._read(self._u1_line, "u1", t)
        u2 = self.w1 * u1_del
        self._u2_line.push(t, [u2])
        u2_del = self._read(self._u2_line, "u2", t)
        u3 = self.w2 * u2_del
        r = u3 - y_t
        loss = 0.5 * r * r
        grad_w2 = r * u2_del
        # the backward message carries the current w2 with the residual
        self._wr_line.push(t, [self.w2 * r])
        grad_w1 = self._read(self._wr_line, "w2r", t) * u1_del
        self.w1 -= self.lr * grad_w1
        self.w2 -= self.lr * grad_w2
        self._step = t + 1
        return DemoTrace(t, grad_w1, grad_w2, self.w1, self.w2, loss)


@dataclass
class DemoResult:
    rows: list[DemoTrace]
    sign_changes: int
    final_small: bool

    @property
    def grads_w1(self) -> list[float]:
        return [row.grad_w1 for row in self.rows]


def sine_input(step: int, period_steps: int = 100) -> float:
    return math.sin(2.0 * math.pi * step / period_steps)


def run_demo(delta: int, steps: int, lr: float = 0.05,
             period_steps: int = 100, tol: float = 1e-3,
             log_reads: bool = False) -> DemoResult:
    """Run the identity-target demo on a sine input.

    ``sign_changes`` counts strict sign flips of the w1 gradient and
    ``final_small`` reports whether |grad_w1| stayed below ``tol`` over
    the last tenth of the run, the operational "converged" flag.
    """
    demo = StreamingGDDemo(delta, lr=lr, log_reads=log_reads)
    rows = []
    for t in range(steps):
        x = sine_input(t, period_steps)
        rows.append(demo.step(x, x))
    grads = [row.grad_w1 for row in rows]
    changes = 0
    prev = 0.0
    for g in grads:
        if g != 0.0 and prev != 0.0 and (g < 0.0) != (prev < 0.0):
            changes += 1
        if g != 0.0:
            prev = g
    tail = grads[-max(1, steps // 10):]
    small = all(abs(g) < tol for g in tail)
    result = DemoResult(rows, changes, small)
    if log_reads:
        result.read_log = demo.read_log
    return result


def write_demo_csv(rows: list[DemoTrace], path: str) -> None:
    with open(path, "w") as fh:
        fh.write("step,grad_w1,grad_w2,w1,w2,loss\n")
        for row in rows:
            fh.write(f"{row.step},{row.grad_w1:.10g},{row.grad_w2:.10g},"
                     f"{row.w1:.10g},{row.w2:.10g},{row.loss:.10g}\n")
