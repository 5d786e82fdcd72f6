"""Measurement routines backing the acceptance tests.

These mirror the unit-level checks but return the measured quantities
instead of asserting, so the acceptance layer can print them alongside
its pass/fail verdicts.
"""

import numpy as np

from lepm.compensators import (CompensatorConfig, SignalHistory,
                               build_compensator, compensate_linex)
from lepm.mlp import DenseNet
from lepm.network import DelayedNetwork, NetworkSpec, constant_delays
from lepm.tasks import TwoSineTask
from lepm.transport import DelayLine

from _reference import UndelayedLE


def zero_delay_deviation(steps: int = 10_000) -> float:
    """Worst per-step |delayed - undelayed| over states and outputs."""
    sizes = (2, 10, 1)
    spec = NetworkSpec(layer_sizes=sizes, eta_w=0.4, eta_b=0.4)
    ss = np.random.SeedSequence(0)
    rw, rp, rb = [np.random.default_rng(s) for s in ss.spawn(3)]
    net = DelayedNetwork(spec, constant_delays(sizes, 0),
                         CompensatorConfig(kind="identity"),
                         rw, rng_pm=rp, rng_buffer=rb)
    ref = UndelayedLE(sizes, net.weights, net.biases,
                      tau_ms=spec.tau_ms, dt_ms=spec.dt_ms,
                      eta_w=spec.eta_w, eta_b=spec.eta_b)
    task = TwoSineTask(spec.dt_ms)
    worst = 0.0
    for n in range(steps):
        x, y = task.x(n), task.y(n)
        beta = 0.1 if n < int(steps * 0.8) else 0.0
        res = net.step(n, x, y, beta)
        ref_loss, ref_out = ref.step(x, y, beta)
        worst = max(worst, abs(res.loss - ref_loss),
                    float(np.max(np.abs(res.output - ref_out))))
    for k in range(len(sizes) - 1):
        worst = max(worst, float(np.max(np.abs(net.weights[k] - ref.weights[k]))),
                    float(np.max(np.abs(net.u[k] - ref.u[k]))))
    return worst


def delay_line_bulk_check() -> tuple[int, int]:
    """Adversarial push/read schedule vs a plain dict of sent values."""
    rng = np.random.default_rng(7)
    capacity, width = 64, 4
    line = DelayLine(capacity, width)
    history = np.zeros((3000, width))
    ops = 0
    mismatches = 0
    for n in range(3000):
        row = rng.normal(size=width)
        line.push(n, row)
        history[n] = row
        ops += 1
        delays = rng.integers(0, capacity, size=170)
        cols = rng.integers(0, width, size=170)
        vals, pre = line.take(n - delays, cols)
        targets = n - delays
        expect = np.where(targets < 0, 0.0,
                          history[np.maximum(targets, 0), cols])
        mismatches += int((vals != expect).sum())
        mismatches += int((pre != (targets < 0)).sum())
        ops += 2 * len(delays)
    return ops, mismatches


def gradcheck_many(n_nets: int = 100) -> float:
    """Worst central-difference relative error across random small nets."""
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(n_nets):
        depth = rng.integers(1, 4)
        dims = [int(rng.integers(1, 5)) for _ in range(depth + 1)]
        net = DenseNet(dims, gain=1.0, rng=rng)
        batch = int(rng.integers(1, 4))
        x = rng.normal(size=(batch, dims[0]))
        target = rng.normal(size=(batch, dims[-1]))
        analytic, _ = net.backward(x, target)
        numeric = _central_difference(net, x, target)
        for a, n_ in zip(analytic, numeric):
            denom = np.maximum(np.abs(a) + np.abs(n_), 1e-8)
            worst = max(worst, float((np.abs(a - n_) / denom).max()))
    return worst


def _central_difference(net, x, target, eps=1e-5):
    grads = []
    for p in net.params:
        g = np.zeros_like(p)
        flat, gflat = p.ravel(), g.ravel()
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + eps
            _, up = net.backward(x, target)
            flat[i] = old - eps
            _, down = net.backward(x, target)
            flat[i] = old
            gflat[i] = (up - down) / (2 * eps)
        grads.append(g)
    return grads


def linex_exactness() -> tuple[float, bool, str]:
    """Affine recovery error and quadratic-undershoot closed form."""
    line = DelayLine(128, width=2)
    hist = SignalHistory([(line, [[0, 1]], [[3, 9]])], (0,), dt_ms=5.0)
    a, b = 0.7, -0.35
    for n in range(40):
        v = a + b * n
        line.push(n, [v, v])
    affine_err = 0.0
    for step in (15, 25, 39):
        got = compensate_linex(hist, step, h_steps=1)
        affine_err = max(affine_err, float(np.abs(got - (a + b * step)).max()))

    # quadratic input, delay d and difference horizon h: prediction lags
    # the true value by exactly d*(d+h) in the second difference
    d, h = 4, 1
    line2 = DelayLine(64, width=1)
    hist2 = SignalHistory([(line2, [[0]], [[d]])], (0,), dt_ms=1.0)
    for n in range(30):
        line2.push(n, [float(n * n)])
    step = 25
    got = float(compensate_linex(hist2, step, h_steps=h)[0, 0])
    undershoot = step * step - got
    expect = d * (d + h)
    quad_ok = abs(undershoot - expect) < 1e-9
    return affine_err, quad_ok, f"{undershoot:.6g} (closed form {expect})"


def longest_quiet_run(grads, tol: float) -> int:
    best = cur = 0
    for g in grads:
        cur = cur + 1 if abs(g) < tol else 0
        best = max(best, cur)
    return best


def residual_dominance() -> tuple[float, float, float, float]:
    """Untrained predictor-net deviation from its residual anchor."""
    def max_dev(gain):
        cfg = CompensatorConfig(kind="net", hidden=(20,), lags=(0, 5, 10),
                                gain=gain, lr=0.0, batch=4, buffer_steps=400)
        line = DelayLine(cfg.history_depth(5) + 2, width=1)
        hist = SignalHistory([(line, [[0]], [[5]])], (0, 5, 10), dt_ms=5.0)
        comp = build_compensator(cfg, hist, np.random.default_rng(0))
        devs = []
        for n in range(300):
            line.push(n, [np.sin(2 * np.pi * n / 200.0)])
            out = comp.compensate(n)[0, 0]
            latest = hist.latest(n)[0][0, 0]
            devs.append(abs(out - latest))
        return float(np.max(devs))

    rms = float(np.sqrt(np.mean(
        np.square(np.sin(2 * np.pi * np.arange(300) / 200.0)))))
    dev_hi = max_dev(0.1)
    dev_lo = max_dev(0.01)
    bound = 1.5 * (dev_hi / 0.1) * 0.01
    return dev_hi, rms, dev_lo, bound
