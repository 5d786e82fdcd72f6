"""Comparing the three receive-side delay compensators on one signal.

A receiver 8 steps behind a drifting sine reconstructs the sender's
current value three ways: identity (no compensation, just the stale
read), linear extrapolation from a finite-difference velocity, and a
small predictor net trained online from its replay buffer.
"""

import numpy as np

from lepm.compensators import CompensatorConfig, SignalHistory, build_compensator
from lepm.transport import DelayLine

DELAY = 8
STEPS = 20_000
rng = np.random.default_rng(0)


def signal(n):
    # smooth component plus a sawtooth: the wrap-around defeats pure
    # extrapolation but is learnable from history
    return np.sin(2 * np.pi * n / 160.0) + 0.35 * (2.0 * ((n / 90.0) % 1.0) - 1.0)


def fresh_history(cfg):
    line = DelayLine(cfg.history_depth(DELAY) + 2, width=1)
    hist = SignalHistory([(line, [[0]], [[DELAY]])], cfg.lags, dt_ms=5.0)
    return line, hist


results = {}
for kind in ("identity", "linex", "net"):
    cfg = CompensatorConfig(kind=kind, h_steps=1, smooth_udot=0.5,
                            hidden=(30,), lags=(0, 4, 8), buffer_steps=500,
                            batch=8, lr=0.02, gain=0.1, smooth_sbar=1.0)
    line, hist = fresh_history(cfg)
    comp = build_compensator(cfg, hist, np.random.default_rng(1))
    errs = []
    for n in range(STEPS):
        line.push(n, [signal(n)])
        est = comp.compensate(n)[0, 0]
        if comp.trainable:
            comp.train(n, rng)
        if n > STEPS // 2:  # judge after the net has had data to learn from
            errs.append(abs(est - signal(n)))
    results[kind] = float(np.mean(errs))

print(f"stale read lag: {DELAY} steps")
for kind, err in results.items():
    print(f"{kind:>8}: mean |estimate - true current value| = {err:.5f}")
print("identity pays the full staleness cost; both compensators remove "
      "most of it. On full network signals the learned predictor keeps "
      "improving as training continues, which is what the two-sine and "
      "sawtooth experiments measure.")
