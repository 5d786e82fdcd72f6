"""Prospective-messaging compensators.

Every non-input unit receives each of its incoming signals after a
per-connection delay.  A compensator turns the delayed stream into an
estimate of the *current* value of each channel:

* identity: use the most recently received value (no compensation);
* linear extrapolation: project the latest value forward along a
  finite-difference velocity estimate;
* predictor net: a small dense network per unit, trained online on
  (delayed window -> later arrival) pairs drawn from a replay window.

Units are processed in groups (one group per network layer); arrays carry a
leading group axis so a group of ``n`` units with ``C`` channels each reads
``(n, C)`` blocks.  A single unit is simply a group of one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mlp import StackedDenseNet, make_optimizer
from .transport import Smoother


class SignalHistory:
    """Read access to one group's incoming channels across its delay lines.

    A group's channels are the concatenation of one or more bundles; each
    bundle is backed by a delay line plus, per unit, a column map (which
    line column the unit reads) and an integer delay matrix.  Channel order
    is bundle order, which is fixed by the network (forward channels first,
    then feedback), and all reads here preserve it.

    ``lags`` are the predictor-net input offsets rho_1..rho_H in steps,
    applied on top of each channel's own delay; windows are laid out
    lag-major: column ``h * C + c`` holds channel ``c`` at lag ``rho_h``.
    """

    def __init__(self, bundles, lags, dt_ms):
        # bundles: list of (line, colmap (n, C_b) int, delays (n, C_b) int)
        self.bundles = [
            (line, np.asarray(cols, dtype=int), np.asarray(dl, dtype=int))
            for line, cols, dl in bundles
        ]
        n = self.bundles[0][1].shape[0]
        for _, cols, dl in self.bundles:
            if cols.shape[0] != n or dl.shape != cols.shape:
                raise ValueError("inconsistent bundle shapes")
        self.n_units = n
        self.lags = np.asarray(lags, dtype=int)
        self.dt_ms = float(dt_ms)
        self.delays = np.concatenate([dl for _, _, dl in self.bundles], axis=1)
        self.n_channels = self.delays.shape[1]
        # earliest step at which a full training pair exists, per unit
        self.first_pair_step = 2 * self.delays.max(axis=1) + int(self.lags.max())

    def _gather(self, step_arrays):
        """Read all channels at per-bundle absolute steps of shape ``(n, C_b)``."""
        vals, pre = [], []
        for (line, cols, _), steps in zip(self.bundles, step_arrays):
            v, p = line.take(steps, cols)
            vals.append(v)
            pre.append(p)
        return np.concatenate(vals, axis=-1), np.concatenate(pre, axis=-1)

    def _steps(self, step, factor, offset):
        """Per-bundle absolute step arrays ``step - factor*delay - offset``."""
        out = []
        for _, _, dl in self.bundles:
            out.append(step - factor * dl - offset)
        return out

    def latest(self, step):
        """Most recent arrival per channel: value sent at step - delay.

        Returns ``(values, prehistory)`` arrays of shape ``(n, C)``.
        """
        return self._gather(self._steps(step, 1, 0))

    def at_extra_lag(self, step, extra_steps):
        """Arrival ``extra_steps`` further back: value from step - delay - extra."""
        return self._gather(self._steps(step, 1, extra_steps))

    def window(self, step, factor=1):
        """Lagged input window for the predictor nets, shape ``(n, H*C)``.

        ``factor=1`` gives the inference window (lags behind each arrival);
        ``factor=2`` the training-pair input window.
        """
        rho = self.lags.reshape(1, -1, 1)
        vals = []
        for line, cols, dl in self.bundles:
            steps = step - factor * dl[:, None, :] - rho
            v, _ = line.take(steps, cols[:, None, :])
            vals.append(v)
        x = np.concatenate(vals, axis=-1)  # (n, H, C)
        return x.reshape(self.n_units, -1)

    def pair(self, step):
        """Training pair formed at ``step``: ``(X, Y, valid)``.

        ``X`` is the window at twice each channel's delay, ``Y`` the arrival
        at the plain delay; ``valid`` marks units whose history is deep
        enough that no pre-history fill leaked into the pair.
        """
        x = self.window(step, factor=2)
        y, _ = self.latest(step)
        return x, y, step >= self.first_pair_step

    def pairs_at(self, steps):
        """Materialize pairs formed at ``steps`` (shape ``(n, B)`` per unit).

        Returns ``X (n, B, H*C)`` and ``Y (n, B, C)``; callers must pass
        steps at which pairs were valid.
        """
        rho = self.lags.reshape(1, 1, -1, 1)
        xs, ys = [], []
        for line, cols, dl in self.bundles:
            tx = steps[:, :, None, None] - 2 * dl[:, None, None, :] - rho
            vx, _ = line.take(tx, cols[:, None, None, :])
            xs.append(vx)
            ty = steps[:, :, None] - dl[:, None, :]
            vy, _ = line.take(ty, cols[:, None, :])
            ys.append(vy)
        n, b = steps.shape
        x = np.concatenate(xs, axis=-1).reshape(n, b, -1)
        y = np.concatenate(ys, axis=-1)
        return x, y


class ReplayBuffer:
    """Sliding window over the training pairs formed in recent steps.

    Pairs are indexed by the step at which they were formed; the buffer
    retains the most recent ``capacity`` of them (FIFO) and samples
    uniformly with replacement, independently per unit.  Units whose history
    cannot yet form a pair simply have an empty buffer.
    """

    def __init__(self, capacity, first_valid_step):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = int(capacity)
        self.first_valid = np.asarray(first_valid_step, dtype=int)
        self.latest = -1

    def advance(self, step):
        """Record that the pair formed at ``step`` (where valid) is available."""
        self.latest = int(step)

    def counts(self):
        """Number of stored pairs per unit."""
        lo = np.maximum(self.first_valid, self.latest - self.capacity + 1)
        return np.maximum(self.latest - lo + 1, 0)

    def sample(self, rng, batch):
        """Draw ``batch`` pair steps per unit; returns ``(steps, nonempty)``.

        ``steps`` has shape ``(n, batch)``; rows of units with empty buffers
        are filled with ``latest`` and masked out in ``nonempty``.
        """
        lo = np.maximum(self.first_valid, self.latest - self.capacity + 1)
        counts = np.maximum(self.latest - lo + 1, 0)
        nonempty = counts > 0
        u = rng.random((lo.shape[0], batch))
        steps = lo[:, None] + np.floor(u * np.maximum(counts, 1)[:, None]).astype(int)
        steps[~nonempty] = self.latest
        return steps, nonempty


@dataclass
class CompensatorConfig:
    """Configuration shared by all compensator kinds; unused fields ignored."""

    kind: str = "identity"          # identity | linex | net
    # linear extrapolation
    h_steps: int = 1                # finite-difference baseline distance
    smooth_udot: float = 0.5        # EMA factor on the velocity estimate
    # predictor net
    hidden: tuple = (100, 100)
    lags: tuple = (0, 10, 20)       # input offsets rho_1..rho_H in steps
    buffer_steps: int = 500
    batch: int = 1
    lr: float = 0.002
    gain: float = 0.1
    smooth_sbar: float = 0.5        # EMA factor on the compensated output
    optimizer: str = "sgd"
    train_during_test: bool = True

    def history_depth(self, delta_max):
        """Steps of sender history a line must retain for this kind."""
        if self.kind == "identity":
            return int(delta_max)
        if self.kind == "linex":
            return int(delta_max) + int(self.h_steps)
        if self.kind == "net":
            return 2 * int(delta_max) + int(max(self.lags)) + int(self.buffer_steps)
        raise ValueError(f"unknown compensator kind {self.kind!r}")

    def burn_in(self, delta_max):
        """Steps before which fill values may still be circulating."""
        if self.kind == "linex":
            return 2 * int(delta_max) + int(self.h_steps)
        if self.kind == "net":
            return 2 * int(delta_max) + int(max(self.lags))
        return 2 * int(delta_max)


class IdentityCompensator:
    """No compensation: report the most recent arrival per channel."""

    trainable = False

    def __init__(self, hist):
        self.hist = hist

    def compensate(self, step):
        vals, _ = self.hist.latest(step)
        return vals

    def train(self, step, rng):
        return None


class LinExCompensator:
    """First-order extrapolation across each channel's delay.

    The velocity is a backward difference over ``h_steps`` steps, optionally
    EMA-smoothed; while either sample still reads pre-history fill the
    velocity is pinned to zero.  ``compensate`` must be called exactly once
    per step, in order, because the smoother is stateful.
    """

    trainable = False

    def __init__(self, hist, cfg):
        self.hist = hist
        self.h = int(cfg.h_steps)
        if self.h < 1:
            raise ValueError("h_steps must be >= 1")
        self._smoother = Smoother(cfg.smooth_udot)
        self._horizon_ms = hist.delays * hist.dt_ms

    def compensate(self, step):
        newer, pre_new = self.hist.latest(step)
        older, pre_old = self.hist.at_extra_lag(step, self.h)
        vel = (newer - older) / (self.h * self.hist.dt_ms)
        vel[pre_new | pre_old] = 0.0
        vel = self._smoother.update(vel)
        return newer + self._horizon_ms * vel

    def train(self, step, rng):
        return None


class NetCompensator:
    """Per-unit predictor networks with a residual pass-through.

    Each unit owns a dense net mapping its lagged input window to an
    estimate of the current channel values.  The net output is added to the
    least-lagged input (the most recent arrival), so an untrained net with
    small weights starts out as the identity compensator.  Nets train online,
    one optimizer step per simulation step, on pairs sampled uniformly from
    a sliding replay window; output smoothing is applied last and only on
    the inference path.
    """

    trainable = True

    def __init__(self, hist, cfg, rng):
        self.hist = hist
        self.cfg = cfg
        c = hist.n_channels
        dims = (len(hist.lags) * c, *cfg.hidden, c)
        self.net = StackedDenseNet(hist.n_units, dims, cfg.gain, rng)
        self.buffer = ReplayBuffer(cfg.buffer_steps, hist.first_pair_step)
        self.optimizer = make_optimizer(cfg.optimizer, cfg.lr)
        self._smoother = Smoother(cfg.smooth_sbar)
        self.batch = int(cfg.batch)
        self.last_train_loss = np.nan

    def compensate(self, step):
        x = self.hist.window(step)
        raw = self.net.forward(x[:, None, :])[:, 0, :]
        residual, _ = self.hist.latest(step)
        return self._smoother.update(raw + residual)

    def train(self, step, rng):
        """One batch update on replayed pairs; returns the mean batch loss."""
        self.buffer.advance(step)
        steps, nonempty = self.buffer.sample(rng, self.batch)
        if not nonempty.any():
            return None
        x, y = self.hist.pairs_at(steps)
        # the residual add is part of the model, so nets fit y minus the
        # least-lagged input block
        c = self.hist.n_channels
        grads, losses = self.net.backward(x, y - x[:, :, :c])
        if not nonempty.all():
            for g in grads:
                g[~nonempty] = 0.0
            losses = losses[nonempty]
        self.optimizer.step(self.net.params, grads)
        self.last_train_loss = float(losses.mean())
        return self.last_train_loss


def build_compensator(cfg, hist, rng=None):
    """Construct a compensator for one unit group over its signal history."""
    if cfg.kind == "identity":
        return IdentityCompensator(hist)
    if cfg.kind == "linex":
        return LinExCompensator(hist, cfg)
    if cfg.kind == "net":
        if rng is None:
            raise ValueError("net compensator needs an init rng")
        return NetCompensator(hist, cfg, rng)
    raise ValueError(f"unknown compensator kind {cfg.kind!r}")


def compensate_identity(hist, step):
    """Functional form of the identity compensator (latest arrivals)."""
    vals, _ = hist.latest(step)
    return vals


def compensate_linex(hist, step, h_steps, smoother=None):
    """Single linear-extrapolation read; stateless unless a smoother is given."""
    newer, pre_new = hist.latest(step)
    older, pre_old = hist.at_extra_lag(step, h_steps)
    vel = (newer - older) / (h_steps * hist.dt_ms)
    vel[pre_new | pre_old] = 0.0
    if smoother is not None:
        vel = smoother.update(vel)
    return newer + hist.delays * hist.dt_ms * vel


def pmnet_training_pair(hist, step):
    """Functional form of pair construction; see :meth:`SignalHistory.pair`."""
    return hist.pair(step)
