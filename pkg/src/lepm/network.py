"""Latent-equilibrium network dynamics under communication delays.

Neurons carry a membrane potential ``u`` and transmit the prospective
potential ``breve_u = u + tau * du/dt``, which compensates their own membrane
lag.  Every inter-neuron signal (prospective potentials forward, error
signals backward, output-to-loss and gradient-back links) travels through a
delay line and is reconstructed at the receiver by a prospective-messaging
compensator before entering the dynamics:

    e_out    = -beta * compensated gradient signal
    e_hidden = phi'(breve_u) * sum_k W_kj * compensated e_k
    tau du/dt = -u + e + sum_i W_ji * phi(compensated breve_u_i) + b
    dW_ji/dt  = eta_w * phi(compensated breve_u_i) * e_j
    db_j/dt   = eta_b * e_j

Integration is explicit Euler with a shared dt for activations and
parameters.  Membrane trajectories only ever depend on the dt/tau ratio,
so the membrane update divides by tau in units of dt.  Parameter updates
advance by dt in seconds (W += dt_s * dW/dt), making eta_w and eta_b
rates per second of simulated time: refining dt refines the parameter
trajectory instead of rescaling it.

Within a step, prospective potentials are pushed first, then the
loss module runs, then layers are processed top-down so that at zero delay
every receiver sees the value sent in the same step and the whole machine
reduces exactly to an undelayed network.  Weight and bias updates are applied
at the end of the step, so forward and feedback reads of one weight within a
step always agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .compensators import SignalHistory, build_compensator
from .transport import DelayLine, Smoother


class DivergenceError(RuntimeError):
    """Network state left the representable range (NaN/Inf)."""

    def __init__(self, step):
        super().__init__(f"non-finite network state at step {step}")
        self.step = int(step)


class Tanh:
    name = "tanh"

    @staticmethod
    def f(x):
        return np.tanh(x)

    @staticmethod
    def df(x):
        t = np.tanh(x)
        return 1.0 - t * t


class Identity:
    name = "identity"

    @staticmethod
    def f(x):
        return x

    @staticmethod
    def df(x):
        return np.ones_like(x)


def prospective_activation(u, u_dot, tau_ms):
    """Value a neuron sends: its potential advanced tau along its velocity."""
    return u + tau_ms * u_dot


def output_error(beta, ebar):
    """Output-layer error from the compensated gradient signal."""
    return -beta * np.asarray(ebar)


def hidden_error(breve_u, act, w_above, ebar):
    """Hidden-layer error: own gain times back-weighted errors from above.

    ``w_above[k, j]`` is the forward weight j -> k; ``ebar[j, k]`` is unit
    j's compensated copy of e_k.
    """
    return act.df(breve_u) * np.einsum("kj,jk->j", w_above, ebar)


def activation_velocity(u, e, w, phi_vals, b, tau_ms):
    """Membrane velocity: leak plus error nudge plus basal drive plus bias.

    ``phi_vals[j, i]`` is phi applied to unit j's compensated copy of sender
    i's prospective potential.
    """
    basal = np.einsum("ji,ji->j", w, phi_vals)
    return (-u + e + basal + b) / tau_ms


def parameter_velocities(e, phi_vals, eta_w, eta_b):
    """Weight and bias velocities from local error and compensated inputs."""
    return eta_w * e[:, None] * phi_vals, eta_b * e


def loss_module_step(received, target, beta_active):
    """Squared-error loss on the (compensated) received outputs.

    Returns ``(loss, gradient)``; the emitted gradient is identically zero
    while the instructive signal is switched off.
    """
    received = np.asarray(received, dtype=float)
    diff = received - np.asarray(target, dtype=float)
    loss = 0.5 * float(np.dot(diff, diff))
    grad = diff if beta_active else np.zeros_like(diff)
    return loss, grad


@dataclass
class NetworkSpec:
    """Static description of a delayed LE network."""

    layer_sizes: tuple            # (input, hidden..., output)
    tau_ms: float = 10.0
    dt_ms: float = 5.0
    beta: float = 0.1
    eta_w: float = 0.1            # parameter learning rates, per second
    eta_b: float = 0.1
    weight_init_gain: float = 1.0
    smooth_sbar: float = 1.0      # EMA on compensated signal vectors (1 = off)
    smooth_udot: float = 1.0      # EMA on the velocity behind sent potentials

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        if len(self.layer_sizes) < 2:
            raise ValueError("need at least input and output layers")
        if any(s < 1 for s in self.layer_sizes):
            raise ValueError("layer sizes must be positive")
        if self.dt_ms <= 0 or self.tau_ms <= 0:
            raise ValueError("dt and tau must be positive")


@dataclass
class DelayAssignment:
    """Integer step delays for every connection.

    ``forward[l]`` has shape ``(n_l, n_{l-1})`` and holds the delay of the
    connection from sender i in layer l-1 to receiver j in layer l; feedback
    connections reuse the same values (delta_ij == delta_ji).  ``loss`` holds
    the per-output-unit delay of the output <-> loss-module links.
    """

    forward: list
    loss: np.ndarray

    def __post_init__(self):
        self.forward = [np.asarray(m, dtype=int) for m in self.forward]
        self.loss = np.asarray(self.loss, dtype=int)
        if any((m < 0).any() for m in self.forward) or (self.loss < 0).any():
            raise ValueError("delays must be non-negative")

    def feedback_into(self, layer_index):
        """Delays of error signals arriving at ``layer_index`` from above."""
        return self.forward[layer_index + 1].T

    def max_delay(self):
        return int(max(max(int(m.max()) for m in self.forward), int(self.loss.max())))


def constant_delays(layer_sizes, steps):
    """Uniform assignment: every connection carries the same delay."""
    sizes = tuple(layer_sizes)
    fwd = [np.full((sizes[l], sizes[l - 1]), int(steps), dtype=int)
           for l in range(1, len(sizes))]
    return DelayAssignment(fwd, np.full(sizes[-1], int(steps), dtype=int))


class StepResult:
    __slots__ = ("loss", "output", "pm_loss")

    def __init__(self, loss, output, pm_loss):
        self.loss = loss
        self.output = output
        self.pm_loss = pm_loss


class DelayedNetwork:
    """Simulator for one network plus its external loss module.

    Layers are grouped: state arrays, weights and the compensator of layer l
    cover all its units.  ``step`` must be driven with consecutive step
    indices starting at 0.
    """

    def __init__(self, spec, delays, comp_cfg, rng_weights, rng_pm=None,
                 rng_buffer=None):
        self.spec = spec
        self.delays = delays
        self.comp_cfg = comp_cfg
        sizes = spec.layer_sizes
        self.n_layers = len(sizes) - 1          # non-input layers
        n_out = sizes[-1]
        if len(delays.forward) != self.n_layers:
            raise ValueError("delay assignment does not match layer count")
        for l in range(1, self.n_layers + 1):
            if delays.forward[l - 1].shape != (sizes[l], sizes[l - 1]):
                raise ValueError(f"forward delay shape mismatch at layer {l}")
        if delays.loss.shape != (n_out,):
            raise ValueError("loss delay shape mismatch")

        self.activations = [Identity] + [Tanh] * (self.n_layers - 1) + [Identity]

        self.weights = []
        self.biases = []
        for l in range(1, self.n_layers + 1):
            lim = spec.weight_init_gain / np.sqrt(sizes[l - 1])
            self.weights.append(rng_weights.uniform(-lim, lim, size=(sizes[l], sizes[l - 1])))
            self.biases.append(np.zeros(sizes[l]))

        self.u = [np.zeros(sizes[l]) for l in range(1, self.n_layers + 1)]
        self.u_dot = [np.zeros(sizes[l]) for l in range(1, self.n_layers + 1)]
        self.breve_u = [np.zeros(sizes[l]) for l in range(1, self.n_layers + 1)]
        self.e = [np.zeros(sizes[l]) for l in range(1, self.n_layers + 1)]

        def line(width, delta_max):
            return DelayLine(comp_cfg.history_depth(int(delta_max)) + 2, width)

        # lines INTO layer l (1-based); feedback exists for l < L
        self._fwd_lines = [line(sizes[l - 1], delays.forward[l - 1].max())
                           for l in range(1, self.n_layers + 1)]
        self._fb_lines = [line(sizes[l + 1], delays.feedback_into(l - 1).max())
                          for l in range(1, self.n_layers)]
        self._out_line = line(n_out, delays.loss.max())
        self._grad_line = line(n_out, delays.loss.max())

        lags = tuple(comp_cfg.lags) if comp_cfg.kind == "net" else (0,)
        full = lambda n, w: np.tile(np.arange(w), (n, 1))
        self._comps = []
        for l in range(1, self.n_layers + 1):
            n = sizes[l]
            bundles = [(self._fwd_lines[l - 1], full(n, sizes[l - 1]),
                        delays.forward[l - 1])]
            if l < self.n_layers:
                bundles.append((self._fb_lines[l - 1], full(n, sizes[l + 1]),
                                delays.feedback_into(l - 1)))
            else:
                bundles.append((self._grad_line, np.arange(n)[:, None],
                                delays.loss[:, None]))
            hist = SignalHistory(bundles, lags, spec.dt_ms)
            self._comps.append(build_compensator(comp_cfg, hist, rng_pm))
        loss_hist = SignalHistory(
            [(self._out_line, full(1, n_out), delays.loss[None, :])], lags, spec.dt_ms
        )
        self._loss_comp = build_compensator(comp_cfg, loss_hist, rng_pm)

        self._sbar_smooth = ([Smoother(spec.smooth_sbar) for _ in range(self.n_layers)]
                             if spec.smooth_sbar < 1.0 else None)
        self._udot_smooth = ([Smoother(spec.smooth_udot) for _ in range(self.n_layers)]
                             if spec.smooth_udot < 1.0 else None)
        self._rng_buffer = rng_buffer
        self._next_step = 0

    @property
    def out_dim(self):
        return self.spec.layer_sizes[-1]

    def snapshot(self):
        """Copies of the mutable state, keyed for test comparison."""
        return {
            "u": [a.copy() for a in self.u],
            "breve_u": [a.copy() for a in self.breve_u],
            "e": [a.copy() for a in self.e],
            "weights": [w.copy() for w in self.weights],
            "biases": [b.copy() for b in self.biases],
        }

    def step(self, step_idx, x, y, beta, pm_plastic=True):
        """Advance one Euler step; returns a :class:`StepResult`.

        ``beta`` is the current nudging strength (0 during the test phase).
        Raises :class:`DivergenceError` if the state leaves the finite range.
        """
        if step_idx != self._next_step:
            raise RuntimeError(f"expected step {self._next_step}, got {step_idx}")
        self._next_step += 1
        spec = self.spec
        tau = spec.tau_ms / spec.dt_ms      # membrane constant in units of dt
        dt_s = spec.dt_ms / 1000.0          # parameter step, seconds
        beta_active = beta != 0.0

        # broadcast this step's sent potentials
        self._fwd_lines[0].push(step_idx, np.asarray(x, dtype=float))
        for l in range(1, self.n_layers):
            self._fwd_lines[l].push(step_idx, self.breve_u[l - 1])
        output = self.breve_u[self.n_layers - 1].copy()
        self._out_line.push(step_idx, output)

        # external loss module: compensate received outputs, emit gradient
        received = self._loss_comp.compensate(step_idx)[0]
        loss, grad = loss_module_step(received, y, beta_active)
        self._grad_line.push(step_idx, grad)
        pm_loss = None
        if self._loss_comp.trainable and pm_plastic:
            pm_loss = self._loss_comp.train(step_idx, self._rng_buffer)

        # top-down sweep: errors flow before lower layers read them
        new_w = [None] * self.n_layers
        new_b = [None] * self.n_layers
        for l in range(self.n_layers, 0, -1):
            k = l - 1
            comp = self._comps[k]
            vals = comp.compensate(step_idx)
            if self._sbar_smooth is not None:
                vals = self._sbar_smooth[k].update(vals)
            if comp.trainable and pm_plastic:
                comp.train(step_idx, self._rng_buffer)
            n_below = self.spec.layer_sizes[l - 1]
            fwd_vals = vals[:, :n_below]
            fb_vals = vals[:, n_below:]
            if l == self.n_layers:
                e = output_error(beta, fb_vals[:, 0])
            else:
                e = hidden_error(self.breve_u[k], self.activations[l],
                                 self.weights[l], fb_vals)
            self.e[k] = e
            if l >= 2:
                self._fb_lines[l - 2].push(step_idx, e)
            phi_vals = self.activations[l - 1].f(fwd_vals)
            u_dot = activation_velocity(self.u[k], e, self.weights[k], phi_vals,
                                        self.biases[k], tau)
            w_vel, b_vel = parameter_velocities(e, phi_vals, spec.eta_w, spec.eta_b)
            new_w[k] = self.weights[k] + dt_s * w_vel
            new_b[k] = self.biases[k] + dt_s * b_vel
            sent_dot = (self._udot_smooth[k].update(u_dot)
                        if self._udot_smooth is not None else u_dot)
            self.breve_u[k] = prospective_activation(self.u[k], sent_dot, tau)
            self.u[k] = self.u[k] + u_dot
            self.u_dot[k] = u_dot

        self.weights = new_w
        self.biases = new_b

        for k in range(self.n_layers):
            if not (np.isfinite(self.u[k]).all() and np.isfinite(self.breve_u[k]).all()):
                raise DivergenceError(step_idx)
        return StepResult(loss, output, pm_loss)
