"""Dense networks with tanh hidden layers, identity output, analytic gradients.

Two variants share the same math: :class:`DenseNet` is a single network;
:class:`StackedDenseNet` evaluates ``n`` independent same-shaped networks in
one batched call (leading axis = network index), which is how per-neuron
predictor nets are run efficiently.  All arithmetic is double precision.

Training loss everywhere is ``0.5 * ||y - target||^2`` per sample, averaged
over the batch.
"""

from __future__ import annotations

import numpy as np


def _uniform_fan_in(rng, gain, fan_out, fan_in, lead=()):
    lim = gain / np.sqrt(fan_in)
    return rng.uniform(-lim, lim, size=(*lead, fan_out, fan_in))


class SGD:
    """Plain gradient step ``p <- p - lr * g``."""

    def __init__(self, lr):
        self.lr = float(lr)

    def step(self, params, grads):
        for p, g in zip(params, grads):
            p -= self.lr * g


class Adam:
    """Adaptive-moment estimation; available behind config, off by default."""

    def __init__(self, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = float(lr)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self._m = None
        self._v = None
        self._t = 0

    def step(self, params, grads):
        if self._m is None:
            self._m = [np.zeros_like(p) for p in params]
            self._v = [np.zeros_like(p) for p in params]
        self._t += 1
        b1, b2 = self.beta1, self.beta2
        for p, g, m, v in zip(params, grads, self._m, self._v):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            mhat = m / (1 - b1 ** self._t)
            vhat = v / (1 - b2 ** self._t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


def make_optimizer(kind, lr):
    if kind == "sgd":
        return SGD(lr)
    if kind == "adam":
        return Adam(lr)
    raise ValueError(f"unknown optimizer {kind!r}")


class DenseNet:
    """Fully connected net: tanh on hidden layers, identity on the output.

    Weights start uniform in ``+-gain/sqrt(fan_in)``, biases at zero.
    """

    def __init__(self, dims, gain, rng):
        if len(dims) < 2:
            raise ValueError("need at least input and output dims")
        self.dims = tuple(int(d) for d in dims)
        self.weights = [
            _uniform_fan_in(rng, gain, fo, fi)
            for fi, fo in zip(self.dims[:-1], self.dims[1:])
        ]
        self.biases = [np.zeros(fo) for fo in self.dims[1:]]

    @property
    def params(self):
        return self.weights + self.biases

    def forward(self, x):
        """Evaluate on ``(batch, in)`` or ``(in,)`` input."""
        y, _ = self._forward_cached(np.asarray(x, dtype=float))
        return y

    def _forward_cached(self, x):
        squeeze = x.ndim == 1
        h = x[None, :] if squeeze else x
        acts = [h]
        last = len(self.weights) - 1
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w.T + b
            if k != last:
                h = np.tanh(h)
            acts.append(h)
        return (acts[-1][0] if squeeze else acts[-1]), acts

    def backward(self, x, target):
        """Gradients of the batch-mean loss; returns ``(grads, loss)``.

        ``grads`` is ordered like :attr:`params` (weights then biases).
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        target = np.atleast_2d(np.asarray(target, dtype=float))
        y, acts = self._forward_cached(x)
        batch = x.shape[0]
        diff = y - target
        loss = 0.5 * float(np.sum(diff * diff)) / batch
        delta = diff / batch
        gw = [None] * len(self.weights)
        gb = [None] * len(self.biases)
        for k in range(len(self.weights) - 1, -1, -1):
            gw[k] = delta.T @ acts[k]
            gb[k] = delta.sum(axis=0)
            if k > 0:
                # acts[k] is the tanh output of layer k for hidden layers
                delta = (delta @ self.weights[k]) * (1.0 - acts[k] ** 2)
        return gw + gb, loss


class StackedDenseNet:
    """``count`` independent DenseNets evaluated with batched matmuls.

    Weight arrays carry a leading network axis: ``(count, fan_out, fan_in)``.
    Inputs are ``(count, batch, in)``; every network sees only its own slice.
    """

    def __init__(self, count, dims, gain, rng):
        self.count = int(count)
        self.dims = tuple(int(d) for d in dims)
        self.weights = [
            _uniform_fan_in(rng, gain, fo, fi, lead=(self.count,))
            for fi, fo in zip(self.dims[:-1], self.dims[1:])
        ]
        self.biases = [np.zeros((self.count, fo)) for fo in self.dims[1:]]

    @property
    def params(self):
        return self.weights + self.biases

    def forward(self, x):
        y, _ = self._forward_cached(np.asarray(x, dtype=float))
        return y

    def _forward_cached(self, x):
        h = x
        acts = [h]
        last = len(self.weights) - 1
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w.transpose(0, 2, 1) + b[:, None, :]
            if k != last:
                h = np.tanh(h)
            acts.append(h)
        return acts[-1], acts

    def backward(self, x, target):
        """Per-net gradients and per-net batch-mean losses.

        ``x`` is ``(count, batch, in)``, ``target`` ``(count, batch, out)``;
        the loss vector has shape ``(count,)``.
        """
        x = np.asarray(x, dtype=float)
        target = np.asarray(target, dtype=float)
        y, acts = self._forward_cached(x)
        batch = x.shape[1]
        diff = y - target
        losses = 0.5 * np.sum(diff * diff, axis=(1, 2)) / batch
        delta = diff / batch
        gw = [None] * len(self.weights)
        gb = [None] * len(self.biases)
        for k in range(len(self.weights) - 1, -1, -1):
            gw[k] = delta.transpose(0, 2, 1) @ acts[k]
            gb[k] = delta.sum(axis=1)
            if k > 0:
                delta = (delta @ self.weights[k]) * (1.0 - acts[k] ** 2)
        return gw + gb, losses
