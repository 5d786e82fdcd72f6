"""Brute-force delayed dynamics with identity compensation.

Every sent value is appended to a plain Python list per sender; receivers
index those lists with their own per-connection delays, reading 0.0 before
history begins.  All contractions are explicit scalar loops.  Slow and
obvious on purpose: this is the ground truth for the delay bookkeeping of
the vectorized simulator, so it shares no code with it.
"""

import math


def _phi(is_hidden, v):
    return math.tanh(v) if is_hidden else v


def _dphi(is_hidden, v):
    if is_hidden:
        t = math.tanh(v)
        return 1.0 - t * t
    return 1.0


class NaiveDelayedLE:
    """Delayed network + loss node, identity compensation only.

    ``fwd_delays[l][j][i]`` is the delay (steps) from sender i in layer l to
    receiver j in layer l+1 (0-based layers, layer 0 = input); feedback uses
    the transposed entries; ``loss_delays[c]`` covers the output<->loss links.
    """

    def __init__(self, layer_sizes, weights, biases, fwd_delays, loss_delays,
                 tau_ms=10.0, dt_ms=5.0, eta_w=0.1, eta_b=0.1):
        self.sizes = list(layer_sizes)
        self.L = len(self.sizes) - 1
        self.w = [[[float(weights[l][j][i]) for i in range(self.sizes[l])]
                   for j in range(self.sizes[l + 1])] for l in range(self.L)]
        self.b = [[float(biases[l][j]) for j in range(self.sizes[l + 1])]
                  for l in range(self.L)]
        self.fwd_delays = fwd_delays
        self.loss_delays = list(loss_delays)
        self.tau = tau_ms / dt_ms
        self.dt_s = dt_ms / 1000.0
        self.eta_w = eta_w
        self.eta_b = eta_b
        self.u = [[0.0] * self.sizes[l + 1] for l in range(self.L)]
        self.breve = [[0.0] * self.sizes[l + 1] for l in range(self.L)]
        # sent histories: x_hist[t][i], breve_hist[l][t][j], e_hist[l][t][j],
        # out_hist[t][c], grad_hist[t][c]
        self.x_hist = []
        self.breve_hist = [[] for _ in range(self.L)]
        self.e_hist = [[] for _ in range(self.L)]
        self.out_hist = []
        self.grad_hist = []

    @staticmethod
    def _read(hist, t, col):
        if t < 0:
            return 0.0
        return hist[t][col]

    def step(self, t, x, y, beta):
        L = self.L
        self.x_hist.append([float(v) for v in x])
        for l in range(L):
            self.breve_hist[l].append(list(self.breve[l]))
            self.e_hist[l].append(None)   # filled during the sweep
        self.out_hist.append(list(self.breve[L - 1]))

        received = [self._read(self.out_hist, t - self.loss_delays[c], c)
                    for c in range(self.sizes[L])]
        loss = 0.5 * sum((r - float(yc)) ** 2 for r, yc in zip(received, y))
        grad = [r - float(yc) if beta != 0.0 else 0.0
                for r, yc in zip(received, y)]
        self.grad_hist.append(grad)

        new_w = [None] * L
        new_b = [None] * L
        for l in range(L, 0, -1):
            k = l - 1
            n_j = self.sizes[l]
            n_i = self.sizes[l - 1]
            hidden = l < L
            if l == L:
                e = [-beta * self._read(self.grad_hist, t - self.loss_delays[j], j)
                     for j in range(n_j)]
            else:
                e = []
                for j in range(n_j):
                    acc = 0.0
                    for kk in range(self.sizes[l + 1]):
                        d = self.fwd_delays[l][kk][j]   # feedback reuses forward delay
                        acc += self.w[l][kk][j] * self._read(self.e_hist[l], t - d, kk)
                    e.append(_dphi(True, self.breve[k][j]) * acc)
            self.e_hist[k][t] = list(e)

            below_hidden = l - 1 >= 1
            if l == 1:
                read_below = lambda tt, i: self._read(self.x_hist, tt, i)
            else:
                hist_below = self.breve_hist[l - 2]
                read_below = lambda tt, i: self._read(hist_below, tt, i)
            phi_vals = [[_phi(below_hidden,
                              read_below(t - self.fwd_delays[l - 1][j][i], i))
                         for i in range(n_i)] for j in range(n_j)]
            nw = [[self.w[k][j][i] + self.dt_s * self.eta_w * e[j] * phi_vals[j][i]
                   for i in range(n_i)] for j in range(n_j)]
            nb = [self.b[k][j] + self.dt_s * self.eta_b * e[j] for j in range(n_j)]
            new_w[k] = nw
            new_b[k] = nb
            for j in range(n_j):
                basal = sum(self.w[k][j][i] * phi_vals[j][i] for i in range(n_i))
                u_dot = (-self.u[k][j] + e[j] + basal + self.b[k][j]) / self.tau
                self.breve[k][j] = self.u[k][j] + self.tau * u_dot
                self.u[k][j] = self.u[k][j] + u_dot
        self.w = new_w
        self.b = new_b
        return loss, self.out_hist[t]
