"""Stand-alone undelayed reference dynamics for equivalence tests.

Implements the same continuous-time learning rule as ``lepm.network`` but
with none of the transport machinery: no delay lines, no compensators, no
per-receiver signal copies.  Everything is written directly against the
update equations, so a delayed network in which every connection has zero
delay and identity compensation must reproduce this trajectory.

Reduction contractions use the same einsum signatures as the package (on
broadcast views); anything else would drag in a different floating-point
summation order and turn an exact-equivalence test into a tolerance hunt.
"""

import numpy as np


class UndelayedLE:
    """Minimal undelayed network with the external loss node inlined.

    Parameters are taken over from an existing network so both start from
    identical weights; ``step`` mirrors the package's intra-step ordering
    (output captured first, then errors top-down, parameter updates applied
    at the end of the step).
    """

    def __init__(self, layer_sizes, weights, biases, tau_ms=10.0, dt_ms=5.0,
                 eta_w=0.1, eta_b=0.1):
        self.sizes = tuple(layer_sizes)
        self.n_layers = len(self.sizes) - 1
        self.weights = [np.array(w, dtype=float) for w in weights]
        self.biases = [np.array(b, dtype=float) for b in biases]
        self.tau = tau_ms / dt_ms             # membrane constant in steps
        self.dt_s = dt_ms / 1000.0            # parameter Euler step, seconds
        self.eta_w = eta_w
        self.eta_b = eta_b
        self.u = [np.zeros(s) for s in self.sizes[1:]]
        self.breve_u = [np.zeros(s) for s in self.sizes[1:]]

    @staticmethod
    def _phi(k, n_layers, x):
        # hidden layers tanh, input and output identity
        if 0 < k < n_layers:
            return np.tanh(x)
        return x

    @staticmethod
    def _dphi(k, n_layers, x):
        if 0 < k < n_layers:
            t = np.tanh(x)
            return 1.0 - t * t
        return np.ones_like(x)

    def step(self, x, y, beta):
        L = self.n_layers
        x = np.asarray(x, dtype=float)
        output = self.breve_u[L - 1].copy()
        diff = output - np.asarray(y, dtype=float)
        loss = 0.5 * float(np.dot(diff, diff))
        grad = diff if beta != 0.0 else np.zeros_like(diff)

        sent = [x] + [b.copy() for b in self.breve_u]   # values visible this step
        new_w = [None] * L
        new_b = [None] * L
        e_above = None
        for l in range(L, 0, -1):
            k = l - 1
            if l == L:
                e = -beta * grad
            else:
                ebar = np.broadcast_to(e_above, (self.sizes[l], self.sizes[l + 1]))
                e = self._dphi(l, L, self.breve_u[k]) * np.einsum(
                    "kj,jk->j", self.weights[l], ebar)
            phi_row = self._phi(l - 1, L, sent[l - 1])
            phi_vals = np.broadcast_to(phi_row, (self.sizes[l], self.sizes[l - 1]))
            basal = np.einsum("ji,ji->j", self.weights[k], phi_vals)
            u_dot = (-self.u[k] + e + basal + self.biases[k]) / self.tau
            new_w[k] = self.weights[k] + self.dt_s * (self.eta_w * e[:, None] * phi_vals)
            new_b[k] = self.biases[k] + self.dt_s * (self.eta_b * e)
            self.breve_u[k] = self.u[k] + self.tau * u_dot
            self.u[k] = self.u[k] + u_dot
            e_above = e
        self.weights = new_w
        self.biases = new_b
        return loss, output
