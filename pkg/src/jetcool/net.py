"""Dense feed-forward networks with hand-written backprop and Adam.

Everything here operates on float64 numpy arrays. A network's parameters
live in one flat vector (all weight matrices in layer order, then all bias
vectors in layer order) so optimizers, target-network updates, and
checkpoints can treat the model as a single real vector.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError

_ACTIVATIONS = ("relu", "identity")


@dataclass(frozen=True)
class LayerSpec:
    """One dense layer: y = act(W x + b)."""

    in_dim: int
    out_dim: int
    activation: str = "relu"

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise InputError(f"layer dims must be positive, got {self.in_dim}x{self.out_dim}")
        if self.activation not in _ACTIVATIONS:
            raise InputError(f"unknown activation {self.activation!r}")

    @property
    def n_weights(self):
        return self.in_dim * self.out_dim

    @property
    def n_params(self):
        return self.n_weights + self.out_dim


def _check_chain(layers):
    if not layers:
        raise InputError("network needs at least one layer")
    for a, b in zip(layers, layers[1:]):
        if a.out_dim != b.in_dim:
            raise InputError(f"layer chain mismatch: {a.out_dim} -> {b.in_dim}")


def _check_vector(x, dim, name):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != dim:
        raise InputError(f"{name} must be a length-{dim} vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError(f"{name} contains non-finite values")
    return x


class DenseNet:
    """A fully connected net over an explicit flat parameter vector.

    Weight matrices are stored row-major with shape (out_dim, in_dim);
    the flat layout is [W_0, W_1, ..., b_0, b_1, ...].
    """

    def __init__(self, layers, params):
        layers = tuple(layers)
        _check_chain(layers)
        n = sum(s.n_params for s in layers)
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (n,):
            raise InputError(f"expected {n} params, got shape {params.shape}")
        self.layers = layers
        self.params = params
        self._w_slices = []
        self._b_slices = []
        off = 0
        for s in layers:
            self._w_slices.append(slice(off, off + s.n_weights))
            off += s.n_weights
        for s in layers:
            self._b_slices.append(slice(off, off + s.out_dim))
            off += s.out_dim

    # ── parameter access ──────────────────────────────────────────────

    @property
    def in_dim(self):
        return self.layers[0].in_dim

    @property
    def out_dim(self):
        return self.layers[-1].out_dim

    @property
    def n_params(self):
        return self.params.shape[0]

    def weight(self, k):
        s = self.layers[k]
        return self.params[self._w_slices[k]].reshape(s.out_dim, s.in_dim)

    def bias(self, k):
        return self.params[self._b_slices[k]]

    def get_params(self):
        return self.params.copy()

    def set_params(self, vec):
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != self.params.shape:
            raise InputError(f"param vector shape {vec.shape} != {self.params.shape}")
        self.params[:] = vec

    def copy(self):
        return DenseNet(self.layers, self.params.copy())

    # ── forward / backward ────────────────────────────────────────────

    def forward(self, x):
        """Evaluate the net on a single input vector."""
        x = _check_vector(x, self.in_dim, "input")
        return self.forward_batch(x[None, :])[0]

    def forward_batch(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.in_dim:
            raise InputError(f"batch must be (n, {self.in_dim}), got {X.shape}")
        if not np.all(np.isfinite(X)):
            raise InputError("batch contains non-finite values")
        A = X
        for k, s in enumerate(self.layers):
            Z = A @ self.weight(k).T + self.bias(k)
            A = np.maximum(Z, 0.0) if s.activation == "relu" else Z
        return A

    def backward(self, x, dL_dy):
        """Gradient of L w.r.t. the flat params, given dL/dy at the output."""
        x = _check_vector(x, self.in_dim, "input")
        dL_dy = _check_vector(dL_dy, self.out_dim, "dL_dy")
        grads, _ = self.backward_batch(x[None, :], dL_dy[None, :])
        return grads

    def backward_batch(self, X, dL_dY):
        """Summed parameter gradient over a batch; also returns dL/dX."""
        X = np.asarray(X, dtype=np.float64)
        dL_dY = np.asarray(dL_dY, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.in_dim:
            raise InputError(f"batch must be (n, {self.in_dim}), got {X.shape}")
        if dL_dY.shape != (X.shape[0], self.out_dim):
            raise InputError(f"dL_dY must be ({X.shape[0]}, {self.out_dim}), got {dL_dY.shape}")
        # forward pass keeping every activation for the backward sweep
        acts = [X]
        for k, s in enumerate(self.layers):
            Z = acts[-1] @ self.weight(k).T + self.bias(k)
            acts.append(np.maximum(Z, 0.0) if s.activation == "relu" else Z)
        grads = np.zeros_like(self.params)
        delta = dL_dY
        for k in range(len(self.layers) - 1, -1, -1):
            s = self.layers[k]
            if s.activation == "relu":
                # relu subgradient: 0 at the kink
                delta = delta * (acts[k + 1] > 0.0)
            grads[self._w_slices[k]] = (delta.T @ acts[k]).ravel()
            grads[self._b_slices[k]] = delta.sum(axis=0)
            delta = delta @ self.weight(k)
        return grads, delta


def init_network(layers, seed):
    """Build a DenseNet with uniform +-1/sqrt(in_dim) weights, zero biases."""
    layers = tuple(layers)
    _check_chain(layers)
    rng = np.random.default_rng(seed)
    chunks = []
    for s in layers:
        bound = 1.0 / np.sqrt(s.in_dim)
        chunks.append(rng.uniform(-bound, bound, size=s.n_weights))
    for s in layers:
        chunks.append(np.zeros(s.out_dim))
    return DenseNet(layers, np.concatenate(chunks))


def forward(net, x):
    return net.forward(x)


def backward(net, x, dL_dy):
    return net.backward(x, dL_dy)


# ── dueling head ──────────────────────────────────────────────────────


class DuelingHead:
    """Shared trunk with separate state-value and advantage streams.

    Q(s, a) = V(s) + A(s, a) - mean_a' A(s, a'). Subtracting the mean pins
    the decomposition so V and A are identifiable; adding a constant to
    every advantage leaves Q unchanged.
    """

    def __init__(self, trunk, value_stream, advantage_stream):
        if trunk.out_dim != value_stream.in_dim or trunk.out_dim != advantage_stream.in_dim:
            raise InputError("stream input dims must match trunk output dim")
        if value_stream.out_dim != 1:
            raise InputError("value stream must have a single output")
        self.trunk = trunk
        self.value_stream = value_stream
        self.advantage_stream = advantage_stream
        self._parts = (trunk, value_stream, advantage_stream)

    @property
    def in_dim(self):
        return self.trunk.in_dim

    @property
    def out_dim(self):
        return self.advantage_stream.out_dim

    @property
    def n_actions(self):
        return self.advantage_stream.out_dim

    @property
    def n_params(self):
        return sum(p.n_params for p in self._parts)

    def get_params(self):
        return np.concatenate([p.get_params() for p in self._parts])

    def set_params(self, vec):
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.n_params,):
            raise InputError(f"param vector shape {vec.shape} != ({self.n_params},)")
        off = 0
        for p in self._parts:
            p.set_params(vec[off:off + p.n_params])
            off += p.n_params

    def copy(self):
        return DuelingHead(self.trunk.copy(), self.value_stream.copy(),
                           self.advantage_stream.copy())

    def forward(self, x):
        x = _check_vector(x, self.in_dim, "input")
        return self.forward_batch(x[None, :])[0]

    def forward_batch(self, X):
        F = self.trunk.forward_batch(X)
        V = self.value_stream.forward_batch(F)
        A = self.advantage_stream.forward_batch(F)
        return V + A - A.mean(axis=1, keepdims=True)

    def backward(self, x, dL_dy):
        x = _check_vector(x, self.in_dim, "input")
        dL_dy = _check_vector(dL_dy, self.out_dim, "dL_dy")
        grads, _ = self.backward_batch(x[None, :], dL_dy[None, :])
        return grads

    def backward_batch(self, X, dL_dQ):
        X = np.asarray(X, dtype=np.float64)
        dL_dQ = np.asarray(dL_dQ, dtype=np.float64)
        F = self.trunk.forward_batch(X)
        # dQ_a/dV = 1; dQ_a/dA_b = delta_ab - 1/N
        dL_dV = dL_dQ.sum(axis=1, keepdims=True)
        dL_dA = dL_dQ - dL_dQ.mean(axis=1, keepdims=True)
        g_val, dF_val = self.value_stream.backward_batch(F, dL_dV)
        g_adv, dF_adv = self.advantage_stream.backward_batch(F, dL_dA)
        g_trunk, dX = self.trunk.backward_batch(X, dF_val + dF_adv)
        return np.concatenate([g_trunk, g_val, g_adv]), dX


def make_dueling_head(in_dim, n_actions, trunk_hidden, stream_hidden, seed):
    """Standard dueling architecture from layer sizes and a seed."""
    ss = np.random.SeedSequence(seed).spawn(3)
    seeds = [int(s.generate_state(1)[0]) for s in ss]
    trunk_layers = []
    prev = in_dim
    for h in trunk_hidden:
        trunk_layers.append(LayerSpec(prev, h, "relu"))
        prev = h
    trunk = init_network(trunk_layers, seeds[0])
    value = init_network([LayerSpec(prev, stream_hidden, "relu"),
                          LayerSpec(stream_hidden, 1, "identity")], seeds[1])
    adv = init_network([LayerSpec(prev, stream_hidden, "relu"),
                        LayerSpec(stream_hidden, n_actions, "identity")], seeds[2])
    return DuelingHead(trunk, value, adv)


def dueling_forward(head, x):
    return head.forward(x)


# ── Adam ──────────────────────────────────────────────────────────────


@dataclass
class AdamState:
    """First/second moment accumulators plus hyperparameters."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def fresh(cls, n_params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        if n_params < 1:
            raise InputError("n_params must be positive")
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise InputError("betas must lie in [0, 1)")
        if lr <= 0.0 or eps <= 0.0:
            raise InputError("lr and eps must be positive")
        return cls(m=np.zeros(n_params), v=np.zeros(n_params), t=0,
                   lr=lr, beta1=beta1, beta2=beta2, eps=eps)


def adam_step(params, grads, state):
    """One bias-corrected Adam update; returns (new_params, new_state)."""
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if params.shape != grads.shape or params.ndim != 1:
        raise InputError(f"params {params.shape} and grads {grads.shape} must be equal 1-d shapes")
    if state.m.shape != params.shape:
        raise InputError("AdamState size does not match params")
    if not np.all(np.isfinite(grads)):
        raise NumericError("non-finite gradient passed to adam_step")
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    v = state.beta2 * state.v + (1.0 - state.beta2) * grads * grads
    m_hat = m / (1.0 - state.beta1 ** t)
    v_hat = v / (1.0 - state.beta2 ** t)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    if not np.all(np.isfinite(new_params)):
        raise NumericError("adam_step produced non-finite parameters")
    return new_params, AdamState(m=m, v=v, t=t, lr=state.lr, beta1=state.beta1,
                                 beta2=state.beta2, eps=state.eps)


# ── finite-difference oracle ──────────────────────────────────────────


def finite_difference_gradient(model, x, dL_dy, h=1e-5):
    """Central-difference gradient of L = dL_dy . model(x) w.r.t. params.

    Independent of backward(); used to cross-check the analytic gradients.
    O(n_params) forward evaluations, so keep models small when calling this.
    """
    if h <= 0.0:
        raise InputError("finite-difference step h must be positive")
    x = _check_vector(x, model.in_dim, "input")
    dL_dy = _check_vector(dL_dy, model.out_dim, "dL_dy")
    base = model.get_params()
    grad = np.zeros_like(base)
    probe = base.copy()
    for i in range(base.shape[0]):
        probe[i] = base[i] + h
        model.set_params(probe)
        up = float(dL_dy @ model.forward(x))
        probe[i] = base[i] - h
        model.set_params(probe)
        down = float(dL_dy @ model.forward(x))
        probe[i] = base[i]
        grad[i] = (up - down) / (2.0 * h)
    model.set_params(base)
    return grad
