"""Small dense networks with hand-rolled forward and backward passes.

Two fixed architectures are used: a policy network ending in a softmax
over sensors, and a scalar value network. Updates are per-sample Adam
steps on hand-computed gradients; plain SGD at these learning rates
moves the policy logits far too little to pick up state-dependent
structure within a training budget of ~1e5 transitions. The learning
rate itself decays multiplicatively between episodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

LR_FLOOR = 1e-6

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

_ACTIVATIONS = ("relu", "softmax", "identity")


@njit(cache=True)
def _adam_rank1(w, m, v, d, a, scale, lr, c1, c2):
    """Fused Adam ascent on one weight matrix for a rank-1 gradient.

    The single-sample gradient of every objective here factorizes as
    scale * outer(d, a); updating moments and parameters in one pass
    avoids materializing any (out, in) temporaries.
    """
    for i in range(w.shape[0]):
        gd = scale * d[i]
        for j in range(w.shape[1]):
            g = gd * a[j]
            mij = ADAM_BETA1 * m[i, j] + (1.0 - ADAM_BETA1) * g
            vij = ADAM_BETA2 * v[i, j] + (1.0 - ADAM_BETA2) * g * g
            m[i, j] = mij
            v[i, j] = vij
            w[i, j] += lr * (mij / c1) / (np.sqrt(vij / c2) + ADAM_EPS)


@njit(cache=True)
def _adam_vector(b, m, v, d, scale, lr, c1, c2):
    """Fused Adam ascent on one bias vector; gradient is scale * d."""
    for i in range(b.shape[0]):
        g = scale * d[i]
        mi = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * g
        vi = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * g * g
        m[i] = mi
        v[i] = vi
        b[i] += lr * (mi / c1) / (np.sqrt(vi / c2) + ADAM_EPS)


@dataclass(frozen=True)
class LayerSpec:
    input_dim: int
    output_dim: int
    activation: str

    def __post_init__(self):
        if self.input_dim < 1 or self.output_dim < 1:
            raise ValueError("layer dimensions must be positive")
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")


class DenseNet:
    """A feed-forward stack of fully connected layers.

    weights[k] has shape (out, in); biases[k] has shape (out,). The
    instance carries its own Adam moment buffers and is mutated in place
    by the step functions; it is single-owner during training.
    """

    def __init__(self, layers: list[LayerSpec], learning_rate: float, lr_decay: float = 0.999):
        for prev, nxt in zip(layers, layers[1:]):
            if prev.output_dim != nxt.input_dim:
                raise ValueError("adjacent layer dimensions do not chain")
        if learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 < lr_decay <= 1.0:
            raise ValueError("lr_decay must lie in (0, 1]")
        self.layers = list(layers)
        self.learning_rate = float(learning_rate)
        self.lr_decay = float(lr_decay)
        self.weights = [
            np.zeros((spec.output_dim, spec.input_dim), dtype=np.float64) for spec in layers
        ]
        self.biases = [np.zeros(spec.output_dim, dtype=np.float64) for spec in layers]
        self.reset_optimizer()

    def reset_optimizer(self) -> None:
        """Zero the Adam moment estimates and step counter."""
        self.m_weights = [np.zeros_like(w) for w in self.weights]
        self.v_weights = [np.zeros_like(w) for w in self.weights]
        self.m_biases = [np.zeros_like(b) for b in self.biases]
        self.v_biases = [np.zeros_like(b) for b in self.biases]
        self.adam_steps = 0

    @property
    def input_dim(self) -> int:
        return self.layers[0].input_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].output_dim

    def parameter_count(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def init_uniform(self, rng: np.random.Generator) -> "DenseNet":
        """Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases."""
        for k, spec in enumerate(self.layers):
            bound = 1.0 / np.sqrt(spec.input_dim)
            self.weights[k] = rng.uniform(-bound, bound, size=(spec.output_dim, spec.input_dim))
            self.biases[k] = np.zeros(spec.output_dim, dtype=np.float64)
        return self

    def copy(self) -> "DenseNet":
        dup = DenseNet(self.layers, self.learning_rate, self.lr_decay)
        dup.weights = [w.copy() for w in self.weights]
        dup.biases = [b.copy() for b in self.biases]
        dup.m_weights = [m.copy() for m in self.m_weights]
        dup.v_weights = [v.copy() for v in self.v_weights]
        dup.m_biases = [m.copy() for m in self.m_biases]
        dup.v_biases = [v.copy() for v in self.v_biases]
        dup.adam_steps = self.adam_steps
        return dup


def build_actor(
    n_inputs: int,
    n_actions: int,
    rng: np.random.Generator,
    learning_rate: float = 0.0005,
    lr_decay: float = 0.999,
) -> DenseNet:
    """Policy network: inputs -> 200 relu -> 200 relu -> n_actions softmax."""
    layers = [
        LayerSpec(n_inputs, 200, "relu"),
        LayerSpec(200, 200, "relu"),
        LayerSpec(200, n_actions, "softmax"),
    ]
    return DenseNet(layers, learning_rate, lr_decay).init_uniform(rng)


def build_critic(
    n_inputs: int,
    rng: np.random.Generator,
    learning_rate: float = 0.01,
    lr_decay: float = 0.999,
) -> DenseNet:
    """Value network: inputs -> 200 relu -> 100 relu -> 1 identity."""
    layers = [
        LayerSpec(n_inputs, 200, "relu"),
        LayerSpec(200, 100, "relu"),
        LayerSpec(100, 1, "identity"),
    ]
    return DenseNet(layers, learning_rate, lr_decay).init_uniform(rng)


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max()
    e = np.exp(shifted)
    return e / e.sum()


def forward_cached(net: DenseNet, x: np.ndarray):
    """Forward pass returning (output, pre-activations, activations).

    activations[0] is the input; activations[k+1] is layer k's output.
    """
    a = np.asarray(x, dtype=np.float64)
    zs = []
    acts = [a]
    for spec, w, b in zip(net.layers, net.weights, net.biases):
        z = w @ a + b
        zs.append(z)
        if spec.activation == "relu":
            a = np.maximum(z, 0.0)
        elif spec.activation == "softmax":
            a = _softmax(z)
        else:
            a = z
        acts.append(a)
    return a, zs, acts


def forward(net: DenseNet, x: np.ndarray) -> np.ndarray:
    """Output of the network for a single input vector."""
    out, _, _ = forward_cached(net, x)
    return out


def value(net: DenseNet, x: np.ndarray) -> float:
    """Scalar output of a value network."""
    return float(forward(net, x)[0])


def _hidden_deltas(net: DenseNet, zs: list, output_delta: np.ndarray) -> list:
    """Backpropagate a pre-activation gradient at the output layer.

    Returns per-layer gradients with respect to each layer's
    pre-activation, in layer order.
    """
    deltas = [None] * len(net.layers)
    deltas[-1] = output_delta
    for k in range(len(net.layers) - 2, -1, -1):
        g = net.weights[k + 1].T @ deltas[k + 1]
        g[zs[k] <= 0.0] = 0.0  # hidden layers are relu
        deltas[k] = g
    return deltas


def _apply_ascent(net: DenseNet, deltas: list, acts: list, scale: float) -> None:
    """One Adam ascent step on the objective whose gradient is scale * (deltas x acts)."""
    net.adam_steps += 1
    t = net.adam_steps
    c1 = 1.0 - ADAM_BETA1**t
    c2 = 1.0 - ADAM_BETA2**t
    lr = net.learning_rate
    for k in range(len(net.layers)):
        _adam_rank1(
            net.weights[k], net.m_weights[k], net.v_weights[k],
            deltas[k], acts[k], scale, lr, c1, c2,
        )
        _adam_vector(
            net.biases[k], net.m_biases[k], net.v_biases[k], deltas[k], scale, lr, c1, c2
        )


def log_policy_gradient(net: DenseNet, x: np.ndarray, action: int) -> list:
    """Gradient of ln(softmax output[action]) with respect to all parameters.

    Returned as [(dW, db), ...] in layer order; used directly by the
    finite-difference checks.
    """
    if net.layers[-1].activation != "softmax":
        raise ValueError("log_policy_gradient requires a softmax output layer")
    probs, zs, acts = forward_cached(net, x)
    seed = -probs.copy()
    seed[action] += 1.0
    deltas = _hidden_deltas(net, zs, seed)
    return [(np.outer(d, a), d.copy()) for d, a in zip(deltas, acts)]


def value_gradient(net: DenseNet, x: np.ndarray) -> list:
    """Gradient of the scalar output with respect to all parameters."""
    if net.layers[-1].output_dim != 1:
        raise ValueError("value_gradient requires a scalar output layer")
    _, zs, acts = forward_cached(net, x)
    deltas = _hidden_deltas(net, zs, np.ones(1))
    return [(np.outer(d, a), d.copy()) for d, a in zip(deltas, acts)]


def actor_step(net: DenseNet, x: np.ndarray, action: int, delta: float) -> DenseNet:
    """Ascend the policy gradient scaled by the advantage signal.

    The update direction is the Adam-preconditioned gradient of
    delta * ln(policy(x)[action]). A zero delta is a non-event: no
    parameter or optimizer-state change.
    """
    if not np.isfinite(delta):
        raise ValueError(f"non-finite advantage signal: {delta}")
    if delta == 0.0:
        return net
    probs, zs, acts = forward_cached(net, x)
    seed = -probs.copy()
    seed[action] += 1.0
    deltas = _hidden_deltas(net, zs, seed)
    _apply_ascent(net, deltas, acts, delta)
    return net


def critic_step(net: DenseNet, x: np.ndarray, target: float) -> DenseNet:
    """One descent step on (target - V(x))**2 with the target held constant.

    A zero residual is a non-event, mirroring actor_step.
    """
    if not np.isfinite(target):
        raise ValueError(f"non-finite critic target: {target}")
    out, zs, acts = forward_cached(net, x)
    residual = target - out[0]
    if residual == 0.0:
        return net
    deltas = _hidden_deltas(net, zs, np.ones(1))
    # descend the squared loss == ascend 2 * residual * V
    _apply_ascent(net, deltas, acts, 2.0 * residual)
    return net


def decay_learning_rates(actor: DenseNet, critic: DenseNet) -> None:
    """Multiply both learning rates by their decay factors, floored at LR_FLOOR."""
    for net in (actor, critic):
        net.learning_rate = max(net.learning_rate * net.lr_decay, LR_FLOOR)
