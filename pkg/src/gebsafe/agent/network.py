"""Fully connected Q-network in plain numpy, with hand-written backprop."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch


def relu(x):
    return np.maximum(x, 0.0)


class MlpNetwork:
    """Affine layers with ReLU between them and an identity output layer.

    Weights are stored as (fan_in, fan_out) so a batch ``x`` of shape (n, fan_in)
    maps through ``x @ W + b``.
    """

    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray]):
        if len(weights) != len(biases) or not weights:
            raise ValueError("need one bias per weight matrix and at least one layer")
        for w, b in zip(weights, biases):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise DimensionMismatch(f"bad layer shapes {w.shape} / {b.shape}")
        for w_prev, w_next in zip(weights, weights[1:]):
            if w_prev.shape[1] != w_next.shape[0]:
                raise DimensionMismatch("consecutive layer sizes do not match")
        # all parameters live in one contiguous buffer; weights/biases are views into it
        total = sum(w.size + b.size for w, b in zip(weights, biases))
        self.flat = np.empty(total)
        self.weights, self.biases = [], []
        o = 0
        for w, b in zip(weights, biases):
            wv = self.flat[o : o + w.size].reshape(w.shape)
            wv[...] = w
            o += w.size
            bv = self.flat[o : o + b.size]
            bv[...] = b
            o += b.size
            self.weights.append(wv)
            self.biases.append(bv)

    @classmethod
    def initialize(cls, sizes, rng: np.random.Generator) -> "MlpNetwork":
        """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases."""
        ws, bs = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            ws.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            bs.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(ws, bs)

    @classmethod
    def zeros(cls, sizes) -> "MlpNetwork":
        return cls(
            [np.zeros((i, o)) for i, o in zip(sizes[:-1], sizes[1:])],
            [np.zeros(o) for o in sizes[1:]],
        )

    @property
    def sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def n_inputs(self) -> int:
        return self.weights[0].shape[0]

    @property
    def n_outputs(self) -> int:
        return self.weights[-1].shape[1]

    def params(self) -> list[np.ndarray]:
        """Parameter arrays interleaved as [W1, b1, W2, b2, ...]; views, not copies."""
        return self.params_like(self.flat)

    def copy(self) -> "MlpNetwork":
        return MlpNetwork([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def load_from(self, other: "MlpNetwork") -> None:
        if other.sizes != self.sizes:
            raise DimensionMismatch(f"cannot copy {other.sizes} into {self.sizes}")
        self.flat[...] = other.flat

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n_inputs:
            raise DimensionMismatch(f"expected {self.n_inputs} inputs, got {x.shape[-1]}")
        return x

    def forward(self, x) -> np.ndarray:
        x = self._check(x)
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                h = relu(h)
        return h

    def forward_cached(self, x) -> tuple[np.ndarray, list[np.ndarray]]:
        """Forward pass on a 2-D batch keeping each layer's input for backprop."""
        x = np.atleast_2d(self._check(x))
        inputs = []
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(h)
            h = h @ w + b
            if i < last:
                h = relu(h)
        return h, inputs

    def backward(self, inputs: list[np.ndarray], d_out: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        """Flat gradient (same layout as ``flat``) given dLoss/dOutput for the cached batch."""
        flat = np.empty_like(self.flat) if out is None else out
        grads = self.params_like(flat)
        delta = d_out
        for i in range(len(self.weights) - 1, -1, -1):
            a_in = inputs[i]
            np.matmul(a_in.T, delta, out=grads[2 * i])
            np.sum(delta, axis=0, out=grads[2 * i + 1])
            if i > 0:
                # inputs[i] is relu(z) of the previous layer; its mask is a_in > 0
                delta = (delta @ self.weights[i].T) * (a_in > 0)
        return flat

    def params_like(self, flat: np.ndarray) -> list[np.ndarray]:
        """Split a flat vector into views shaped like ``params()``."""
        out = []
        o = 0
        for w, b in zip(self.weights, self.biases):
            out.append(flat[o : o + w.size].reshape(w.shape))
            o += w.size
            out.append(flat[o : o + b.size])
            o += b.size
        return out


def q_forward(net: MlpNetwork, obs) -> np.ndarray:
    q = net.forward(obs)
    if not np.all(np.isfinite(q)):
        raise FloatingPointError("Q-network produced non-finite values")
    return q


class Sgd:
    name = "sgd"

    def __init__(self, lr: float):
        self.lr = lr

    def step(self, param: np.ndarray, grad: np.ndarray) -> None:
        param -= self.lr * grad


class Adam:
    """Adaptive-moment descent updating a flat parameter vector in place."""

    name = "adam"

    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m: np.ndarray | None = None
        self.v: np.ndarray | None = None

    def step(self, param: np.ndarray, grad: np.ndarray) -> None:
        if self.m is None:
            self.m = np.zeros_like(param)
            self.v = np.zeros_like(param)
            self._tmp = np.empty_like(param)
        self.t += 1
        c1 = 1 - self.beta1**self.t
        c2 = 1 - self.beta2**self.t
        m, v, tmp = self.m, self.v, self._tmp
        m *= self.beta1
        np.multiply(grad, 1 - self.beta1, out=tmp)
        m += tmp
        v *= self.beta2
        np.multiply(grad, grad, out=tmp)
        tmp *= 1 - self.beta2
        v += tmp
        # p -= lr * (m / c1) / (sqrt(v / c2) + eps)
        np.sqrt(v, out=tmp)
        tmp *= 1 / np.sqrt(c2)
        tmp += self.eps
        np.divide(m, tmp, out=tmp)
        tmp *= self.lr / c1
        param -= tmp


def make_optimizer(name: str, lr: float):
    if name == "adam":
        return Adam(lr)
    if name == "sgd":
        return Sgd(lr)
    raise ValueError(f"unknown optimizer {name!r}; choose 'adam' or 'sgd'")
