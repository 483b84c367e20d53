"""Single-hidden-layer sigmoid network trained by stochastic backpropagation.

Inputs are standardized with training-set statistics; the loss is the summed
squared error 0.5*||output - onehot||^2; updates are per-instance with
momentum. The per-epoch instance orders are drawn up front from a seeded
generator, so training is bit-reproducible; the hot loop is JIT-compiled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..dataset import Dataset, DatasetSchema
from ..errors import DivergenceError, EmptyDatasetError, SchemaError


@dataclass(frozen=True)
class MlpParams:
    hidden: int | None = None  # None -> round((attributes + classes) / 2)
    learning_rate: float = 0.3
    momentum: float = 0.2
    epochs: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.hidden is not None and self.hidden < 1:
            raise ValueError("hidden layer size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if not (0.0 <= self.momentum < 1.0):
            raise ValueError("momentum must lie in [0, 1)")
        if self.epochs < 1:
            raise ValueError("epoch count must be >= 1")


@dataclass(frozen=True)
class MlpModel:
    schema: DatasetSchema
    params: MlpParams
    input_mean: np.ndarray
    input_std: np.ndarray
    w1: np.ndarray  # (attributes, hidden)
    b1: np.ndarray
    w2: np.ndarray  # (hidden, classes)
    b2: np.ndarray

    def __post_init__(self):
        a, h = self.w1.shape
        h2, c = self.w2.shape
        if h != h2 or self.b1.shape != (h,) or self.b2.shape != (c,):
            raise ValueError("weight matrix shapes do not chain")
        for arr in (self.input_mean, self.input_std, self.w1, self.b1, self.w2, self.b2):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite network parameter")

    @property
    def layer_sizes(self) -> tuple[int, int, int]:
        return (self.w1.shape[0], self.w1.shape[1], self.w2.shape[1])

    def activations(self, values) -> np.ndarray:
        """Raw output-unit activations in (0, 1), one per class."""
        values = np.asarray(values, dtype=float)
        if values.shape != (len(self.schema.attributes),):
            raise SchemaError(
                f"expected {len(self.schema.attributes)} attribute values, got {values.shape}"
            )
        x = (values - self.input_mean) / self.input_std
        a1 = _sigmoid(x @ self.w1 + self.b1)
        return _sigmoid(a1 @ self.w2 + self.b2)

    def predict_proba(self, values) -> np.ndarray:
        out = self.activations(values)
        return out / out.sum()


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def forward(x, w1, b1, w2, b2):
    """Hidden and output activations for one standardized input vector."""
    a1 = _sigmoid(x @ w1 + b1)
    a2 = _sigmoid(a1 @ w2 + b2)
    return a1, a2


def loss_and_gradients(X, T, w1, b1, w2, b2):
    """Total squared-error loss and its exact parameter gradients over a batch.

    Pure-numpy reference used both by tests (finite-difference comparison)
    and to validate the compiled trainer's single-step arithmetic.
    """
    gw1 = np.zeros_like(w1)
    gb1 = np.zeros_like(b1)
    gw2 = np.zeros_like(w2)
    gb2 = np.zeros_like(b2)
    loss = 0.0
    for i in range(len(X)):
        a1, a2 = forward(X[i], w1, b1, w2, b2)
        err = a2 - T[i]
        loss += 0.5 * float(err @ err)
        d2 = err * a2 * (1.0 - a2)
        d1 = (w2 @ d2) * a1 * (1.0 - a1)
        gw2 += np.outer(a1, d2)
        gb2 += d2
        gw1 += np.outer(X[i], d1)
        gb1 += d1
    return loss, gw1, gb1, gw2, gb2


def batch_loss(X, T, w1, b1, w2, b2) -> float:
    total = 0.0
    for i in range(len(X)):
        _, a2 = forward(X[i], w1, b1, w2, b2)
        err = a2 - T[i]
        total += 0.5 * float(err @ err)
    return total


@njit(cache=True)
def _sgd_train(X, T, w1, b1, w2, b2, lr, momentum, orders, losses):  # pragma: no cover
    n, a = X.shape
    h = w1.shape[1]
    c = w2.shape[1]
    dw1 = np.zeros((a, h))
    db1 = np.zeros(h)
    dw2 = np.zeros((h, c))
    db2 = np.zeros(c)
    for e in range(orders.shape[0]):
        total = 0.0
        for pos in range(n):
            i = orders[e, pos]
            a1 = 1.0 / (1.0 + np.exp(-(np.dot(X[i], w1) + b1)))
            a2 = 1.0 / (1.0 + np.exp(-(np.dot(a1, w2) + b2)))
            err = a2 - T[i]
            total += 0.5 * np.sum(err * err)
            d2 = err * a2 * (1.0 - a2)
            d1 = np.dot(w2, d2) * a1 * (1.0 - a1)
            for j in range(h):
                for k in range(c):
                    dw2[j, k] = -lr * a1[j] * d2[k] + momentum * dw2[j, k]
                    w2[j, k] += dw2[j, k]
            for k in range(c):
                db2[k] = -lr * d2[k] + momentum * db2[k]
                b2[k] += db2[k]
            for j in range(a):
                for k in range(h):
                    dw1[j, k] = -lr * X[i, j] * d1[k] + momentum * dw1[j, k]
                    w1[j, k] += dw1[j, k]
            for k in range(h):
                db1[k] = -lr * d1[k] + momentum * db1[k]
                b1[k] += db1[k]
        losses[e] = total
        if not np.isfinite(total):
            break
    return losses


def default_hidden_size(n_attributes: int, n_classes: int) -> int:
    return max(1, int(round((n_attributes + n_classes) / 2.0)))


def init_weights(n_attributes: int, hidden: int, n_classes: int, seed: int):
    """Uniform [-0.05, 0.05] initialization, draw order w1, b1, w2, b2."""
    rng = np.random.default_rng(seed)
    w1 = rng.uniform(-0.05, 0.05, (n_attributes, hidden))
    b1 = rng.uniform(-0.05, 0.05, hidden)
    w2 = rng.uniform(-0.05, 0.05, (hidden, n_classes))
    b2 = rng.uniform(-0.05, 0.05, n_classes)
    return w1, b1, w2, b2


def train_mlp(train: Dataset, params: MlpParams = MlpParams()) -> MlpModel:
    if len(train) == 0:
        raise EmptyDatasetError("cannot train a network on an empty dataset")
    if not train.all_labeled():
        raise ValueError("training dataset must be fully labeled")
    X = train.features()
    y = train.label_indices()
    n, a = X.shape
    c = len(train.schema.class_values)
    hidden = params.hidden if params.hidden is not None else default_hidden_size(a, c)

    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0.0] = 1.0
    Xs = (X - mean) / std
    T = np.zeros((n, c))
    T[np.arange(n), y] = 1.0

    w1, b1, w2, b2 = init_weights(a, hidden, c, params.seed)
    rng = np.random.default_rng(params.seed + 1)
    orders = np.empty((params.epochs, n), dtype=np.int64)
    for e in range(params.epochs):
        orders[e] = rng.permutation(n)

    losses = np.full(params.epochs, np.nan)
    _sgd_train(Xs, T, w1, b1, w2, b2, params.learning_rate, params.momentum, orders, losses)
    bad = np.flatnonzero(~np.isfinite(losses))
    if bad.size:
        raise DivergenceError(
            f"training loss became non-finite at epoch {int(bad[0])}", epoch=int(bad[0])
        )
    return MlpModel(
        schema=train.schema,
        params=MlpParams(
            hidden=hidden,
            learning_rate=params.learning_rate,
            momentum=params.momentum,
            epochs=params.epochs,
            seed=params.seed,
        ),
        input_mean=mean,
        input_std=std,
        w1=w1,
        b1=b1,
        w2=w2,
        b2=b2,
    )
