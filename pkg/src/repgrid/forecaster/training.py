"""Training loop (Adam on horizon MSE) and batch prediction."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..core import SlidingWindow
from ..errors import DivergedLossError
from ..stats import rmse
from .network import ForecastModel, ModelConfig, forward_batch, mse_loss_and_grads

_PREDICT_CHUNK = 256


@dataclass(frozen=True)
class TrainingResult:
    epoch_losses: tuple[float, ...]
    train_rmse: float
    val_rmse: float
    wall_time: float


@dataclass(frozen=True)
class Prediction:
    index: int
    y_hat: np.ndarray
    rmse: float


class _Adam:
    """Adam with bias correction (beta1=0.9, beta2=0.999, eps=1e-8)."""

    def __init__(self, params: dict[str, np.ndarray], lr: float):
        self.lr = lr
        self.beta1, self.beta2, self.eps = 0.9, 0.999, 1e-8
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for name, g in grads.items():
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            params[name] -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)


def _stack(windows: Sequence[SlidingWindow]) -> tuple[np.ndarray, np.ndarray]:
    inputs = np.stack([w.input for w in windows])
    targets = np.stack([w.target for w in windows])
    return inputs, targets


def train(
    model: ForecastModel,
    train_windows: Sequence[SlidingWindow],
    val_windows: Sequence[SlidingWindow],
    config: ModelConfig,
    denorm: Callable[[np.ndarray], np.ndarray] | None = None,
) -> tuple[ForecastModel, TrainingResult]:
    """Fit a copy of the model with Adam on mean squared horizon error.

    Mini-batch order reshuffles every epoch from a generator seeded by the
    config, so a (seed, data, config) triple fully determines the trained
    parameters. ``denorm`` maps normalized target units back to original
    units for the reported train/validation RMSE.
    """
    if not train_windows or not val_windows:
        raise ValueError("train and validation partitions must be non-empty")
    started = time.perf_counter()
    model = model.copy()
    x_train, y_train = _stack(train_windows)
    n = x_train.shape[0]
    rng = np.random.default_rng([config.seed, 1])
    adam = _Adam(model.params, config.learning_rate)

    epoch_losses = []
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, config.batch_size):
            batch = order[lo : lo + config.batch_size]
            loss, grads, _ = mse_loss_and_grads(model, x_train[batch], y_train[batch])
            if not np.isfinite(loss):
                raise DivergedLossError(epoch)
            adam.step(model.params, grads)
            total += loss * batch.size
        epoch_losses.append(total / n)

    def scored_rmse(windows: Sequence[SlidingWindow]) -> float:
        preds = predict_all(model, windows)
        predicted = np.concatenate([p.y_hat for p in preds])
        actual = np.concatenate([w.target for w in windows])
        if denorm is not None:
            predicted, actual = denorm(predicted), denorm(actual)
        return rmse(predicted, actual)

    result = TrainingResult(
        epoch_losses=tuple(epoch_losses),
        train_rmse=scored_rmse(train_windows),
        val_rmse=scored_rmse(val_windows),
        wall_time=time.perf_counter() - started,
    )
    return model, result


def predict_all(model: ForecastModel, windows: Sequence[SlidingWindow]) -> tuple[Prediction, ...]:
    """One prediction per window, evaluated in fixed-size batches."""
    preds: list[Prediction] = []
    for lo in range(0, len(windows), _PREDICT_CHUNK):
        chunk = windows[lo : lo + _PREDICT_CHUNK]
        inputs, targets = _stack(chunk)
        outs = forward_batch(model, inputs)
        for w, out, tgt in zip(chunk, outs, targets):
            preds.append(Prediction(index=w.index, y_hat=out, rmse=rmse(out, tgt)))
    return tuple(preds)


def pooled_rmse(predictions: Sequence[Prediction], windows: Sequence[SlidingWindow]) -> float:
    """Representation-level RMSE over the concatenation of all window errors."""
    predicted = np.concatenate([p.y_hat for p in predictions])
    actual = np.concatenate([w.target for w in windows])
    return rmse(predicted, actual)
