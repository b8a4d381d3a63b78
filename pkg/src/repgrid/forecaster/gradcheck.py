"""Finite-difference verification of the analytic gradients.

Runs the whole comparison in extended precision (long double) so central
differences stay accurate enough to certify the backward pass to 1e-4.
Intended for small nets; cost grows with two forward passes per parameter.
"""

from __future__ import annotations

import numpy as np

from ..core import SlidingWindow
from .network import (
    ForecastModel,
    PARAM_ORDER,
    flatten_params,
    forward_batch,
    mse_loss_and_grads,
    unflatten_params,
)

MAX_CHECK_PARAMS = 5000


def _loss_at(model: ForecastModel, flat: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    probe = unflatten_params(model, flat)
    out = forward_batch(probe, x)
    err = out - y
    return float((err * err).mean())


def gradient_check(
    model: ForecastModel, window: SlidingWindow, epsilon: float = 1e-5
) -> float:
    """Maximum relative discrepancy between analytic and central-difference
    gradients of the window's MSE loss, over every parameter."""
    if model.n_params > MAX_CHECK_PARAMS:
        raise ValueError(
            f"gradient check limited to {MAX_CHECK_PARAMS} parameters, model has {model.n_params}"
        )
    ld = np.longdouble
    model = model.astype(ld)
    x = window.input[None].astype(ld)
    y = window.target[None].astype(ld)

    _, grads, _ = mse_loss_and_grads(model, x, y)
    analytic = np.concatenate([grads[name].ravel() for name in PARAM_ORDER])

    flat = flatten_params(model)
    numeric = np.empty_like(flat)
    eps = ld(epsilon)
    for j in range(flat.size):
        saved = flat[j]
        flat[j] = saved + eps
        hi = _loss_at(model, flat, x, y)
        flat[j] = saved - eps
        lo = _loss_at(model, flat, x, y)
        flat[j] = saved
        numeric[j] = (hi - lo) / (2.0 * eps)

    scale = np.maximum(np.abs(analytic) + np.abs(numeric), ld(1e-8))
    return float((np.abs(analytic - numeric) / scale).max())
