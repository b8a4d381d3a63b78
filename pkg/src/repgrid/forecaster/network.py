"""The forecasting network: 1-D convolution -> LSTM -> dense -> linear output.

Implemented directly on numpy so that training, prediction, and the
finite-difference gradient verification all share one explicit computation
graph. Parameters live in a name -> array dict with a fixed ordering used by
both the serializer and the gradient check.

Layout conventions:
  conv_w  (filters, kernel, k)      conv_b  (filters,)
  lstm_wx (filters, 4*units)        lstm_wh (units, 4*units)   lstm_b (4*units,)
  dense_w (units, dense)            dense_b (dense,)
  out_w   (dense, horizon)          out_b   (horizon,)
Gate blocks along the 4*units axis are ordered [input, forget, output, cell]
so the three sigmoid gates occupy one contiguous slab.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NonFiniteActivationError, ShapeMismatchError

PARAM_ORDER = (
    "conv_w", "conv_b",
    "lstm_wx", "lstm_wh", "lstm_b",
    "dense_w", "dense_b",
    "out_w", "out_b",
)


@dataclass(frozen=True)
class ModelConfig:
    horizon: int
    seed: int
    conv_filters: int = 32
    conv_kernel: int = 3
    lstm_units: int = 50
    dense_units: int = 32
    learning_rate: float = 1e-3
    epochs: int = 100
    batch_size: int = 32

    def __post_init__(self):
        for name in ("horizon", "conv_filters", "conv_kernel", "lstm_units",
                     "dense_units", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass(frozen=True)
class ForecastModel:
    params: dict[str, np.ndarray] = field(repr=False)
    input_shape: tuple[int, int]

    @property
    def filters(self) -> int:
        return self.params["conv_w"].shape[0]

    @property
    def kernel(self) -> int:
        return self.params["conv_w"].shape[1]

    @property
    def units(self) -> int:
        return self.params["lstm_wh"].shape[0]

    @property
    def horizon(self) -> int:
        return self.params["out_w"].shape[1]

    @property
    def n_params(self) -> int:
        return sum(p.size for p in self.params.values())

    def astype(self, dtype) -> "ForecastModel":
        return ForecastModel(
            params={k: v.astype(dtype) for k, v in self.params.items()},
            input_shape=self.input_shape,
        )

    def copy(self) -> "ForecastModel":
        return ForecastModel(
            params={k: v.copy() for k, v in self.params.items()},
            input_shape=self.input_shape,
        )


def init_model(config: ModelConfig, input_shape: tuple[int, int]) -> ForecastModel:
    """Seeded scaled-uniform initialization; equal seeds give equal bits.

    Weight tensors draw from U(-lim, lim) with lim = sqrt(6 / (fan_in +
    fan_out)); biases start at zero except the forget-gate block, set to 1 so
    early training does not erase the cell state. Biases consume no random
    draws, keeping the stream layout stable.
    """
    window_length, k = input_shape
    if config.conv_kernel > window_length:
        raise ShapeMismatchError(
            f"conv kernel {config.conv_kernel} exceeds window length {window_length}"
        )
    rng = np.random.default_rng([config.seed, 0])
    f, kn, u, d, h = (config.conv_filters, config.conv_kernel, config.lstm_units,
                      config.dense_units, config.horizon)

    def glorot(shape, fan_in, fan_out):
        lim = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-lim, lim, size=shape)

    params = {
        "conv_w": glorot((f, kn, k), kn * k, f),
        "conv_b": np.zeros(f),
        "lstm_wx": glorot((f, 4 * u), f, u),
        "lstm_wh": glorot((u, 4 * u), u, u),
        "lstm_b": np.zeros(4 * u),
        "dense_w": glorot((u, d), u, d),
        "dense_b": np.zeros(d),
        "out_w": glorot((d, h), d, h),
        "out_b": np.zeros(h),
    }
    params["lstm_b"][u : 2 * u] = 1.0
    return ForecastModel(params=params, input_shape=(window_length, k))


def _sigmoid_inplace(z: np.ndarray) -> np.ndarray:
    """1 / (1 + exp(-z)) computed in place.

    exp may overflow to inf for very negative z; the reciprocal then returns
    exactly 0, which is the correct limit, so the overflow warning is noise.
    """
    np.negative(z, out=z)
    with np.errstate(over="ignore"):
        np.exp(z, out=z)
    z += 1.0
    np.reciprocal(z, out=z)
    return z


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return _sigmoid_inplace(np.array(z, copy=True))


def _check_batch(model: ForecastModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 3 or x.shape[1:] != model.input_shape:
        raise ShapeMismatchError(
            f"expected inputs of shape (B, {model.input_shape[0]}, {model.input_shape[1]}), "
            f"got {x.shape}"
        )
    return x.astype(model.params["conv_w"].dtype, copy=False)


def _conv_features(model: ForecastModel, x: np.ndarray):
    """Valid 1-D convolution over time, variables as input channels."""
    p = model.params
    batch, window_length, _ = x.shape
    steps = window_length - model.kernel + 1
    cols = np.lib.stride_tricks.sliding_window_view(x, model.kernel, axis=1)
    cols = cols.transpose(0, 1, 3, 2).reshape(batch, steps, -1)  # (B, steps, kernel*k)
    wmat = p["conv_w"].transpose(1, 2, 0).reshape(-1, model.filters)
    feat_pre = cols @ wmat + p["conv_b"]
    return cols, feat_pre, np.maximum(feat_pre, 0.0)


def _head(model: ForecastModel, h: np.ndarray):
    p = model.params
    dense_pre = h @ p["dense_w"] + p["dense_b"]
    dense = np.maximum(dense_pre, 0.0)
    out = dense @ p["out_w"] + p["out_b"]
    if not np.isfinite(out).all():
        raise NonFiniteActivationError("forward pass produced non-finite outputs")
    return dense_pre, dense, out


def _forward_inference(model: ForecastModel, x: np.ndarray) -> np.ndarray:
    """Cache-free forward pass tuned for wide coalition batches.

    Uses a batch-minor layout (features x batch) so every elementwise pass
    runs over long contiguous rows, and keeps the three sigmoid gates in one
    contiguous slab; all step buffers are preallocated.
    """
    p = model.params
    dtype = x.dtype
    batch, window_length, k = x.shape
    u = model.units
    f = model.filters
    kernel = model.kernel
    steps = window_length - kernel + 1
    u3 = 3 * u

    # conv as one (F, kernel*k) x (kernel*k, steps*B) product
    cols = np.lib.stride_tricks.sliding_window_view(x, kernel, axis=1)
    cols = np.ascontiguousarray(cols.transpose(3, 2, 1, 0)).reshape(kernel * k, steps * batch)
    wmat = np.ascontiguousarray(p["conv_w"].reshape(f, kernel * k))
    feat = wmat @ cols
    feat += p["conv_b"][:, None]
    np.maximum(feat, 0.0, out=feat)
    feat = feat.reshape(f, steps, batch)

    wh_sig = np.ascontiguousarray(p["lstm_wh"][:, :u3].T)
    wh_g = np.ascontiguousarray(p["lstm_wh"][:, u3:].T)
    wx_sig = np.ascontiguousarray(p["lstm_wx"][:, :u3].T)
    wx_g = np.ascontiguousarray(p["lstm_wx"][:, u3:].T)
    b_sig = np.ascontiguousarray(p["lstm_b"][:u3])[:, None]
    b_g = np.ascontiguousarray(p["lstm_b"][u3:])[:, None]

    h = np.zeros((u, batch), dtype=dtype)
    c = np.zeros((u, batch), dtype=dtype)
    z_sig = np.empty((u3, batch), dtype=dtype)
    zx_sig = np.empty_like(z_sig)
    z_g = np.empty((u, batch), dtype=dtype)
    zx_g = np.empty_like(z_g)
    scratch = np.empty((u, batch), dtype=dtype)
    for t in range(steps):
        feat_t = feat[:, t, :]
        np.matmul(wh_sig, h, out=z_sig)
        np.matmul(wx_sig, feat_t, out=zx_sig)
        z_sig += zx_sig
        z_sig += b_sig
        _sigmoid_inplace(z_sig)
        np.matmul(wh_g, h, out=z_g)
        np.matmul(wx_g, feat_t, out=zx_g)
        z_g += zx_g
        z_g += b_g
        np.tanh(z_g, out=z_g)
        c *= z_sig[u : 2 * u]                    # forget
        np.multiply(z_sig[:u], z_g, out=scratch)  # input * candidate
        c += scratch
        np.tanh(c, out=scratch)
        np.multiply(z_sig[2 * u : u3], scratch, out=h)

    dense = p["dense_w"].T @ h
    dense += p["dense_b"][:, None]
    np.maximum(dense, 0.0, out=dense)
    out = (p["out_w"].T @ dense)
    out += p["out_b"][:, None]
    out = np.ascontiguousarray(out.T)
    if not np.isfinite(out).all():
        raise NonFiniteActivationError("forward pass produced non-finite outputs")
    return out


def forward_batch(model: ForecastModel, x: np.ndarray, with_cache: bool = False):
    """Run the network on a (B, W, k) batch, returning (B, horizon) outputs.

    With ``with_cache`` the per-step activations needed by
    :func:`backward_batch` are retained.
    """
    x = _check_batch(model, x)
    if not with_cache:
        return _forward_inference(model, x)
    p = model.params
    batch = x.shape[0]
    u = model.units

    cols, feat_pre, feat = _conv_features(model, x)
    steps = feat.shape[1]

    h = np.zeros((batch, u), dtype=x.dtype)
    c = np.zeros((batch, u), dtype=x.dtype)
    gates_i = np.empty((steps, batch, u), dtype=x.dtype)
    gates_f = np.empty_like(gates_i)
    gates_g = np.empty_like(gates_i)
    gates_o = np.empty_like(gates_i)
    tanh_c = np.empty_like(gates_i)
    c_prev = np.empty_like(gates_i)
    h_seq = np.empty((steps + 1, batch, u), dtype=x.dtype)
    h_seq[0] = h

    for t in range(steps):
        z = feat[:, t, :] @ p["lstm_wx"] + h @ p["lstm_wh"] + p["lstm_b"]
        i = _sigmoid(z[:, :u])
        f = _sigmoid(z[:, u : 2 * u])
        o = _sigmoid(z[:, 2 * u : 3 * u])
        g = np.tanh(z[:, 3 * u :])
        c_prev[t] = c
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        gates_i[t], gates_f[t], gates_g[t], gates_o[t] = i, f, g, o
        tanh_c[t] = tc
        h_seq[t + 1] = h

    dense_pre, dense, out = _head(model, h)
    cache = {
        "x_cols": cols, "feat_pre": feat_pre, "feat": feat,
        "i": gates_i, "f": gates_f, "g": gates_g, "o": gates_o,
        "tanh_c": tanh_c, "c_prev": c_prev, "h_seq": h_seq,
        "dense_pre": dense_pre, "dense": dense,
    }
    return out, cache


def forward(model: ForecastModel, window_input: np.ndarray) -> np.ndarray:
    """Predict one horizon vector from a single (W, k) input."""
    window_input = np.asarray(window_input)
    if window_input.shape != model.input_shape:
        raise ShapeMismatchError(
            f"expected input of shape {model.input_shape}, got {window_input.shape}"
        )
    return forward_batch(model, window_input[None])[0]


def backward_batch(
    model: ForecastModel, cache: dict, dout: np.ndarray
) -> dict[str, np.ndarray]:
    """Gradients of a scalar loss w.r.t. every parameter, given dL/d(output).

    Backpropagates through the linear head, the full LSTM recurrence, and the
    convolution; mirrors :func:`forward_batch` exactly.
    """
    p = model.params
    u = model.units
    steps = cache["feat"].shape[1]

    grads = {name: np.zeros_like(arr) for name, arr in p.items()}

    dense = cache["dense"]
    grads["out_w"] = dense.T @ dout
    grads["out_b"] = dout.sum(axis=0)
    ddense = dout @ p["out_w"].T
    ddense_pre = ddense * (cache["dense_pre"] > 0)
    h_last = cache["h_seq"][steps]
    grads["dense_w"] = h_last.T @ ddense_pre
    grads["dense_b"] = ddense_pre.sum(axis=0)

    dh = ddense_pre @ p["dense_w"].T
    dc = np.zeros_like(dh)
    dfeat = np.zeros_like(cache["feat"])
    i, f, g, o = cache["i"], cache["f"], cache["g"], cache["o"]
    tanh_c, c_prev, h_seq = cache["tanh_c"], cache["c_prev"], cache["h_seq"]

    for t in range(steps - 1, -1, -1):
        do = dh * tanh_c[t]
        dct = dh * o[t] * (1.0 - tanh_c[t] ** 2) + dc
        di = dct * g[t]
        dg = dct * i[t]
        df = dct * c_prev[t]
        dc = dct * f[t]
        dz = np.concatenate(
            [
                di * i[t] * (1.0 - i[t]),
                df * f[t] * (1.0 - f[t]),
                do * o[t] * (1.0 - o[t]),
                dg * (1.0 - g[t] ** 2),
            ],
            axis=1,
        )
        grads["lstm_wx"] += cache["feat"][:, t, :].T @ dz
        grads["lstm_wh"] += h_seq[t].T @ dz
        grads["lstm_b"] += dz.sum(axis=0)
        dfeat[:, t, :] = dz @ p["lstm_wx"].T
        dh = dz @ p["lstm_wh"].T

    dfeat_pre = dfeat * (cache["feat_pre"] > 0)
    flat_cols = cache["x_cols"].reshape(-1, cache["x_cols"].shape[-1])
    flat_d = dfeat_pre.reshape(-1, model.filters)
    dwmat = flat_cols.T @ flat_d  # (kernel*k, filters)
    k = model.input_shape[1]
    grads["conv_w"] = dwmat.reshape(model.kernel, k, model.filters).transpose(2, 0, 1)
    grads["conv_b"] = flat_d.sum(axis=0)
    return grads


def mse_loss_and_grads(
    model: ForecastModel, inputs: np.ndarray, targets: np.ndarray
) -> tuple[float, dict[str, np.ndarray], np.ndarray]:
    """Mean squared error over batch and horizon plus its parameter gradients."""
    out, cache = forward_batch(model, inputs, with_cache=True)
    targets = np.asarray(targets, dtype=out.dtype)
    if targets.shape != out.shape:
        raise ShapeMismatchError(f"targets {targets.shape} vs outputs {out.shape}")
    err = out - targets
    loss = float((err * err).mean())
    dout = 2.0 * err / err.size
    return loss, backward_batch(model, cache, dout), out


def flatten_params(model: ForecastModel) -> np.ndarray:
    return np.concatenate([model.params[name].ravel() for name in PARAM_ORDER])


def unflatten_params(model: ForecastModel, flat: np.ndarray) -> ForecastModel:
    params = {}
    pos = 0
    for name in PARAM_ORDER:
        ref = model.params[name]
        params[name] = flat[pos : pos + ref.size].reshape(ref.shape).astype(ref.dtype)
        pos += ref.size
    if pos != flat.size:
        raise ShapeMismatchError(f"flat vector has {flat.size} entries, expected {pos}")
    return ForecastModel(params=params, input_shape=model.input_shape)
