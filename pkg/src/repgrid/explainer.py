"""Per-window counterfactual explanation metrics.

Attribution contrasts a window against a background input (the training-mean
window): a coalition of features keeps its window values while every feature
outside the coalition is replaced by the background. Exact Shapley values are
computed by enumerating all 2^F coalitions of the explained scalar, the mean
of the predicted horizon. The additive identity base + sum(phi) = prediction
then holds by construction.

Feature groups are caller-defined: the k input variables for multivariate
data, or contiguous lag segments for univariate data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import SlidingWindow
from .errors import TooManyFeaturesError, UnivariateError, ZeroVarianceError
from .forecaster import ForecastModel, forward_batch
from .stats import pearson, rmse

MAX_EXACT_FEATURES = 12
_EVAL_CHUNK = 2048


@dataclass(frozen=True)
class FeatureGroup:
    """A named subset of input cells that moves as one attribution unit."""

    label: str
    mask: np.ndarray  # boolean (W, k)


@dataclass(frozen=True)
class Attribution:
    window_id: int
    base: float
    phi: np.ndarray
    feature_labels: tuple[str, ...]

    @property
    def explained(self) -> float:
        return self.base + float(self.phi.sum())


@dataclass(frozen=True)
class WindowMetrics:
    """The bivariate stripe payload for one window."""

    window_id: int
    rmse: float
    corr: float | None
    shap_scalar: float
    split: str = ""


def variable_features(input_shape: tuple[int, int], labels: Sequence[str]) -> tuple[FeatureGroup, ...]:
    """One feature per input variable (multivariate attribution)."""
    window_length, k = input_shape
    if len(labels) != k:
        raise ValueError(f"expected {k} labels, got {len(labels)}")
    groups = []
    for j, label in enumerate(labels):
        mask = np.zeros((window_length, k), dtype=bool)
        mask[:, j] = True
        groups.append(FeatureGroup(label=label, mask=mask))
    return tuple(groups)


def segment_features(input_shape: tuple[int, int], n_segments: int = 12) -> tuple[FeatureGroup, ...]:
    """Contiguous equal lag segments spanning all variables (univariate use).

    Segment boundaries are rounded so the W lags split as evenly as possible;
    labels carry the covered lag range.
    """
    window_length, k = input_shape
    if not 1 <= n_segments <= window_length:
        raise ValueError("n_segments must lie in [1, window_length]")
    edges = [round(i * window_length / n_segments) for i in range(n_segments + 1)]
    groups = []
    for i in range(n_segments):
        lo, hi = edges[i], edges[i + 1]
        mask = np.zeros((window_length, k), dtype=bool)
        mask[lo:hi, :] = True
        groups.append(FeatureGroup(label=f"lags[{lo}:{hi}]", mask=mask))
    return tuple(groups)


def _validate_partition(features: Sequence[FeatureGroup], shape: tuple[int, int]) -> None:
    total = np.zeros(shape, dtype=int)
    for grp in features:
        if grp.mask.shape != shape:
            raise ValueError(f"feature {grp.label!r} mask shape {grp.mask.shape} != {shape}")
        total += grp.mask
    if (total != 1).any():
        raise ValueError("feature masks must partition the input exactly once")


def background_window(train_windows: Sequence[SlidingWindow]) -> np.ndarray:
    """Training-mean input, the neutral reference every coalition falls back to."""
    return np.mean([w.input for w in train_windows], axis=0)


def _predict_batch(model, inputs: np.ndarray) -> np.ndarray:
    """(B, W, k) inputs -> (B, horizon) outputs for a model or stub callable."""
    if isinstance(model, ForecastModel):
        return forward_batch(model, inputs)
    return np.asarray(model(inputs))


def _input_shape(model, window: SlidingWindow) -> tuple[int, int]:
    if isinstance(model, ForecastModel):
        return model.input_shape
    return window.input.shape


def _coalition_values(
    model,
    window_input: np.ndarray,
    background: np.ndarray,
    features: Sequence[FeatureGroup],
) -> np.ndarray:
    """Explained scalar (horizon-mean prediction) for all 2^F coalitions.

    Coalition bits follow feature order: bit j set means feature j keeps its
    window values.
    """
    n_feat = len(features)
    n_coal = 1 << n_feat
    owner = np.zeros(window_input.shape, dtype=np.int64)  # feature owning each cell
    for j, grp in enumerate(features):
        owner[grp.mask] = j
    bits = (np.arange(n_coal)[:, None] >> np.arange(n_feat)[None, :] & 1).astype(bool)
    values = np.empty(n_coal)
    for lo in range(0, n_coal, _EVAL_CHUNK):
        keep = bits[lo : lo + _EVAL_CHUNK][:, owner]  # (chunk, W, k)
        inputs = np.where(keep, window_input, background)
        out = _predict_batch(model, inputs)
        values[lo : lo + _EVAL_CHUNK] = out.mean(axis=1)
    return values


def shap_values(
    model,
    window: SlidingWindow,
    background: np.ndarray,
    features: Sequence[FeatureGroup],
) -> Attribution:
    """Exact Shapley attribution of the window's horizon-mean prediction.

    phi_j = sum over coalitions S not containing j of
    |S|! (F-|S|-1)! / F! * (v(S + j) - v(S)), with v evaluated by masking
    absent features to the background. ``model`` is a ForecastModel or any
    callable mapping (B, W, k) inputs to (B, horizon) outputs.
    """
    n_feat = len(features)
    if n_feat > MAX_EXACT_FEATURES:
        raise TooManyFeaturesError(
            f"{n_feat} features exceed the exact-enumeration limit of "
            f"{MAX_EXACT_FEATURES}; group features coarser"
        )
    shape = _input_shape(model, window)
    _validate_partition(features, shape)
    if background.shape != shape:
        raise ValueError(f"background shape {background.shape} != {shape}")

    values = _coalition_values(model, window.input, background, features)
    fact = [math.factorial(i) for i in range(n_feat + 1)]
    weight_by_size = np.array(
        [fact[size] * fact[n_feat - size - 1] / fact[n_feat] for size in range(n_feat)]
    )
    coalitions = np.arange(1 << n_feat)
    sizes = np.array([int(s).bit_count() for s in coalitions])

    phi = np.zeros(n_feat)
    for j in range(n_feat):
        without = coalitions[(coalitions >> j & 1) == 0]
        phi[j] = float(
            np.sum(weight_by_size[sizes[without]] * (values[without | 1 << j] - values[without]))
        )
    return Attribution(
        window_id=window.index,
        base=float(values[0]),
        phi=phi,
        feature_labels=tuple(grp.label for grp in features),
    )


def window_shap_scalar(attribution: Attribution) -> float:
    """Total attributed deviation from the base prediction (sum of phi)."""
    return float(attribution.phi.sum())


def window_correlation(prediction: np.ndarray, actual: np.ndarray) -> float | None:
    """Pearson correlation between predicted and observed horizon.

    Returns None when either vector is constant: such windows are excluded
    from correlation-coded views but keep their RMSE.
    """
    try:
        return pearson(prediction, actual)
    except ZeroVarianceError:
        return None


def window_metrics(
    window: SlidingWindow,
    prediction: np.ndarray,
    actual: np.ndarray,
    attribution: Attribution,
    split: str = "",
) -> WindowMetrics:
    return WindowMetrics(
        window_id=window.index,
        rmse=rmse(prediction, actual),
        corr=window_correlation(prediction, actual),
        shap_scalar=window_shap_scalar(attribution),
        split=split,
    )


def variable_importance(
    attributions: Sequence[Attribution], k: int
) -> tuple[tuple[str, float], ...]:
    """Rank variables by mean |phi| over all attributed windows.

    Only meaningful when features are the k input variables; ties break on
    the variable id so the ranking is deterministic.
    """
    if k <= 1:
        raise UnivariateError("variable importance requires a multivariate dataset")
    if not attributions:
        raise ValueError("no attributions supplied")
    labels = attributions[0].feature_labels
    for att in attributions:
        if att.feature_labels != labels:
            raise ValueError("attributions mix different feature definitions")
    magnitude = np.mean([np.abs(att.phi) for att in attributions], axis=0)
    ranked = sorted(zip(labels, magnitude), key=lambda kv: (-kv[1], kv[0]))
    return tuple((label, float(value)) for label, value in ranked)
