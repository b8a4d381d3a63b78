"""repgrid: a representation tuning workbench for time-series forecasting.

Transforms a raw series into a smoothing-by-sampling grid of representations,
trains a small convolutional-recurrent forecaster per representation, derives
per-window explanation metrics, and persists everything as a run store served
over a read-only JSON API.
"""

from . import core, errors, explainer, forecaster, stats, visprep
from .core import (
    Representation,
    SlidingWindow,
    SmoothingSpec,
    TimeSeriesDataset,
    TransformConfig,
    VariableSeries,
    enumerate_representations,
    load_dataset,
    moving_average,
    weighted_moving_average,
)
from .forecaster import ForecastModel, ModelConfig

__version__ = "0.1.0"

__all__ = [
    "ForecastModel",
    "ModelConfig",
    "Representation",
    "SlidingWindow",
    "SmoothingSpec",
    "TimeSeriesDataset",
    "TransformConfig",
    "VariableSeries",
    "core",
    "enumerate_representations",
    "errors",
    "explainer",
    "forecaster",
    "load_dataset",
    "moving_average",
    "stats",
    "visprep",
    "weighted_moving_average",
]
