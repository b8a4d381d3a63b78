import numpy as np
import pytest

from repgrid.core import (
    SmoothingSpec,
    TransformConfig,
    generate_windows,
    load_dataset,
)
from repgrid.forecaster import ModelConfig, init_model
from repgrid.service import run_pipeline

from fixtures import write_pollutant_csv, write_sunspot_csv


def make_sine_windows(n_windows=200, window_length=24, horizon=6, period=24.0, noise=0.0, seed=0):
    length = window_length + horizon + n_windows - 1
    t = np.arange(length, dtype=float)
    series = 0.5 + 0.4 * np.sin(2 * np.pi * t / period)
    if noise:
        series = series + np.random.default_rng(seed).normal(0, noise, length)
    return generate_windows(series, window_length, horizon, 1, 0)


@pytest.fixture(scope="session")
def tiny_model():
    """A ~500-parameter net for forward/gradient tests."""
    config = ModelConfig(
        horizon=3, seed=11, conv_filters=4, conv_kernel=3, lstm_units=8, dense_units=8, epochs=1
    )
    return init_model(config, (8, 2))


@pytest.fixture(scope="session")
def small_store(tmp_path_factory):
    """A quick univariate sweep persisted to disk, shared by store/API tests."""
    root = tmp_path_factory.mktemp("small_store")
    csv_path = write_sunspot_csv(root / "toy.csv", months=140, seed=99)
    dataset = load_dataset(csv_path, target="sunspots")
    transform = TransformConfig(
        smoothings=(SmoothingSpec("raw"), SmoothingSpec("ma", 3)),
        skips=(1, 2),
        window_length=30,
        horizon=10,
    )
    model_config = ModelConfig(
        horizon=10, seed=5, conv_filters=4, conv_kernel=3, lstm_units=6,
        dense_units=6, epochs=2, batch_size=16,
    )
    store = run_pipeline(
        dataset, transform, model_config, root / "store",
        shap_segments=6, progress=lambda _msg: None,
    )
    return store


@pytest.fixture(scope="session")
def pollutant_csv(tmp_path_factory):
    root = tmp_path_factory.mktemp("pollutants")
    return write_pollutant_csv(root / "pollutants.csv")
