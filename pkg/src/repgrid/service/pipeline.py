"""End-to-end sweep: transform -> stats -> train -> predict -> explain ->
view preparation, persisted as a run store.

Explanation metrics are precomputed here for every window because exact
attribution is far too slow for query time; the API stays read-only. All
randomness flows from the model config seed, so re-running a sweep with the
same inputs rewrites every file with identical bytes.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable

import numpy as np

from .. import visprep
from ..core import (
    MinMaxNormalizer,
    Representation,
    TimeSeriesDataset,
    TransformConfig,
    apply_smoothing,
    build_representation,
    representation_id,
    split_train_test,
)
from ..errors import RepgridError
from ..explainer import (
    background_window,
    segment_features,
    shap_values,
    variable_features,
    variable_importance,
    window_correlation,
)
from ..forecaster import ModelConfig, PARAM_ORDER, forward_batch, init_model, predict_all, train
from ..stats import adf_test, peak_acf, rmse
from .store import (
    STORE_FORMAT_VERSION,
    MANIFEST,
    RunStore,
    rep_dirname,
    safe_filename,
    write_array,
    write_json,
)

log = logging.getLogger("repgrid.pipeline")

DEFAULT_SAMPLE_SIZE = 1000


def _progress(progress: Callable[[str], None] | None, message: str) -> None:
    if progress is not None:
        progress(message)
    else:
        log.info("%s", message)


def _catalog_entries(dataset: TimeSeriesDataset, config: TransformConfig) -> list[dict]:
    """Plottable 1-D series: the variables, plus every smoothed variant of the
    target for univariate data (skip lengths do not change the series)."""
    entries = []
    seen_files = set()

    def add(entry_id, kind, values, offset, display, smoothing=None):
        file = safe_filename(entry_id)
        while file in seen_files:
            file += "_"
        seen_files.add(file)
        entries.append(
            {
                "id": entry_id,
                "file": file,
                "kind": kind,
                "offset": offset,
                "length": int(len(values)),
                "display_name": display,
                "smoothing": smoothing,
                "_values": np.asarray(values, dtype=np.float64),
            }
        )

    if dataset.k == 1:
        target = dataset.variables[dataset.target_index]
        for spec in config.smoothings:
            smoothed = apply_smoothing(target.values, spec)[:, 0]
            add(
                spec.label,
                "smoothed",
                smoothed,
                spec.trim,
                f"{target.display_name} ({spec.label})",
                {"m": spec.m, "method": spec.method},
            )
        if not any(e["id"] == "Raw" for e in entries):
            add("Raw", "smoothed", target.values, 0, f"{target.display_name} (Raw)",
                {"m": 1, "method": "raw"})
    else:
        for var in dataset.variables:
            add(var.id, "variable", var.values, 0, var.display_name)
    return entries


def _aligned_pair(xe: dict, ye: dict) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Overlap of two catalog series on the raw timeline; returns x, y, t."""
    lo = max(xe["offset"], ye["offset"])
    hi = min(xe["offset"] + xe["length"], ye["offset"] + ye["length"])
    t = np.arange(lo, hi)
    x = xe["_values"][lo - xe["offset"] : hi - xe["offset"]]
    y = ye["_values"][lo - ye["offset"] : hi - ye["offset"]]
    return x, y, t


def mosaic_for_pair(
    xe: dict, ye: dict, grid: int, target_values: np.ndarray | None
) -> visprep.MosaicGrid:
    """Default mosaic between two catalog series.

    Multivariate pairs are colored by the target variable's mean per cell;
    univariate smoothing pairs show point density.
    """
    x, y, t = _aligned_pair(xe, ye)
    color = target_values[t] if target_values is not None else None
    return visprep.mosaic_matrix(
        x, y, color, grid=grid, x_variable=xe["id"], y_variable=ye["id"]
    )


def mosaic_payload(grid_obj: visprep.MosaicGrid, grid: int, color_label: str, n: int) -> dict:
    return {
        "x": grid_obj.x_variable,
        "y": grid_obj.y_variable,
        "grid": grid,
        "x_edges": list(grid_obj.x_edges),
        "y_edges": list(grid_obj.y_edges),
        "cell_counts": [list(row) for row in grid_obj.cell_counts],
        "cell_values": [list(row) for row in grid_obj.cell_values],
        "color": color_label,
        "n_points": n,
    }


def _vsup_payload(scheme: visprep.VSUPScheme, metric1: str) -> dict:
    return {
        "metric1": metric1,
        "metric2": "rmse",
        "dim1_edges": list(scheme.dim1_edges),
        "dim2_edges": list(scheme.dim2_edges),
        "tree": list(visprep.VSUP_TREE),
        "cells": visprep.vsup_cell_table(scheme),
    }


def _write_params(rep_dir: Path, model) -> None:
    tensors = []
    offset = 0
    chunks = []
    for name in PARAM_ORDER:
        arr = np.ascontiguousarray(model.params[name], dtype="<f8")
        tensors.append(
            {"name": name, "shape": list(arr.shape), "offset": offset, "size": int(arr.size)}
        )
        offset += arr.size
        chunks.append(arr.ravel())
    (rep_dir / "params.bin").write_bytes(np.concatenate(chunks).tobytes(order="C"))
    write_json(
        rep_dir / "params.json",
        {
            "dtype": "<f8",
            "input_shape": list(model.input_shape),
            "tensors": tensors,
            "total": offset,
        },
    )


def _representation_stats(rep: Representation, target_index: int) -> dict:
    target_series = rep.series[:, target_index]
    stats: dict = {"adf": None, "acf": None, "variable_importance": None}
    try:
        adf = adf_test(target_series)
        stats["adf"] = {
            "statistic": adf.statistic,
            "lags_used": adf.lags_used,
            "stationary": adf.stationary,
            "critical_value_5pct": adf.critical_value_5pct,
        }
    except RepgridError as exc:
        log.debug("adf unavailable for %s: %s", rep.id, exc)
    try:
        value, lag = peak_acf(target_series)
        stats["acf"] = {"value": value, "lag": lag}
    except RepgridError as exc:
        log.debug("acf unavailable for %s: %s", rep.id, exc)
    return stats


def _run_one(
    rep: Representation,
    dataset: TimeSeriesDataset,
    transform: TransformConfig,
    model_config: ModelConfig,
    shap_segments: int,
    progress: Callable[[str], None] | None,
) -> dict:
    """Train, predict, and explain one representation; returns its artifacts."""
    train_windows, test_windows = split_train_test(rep.windows, transform.split_ratio)
    normalizer = MinMaxNormalizer.fit(train_windows, dataset.target_index)
    norm_train = normalizer.transform_all(train_windows)
    norm_test = normalizer.transform_all(test_windows)
    all_norm = norm_train + norm_test

    model = init_model(model_config, input_shape=(transform.window_length, dataset.k))
    model, result = train(
        model, norm_train, norm_test, model_config, denorm=normalizer.inverse_target
    )
    _progress(
        progress,
        f"{rep.id}: trained {model_config.epochs} epochs in {result.wall_time:.1f}s "
        f"(train_rmse={result.train_rmse:.4g}, val_rmse={result.val_rmse:.4g})",
    )

    predictions = predict_all(model, all_norm)
    background = background_window(norm_train)
    if dataset.k > 1:
        features = variable_features(model.input_shape, dataset.variable_ids)
    else:
        features = segment_features(
            model.input_shape, min(shap_segments, transform.window_length)
        )

    # Exact enumeration is 2^F forwards per window; single precision keeps the
    # sweep fast and is far below the quantizers' bin resolution.
    model32 = model.astype(np.float32)

    def shap_predictor(batch: np.ndarray) -> np.ndarray:
        return forward_batch(model32, batch).astype(np.float64)

    target_scale = float(normalizer.scales[dataset.target_index])
    n_train = len(train_windows)
    rows = []
    attributions = []
    pred_matrix = np.empty((rep.n_windows, transform.horizon))
    for window, norm_window, pred in zip(rep.windows, all_norm, predictions):
        att = shap_values(shap_predictor, norm_window, background, features)
        attributions.append(att)
        y_hat = normalizer.inverse_target(pred.y_hat)
        pred_matrix[window.index] = y_hat
        rows.append(
            {
                "index": window.index,
                "start": window.start,
                "rmse": rmse(y_hat, window.target),
                "corr": window_correlation(y_hat, window.target),
                "shap": float(att.phi.sum()) * target_scale,
                "split": "train" if window.index < n_train else "test",
            }
        )

    stats = _representation_stats(rep, dataset.target_index)
    if dataset.k > 1:
        ranked = variable_importance(attributions, dataset.k)
        stats["variable_importance"] = [
            [label, value * target_scale] for label, value in ranked
        ]

    return {
        "meta": {
            "id": rep.id,
            "method": rep.smoothing.method,
            "m": rep.smoothing.m,
            "skip": rep.skip,
            "offset": rep.offset,
            "series_length": int(rep.series.shape[0]),
            "n_windows": rep.n_windows,
            "n_train": n_train,
            "window_length": transform.window_length,
            "horizon": transform.horizon,
            "normalization": {
                "mins": [float(v) for v in normalizer.mins],
                "scales": [float(v) for v in normalizer.scales],
                "target_index": dataset.target_index,
            },
        },
        "series": rep.series,
        "model": model,
        "training": {
            "epoch_losses": [float(v) for v in result.epoch_losses],
            "train_rmse": result.train_rmse,
            "val_rmse": result.val_rmse,
        },
        "stats": stats,
        "window_metrics": rows,
        "predictions": pred_matrix,
    }


def run_pipeline(
    dataset: TimeSeriesDataset,
    transform: TransformConfig,
    model_config: ModelConfig,
    out_dir: str | Path,
    shap_segments: int = 12,
    mosaic_grid: int = 5,
    progress: Callable[[str], None] | None = None,
) -> RunStore:
    """Execute the full sweep and persist a run store at ``out_dir``.

    Failures of individual smoothing/skip combinations are recorded in the
    manifest without aborting the sweep; dataset-level problems raise.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    write_json(
        out / "dataset" / "meta.json",
        {
            "name": dataset.name,
            "frequency": dataset.frequency,
            "target": dataset.target_id,
            "variables": [
                {"id": v.id, "display_name": v.display_name, "unit": v.unit}
                for v in dataset.variables
            ],
            "length": dataset.length,
            "timestamps": list(dataset.timestamps),
        },
    )
    write_array(out / "dataset" / "values", dataset.values)

    rep_rows = []
    all_corr: list[float] = []
    all_rmse: list[float] = []
    all_shap: list[float] = []
    for smoothing in transform.smoothings:
        for skip in transform.skips:
            rep_id = representation_id(smoothing, skip)
            try:
                rep = build_representation(dataset, smoothing, skip, transform)
                artifacts = _run_one(
                    rep, dataset, transform, model_config, shap_segments, progress
                )
            except Exception as exc:  # sweep survives individual failures
                _progress(progress, f"{rep_id}: FAILED ({exc})")
                rep_rows.append(
                    {"id": rep_id, "dir": rep_dirname(rep_id), "status": "failed",
                     "error": str(exc), "n_windows": None}
                )
                continue

            rep_dir = out / "representations" / rep_dirname(rep_id)
            rep_dir.mkdir(parents=True, exist_ok=True)
            write_json(rep_dir / "meta.json", artifacts["meta"])
            write_array(rep_dir / "series", artifacts["series"])
            _write_params(rep_dir, artifacts["model"])
            write_json(rep_dir / "training.json", artifacts["training"])
            write_json(rep_dir / "stats.json", artifacts["stats"])
            write_json(rep_dir / "window_metrics.json", artifacts["window_metrics"])
            write_array(rep_dir / "predictions", artifacts["predictions"])
            rep_rows.append(
                {"id": rep_id, "dir": rep_dirname(rep_id), "status": "ok",
                 "error": None, "n_windows": artifacts["meta"]["n_windows"]}
            )
            for row in artifacts["window_metrics"]:
                if row["corr"] is not None:
                    all_corr.append(row["corr"])
                all_rmse.append(row["rmse"])
                all_shap.append(row["shap"])

    if not all_rmse:
        all_rmse = [0.0]
    corr_scheme = visprep.build_vsup(
        np.asarray(all_corr if all_corr else [0.0]), np.asarray(all_rmse),
        metric1_range=(-1.0, 1.0),
    )
    shap_scheme = visprep.build_vsup(
        np.asarray(all_shap if all_shap else [0.0]), np.asarray(all_rmse)
    )
    write_json(out / "shared" / "vsup_corr.json", _vsup_payload(corr_scheme, "corr"))
    write_json(out / "shared" / "vsup_shap.json", _vsup_payload(shap_scheme, "shap"))

    catalog = _catalog_entries(dataset, transform)
    horizon_ids = []
    for entry in catalog:
        write_array(out / "catalog" / "series" / entry["file"], entry["_values"])
        try:
            bands = visprep.horizon_bands(entry["_values"], variable_id=entry["id"])
        except RepgridError:
            continue
        horizon_ids.append(entry["id"])
        write_json(
            out / "shared" / "horizon" / f"{entry['file']}.json",
            {
                "id": entry["id"],
                "offset": entry["offset"],
                "minimum": bands.minimum,
                "band_height": bands.band_height,
                "band_index": list(bands.band_index),
                "fill": list(bands.fill),
            },
        )

    target_values = dataset.variables[dataset.target_index].values if dataset.k > 1 else None
    color_label = dataset.target_id if dataset.k > 1 else "density"
    for xe in catalog:
        for ye in catalog:
            grid_obj = mosaic_for_pair(xe, ye, mosaic_grid, target_values)
            n = int(np.sum([sum(row) for row in grid_obj.cell_counts]))
            write_json(
                out / "shared" / "mosaic" / f"{xe['file']}__{ye['file']}__g{mosaic_grid}.json",
                mosaic_payload(grid_obj, mosaic_grid, color_label, n),
            )
    write_json(
        out / "catalog" / "catalog.json",
        [{k: v for k, v in entry.items() if k != "_values"} for entry in catalog],
    )

    write_json(
        out / MANIFEST,
        {
            "format_version": STORE_FORMAT_VERSION,
            "dataset": {
                "name": dataset.name,
                "frequency": dataset.frequency,
                "target": dataset.target_id,
                "variables": list(dataset.variable_ids),
                "length": dataset.length,
                "k": dataset.k,
            },
            "config": {
                "transform": {
                    "smoothings": [
                        {"method": s.method, "m": s.m} for s in transform.smoothings
                    ],
                    "skips": list(transform.skips),
                    "window_length": transform.window_length,
                    "horizon": transform.horizon,
                    "split_ratio": transform.split_ratio,
                },
                "model": {
                    "conv_filters": model_config.conv_filters,
                    "conv_kernel": model_config.conv_kernel,
                    "lstm_units": model_config.lstm_units,
                    "dense_units": model_config.dense_units,
                    "horizon": model_config.horizon,
                    "learning_rate": model_config.learning_rate,
                    "epochs": model_config.epochs,
                    "batch_size": model_config.batch_size,
                    "seed": model_config.seed,
                },
                "shap": {
                    "mode": "variables" if dataset.k > 1 else "segments",
                    "segments": None if dataset.k > 1 else shap_segments,
                },
            },
            "representations": rep_rows,
            "shared": {
                "vsup": ["corr", "shap"],
                "catalog": [entry["id"] for entry in catalog],
                "horizon": horizon_ids,
                "mosaic_grid": mosaic_grid,
            },
            "sampling": {"default_n": DEFAULT_SAMPLE_SIZE, "seed": model_config.seed},
        },
    )
    return RunStore(out)
