"""Dataset ingestion, smoothing transforms, sliding-window sampling, and
representation enumeration.

A *representation* is one smoothing method applied to every variable plus one
skip length used to stride sliding windows over the smoothed series. Windows
are the minimum analysis unit downstream: each carries a W-step multivariate
input slice and the following horizon of the target variable.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateTimestampError,
    MissingValueError,
    RepresentationBuildError,
    SeriesTooShortError,
    SpanTooLargeError,
    TooFewWindowsError,
    UnknownTargetError,
)

RAW = "raw"
MA = "ma"
WMA = "wma"

_METHOD_LABELS = {RAW: "Raw", MA: "MA", WMA: "WMA"}


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class VariableSeries:
    """One named variable of a dataset."""

    id: str
    display_name: str
    values: np.ndarray
    unit: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if not np.isfinite(self.values).all():
            raise MissingValueError(int(np.flatnonzero(~np.isfinite(self.values))[0]), self.id)


@dataclass(frozen=True)
class TimeSeriesDataset:
    """Ordered multivariate observations with a designated target variable."""

    name: str
    timestamps: tuple[str, ...]
    variables: tuple[VariableSeries, ...]
    target_id: str
    frequency: str

    def __post_init__(self):
        lengths = {len(v.values) for v in self.variables}
        if len(lengths) != 1:
            raise ValueError(f"variables have mixed lengths: {sorted(lengths)}")
        if self.length != len(self.timestamps):
            raise ValueError("timestamp count does not match variable length")
        if self.length < 2:
            raise SeriesTooShortError("dataset needs at least 2 observations")
        if self.target_id not in self.variable_ids:
            raise UnknownTargetError(f"target {self.target_id!r} names no variable")

    @property
    def length(self) -> int:
        return len(self.variables[0].values)

    @property
    def k(self) -> int:
        return len(self.variables)

    @property
    def variable_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.variables)

    @property
    def target_index(self) -> int:
        return self.variable_ids.index(self.target_id)

    @property
    def values(self) -> np.ndarray:
        """All variables as a read-only (T, k) matrix, column order preserved."""
        return _frozen(np.column_stack([v.values for v in self.variables]))


@dataclass(frozen=True)
class SmoothingSpec:
    """A smoothing method plus its span m (m is ignored for raw)."""

    method: str
    m: int = 1

    def __post_init__(self):
        if self.method not in _METHOD_LABELS:
            raise ValueError(f"unknown smoothing method {self.method!r}")
        if self.m < 1:
            raise ValueError("smoothing span m must be >= 1")
        if self.method == RAW:
            object.__setattr__(self, "m", 1)

    @property
    def label(self) -> str:
        if self.method == RAW:
            return "Raw"
        return f"{_METHOD_LABELS[self.method]}-{self.m}"

    @property
    def trim(self) -> int:
        """Points dropped from the front of the series: m - 1."""
        return self.m - 1


@dataclass(frozen=True)
class TransformConfig:
    smoothings: tuple[SmoothingSpec, ...]
    skips: tuple[int, ...]
    window_length: int
    horizon: int
    split_ratio: float = 0.8

    def __post_init__(self):
        if not self.smoothings:
            raise ValueError("at least one smoothing spec required")
        if not self.skips or any(s < 1 for s in self.skips):
            raise ValueError("skips must be a non-empty sequence of positive integers")
        if self.window_length < 1 or self.horizon < 1:
            raise ValueError("window_length and horizon must be >= 1")
        if not 0.0 < self.split_ratio < 1.0:
            raise ValueError("split_ratio must lie in (0, 1)")


@dataclass(frozen=True)
class SlidingWindow:
    """One (input, target) time slice of a smoothed series."""

    index: int
    start: int
    input: np.ndarray   # (W, k)
    target: np.ndarray  # (horizon,)

    def __post_init__(self):
        object.__setattr__(self, "input", _frozen(self.input))
        object.__setattr__(self, "target", _frozen(self.target))


@dataclass(frozen=True)
class Representation:
    """One smoothing+skip combination with its derived series and windows."""

    id: str
    smoothing: SmoothingSpec
    skip: int
    series: np.ndarray                      # (T', k) smoothed values
    windows: tuple[SlidingWindow, ...] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "series", _frozen(self.series))

    @property
    def offset(self) -> int:
        """Index shift of smoothed position 0 on the raw timeline."""
        return self.smoothing.trim

    @property
    def n_windows(self) -> int:
        return len(self.windows)


def representation_id(smoothing: SmoothingSpec, skip: int) -> str:
    return f"{smoothing.label}/Sk-{skip}"


# --- ingestion ---------------------------------------------------------------

def _parse_timestamp(raw: str):
    text = raw.strip()
    try:
        return int(text), text
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise ValueError(f"timestamp {raw!r} is neither an integer nor ISO-8601")
    return dt, text


def _infer_frequency(keys: Sequence) -> str:
    if not keys or isinstance(keys[0], int):
        return "steps"
    deltas = [(b - a).total_seconds() for a, b in zip(keys, keys[1:])]
    if not deltas:
        return "steps"
    med = sorted(deltas)[len(deltas) // 2]
    for label, seconds, slack in (
        ("hourly", 3600, 60),
        ("daily", 86400, 3600),
        ("weekly", 7 * 86400, 86400),
        ("monthly", 30.44 * 86400, 2 * 86400),
        ("yearly", 365.25 * 86400, 2 * 86400),
    ):
        if abs(med - seconds) <= slack:
            return label
    return "irregular"


def load_dataset(path: str | Path, target: str, name: str | None = None) -> TimeSeriesDataset:
    """Load a CSV (header row, first column timestamps, rest numeric variables).

    Rows are sorted by timestamp. Any empty, non-numeric, or non-finite cell
    rejects the file with :class:`MissingValueError`; repair is out of scope.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingValueError(0, "<header>", "file is empty")
        header = [h.strip() for h in header]
        if len(header) < 2:
            raise MissingValueError(0, "<header>", "need a timestamp column and at least one variable")
        var_names = header[1:]
        if target not in var_names:
            raise UnknownTargetError(f"target {target!r} not among columns {var_names}")

        rows = []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise MissingValueError(row_no, "<row>", f"expected {len(header)} cells, got {len(row)}")
            try:
                key, label = _parse_timestamp(row[0])
            except ValueError as exc:
                raise MissingValueError(row_no, header[0], str(exc))
            parsed = []
            for col_name, cell in zip(var_names, row[1:]):
                text = cell.strip()
                if not text:
                    raise MissingValueError(row_no, col_name)
                try:
                    value = float(text)
                except ValueError:
                    raise MissingValueError(row_no, col_name, f"not numeric: {cell!r}")
                if not math.isfinite(value):
                    raise MissingValueError(row_no, col_name, "non-finite value")
                parsed.append(value)
            rows.append((key, label, parsed))

    if len(rows) < 2:
        raise SeriesTooShortError(f"{path.name}: need at least 2 data rows, got {len(rows)}")
    try:
        rows.sort(key=lambda r: r[0])
    except TypeError:
        raise DuplicateTimestampError("timestamps mix integer and date formats")
    for (a, la, _), (b, lb, _) in zip(rows, rows[1:]):
        if a == b:
            raise DuplicateTimestampError(f"duplicate timestamp {la!r}")

    matrix = np.array([r[2] for r in rows], dtype=np.float64)
    variables = tuple(
        VariableSeries(id=nm, display_name=nm, values=matrix[:, j])
        for j, nm in enumerate(var_names)
    )
    return TimeSeriesDataset(
        name=name or path.stem,
        timestamps=tuple(r[1] for r in rows),
        variables=variables,
        target_id=target,
        frequency=_infer_frequency([r[0] for r in rows]),
    )


# --- smoothing ---------------------------------------------------------------

def _trailing_windows(values: np.ndarray, m: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1:
        raise ValueError("expected a 1-D sequence")
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > values.size:
        raise SpanTooLargeError(f"span m={m} exceeds series length {values.size}")
    return np.lib.stride_tricks.sliding_window_view(values, m)


def moving_average(values: np.ndarray, m: int) -> np.ndarray:
    """Trailing unweighted mean of the previous m points.

    Output index j is aligned to raw index j + m - 1, so the series shortens
    by m - 1 points instead of fabricating padded values. Computed against the
    window's last point so constant inputs reproduce exactly.
    """
    win = _trailing_windows(values, m)
    if m == 1:
        return win[:, 0].copy()
    ref = win[:, -1]
    return ref + (win - ref[:, None]).mean(axis=1)


def wma_weights(m: int) -> np.ndarray:
    """Arithmetic-progression weights 2*(j+1)/(m*(m+1)), oldest to newest."""
    return 2.0 * np.arange(1, m + 1, dtype=np.float64) / (m * (m + 1))


def weighted_moving_average(values: np.ndarray, m: int) -> np.ndarray:
    """Trailing weighted mean with the most recent point weighted highest.

    Weights grow in arithmetic progression toward the newest point and are
    normalized by 2/(m*(m+1)); alignment matches :func:`moving_average`.
    """
    win = _trailing_windows(values, m)
    if m == 1:
        return win[:, 0].copy()
    ref = win[:, -1]
    return ref + (win - ref[:, None]) @ wma_weights(m)


def apply_smoothing(series: np.ndarray, spec: SmoothingSpec) -> np.ndarray:
    """Smooth a (T, k) matrix column by column with one spec for all variables."""
    series = np.asarray(series, dtype=np.float64)
    if series.ndim == 1:
        series = series[:, None]
    if spec.method == RAW:
        return series.copy()
    fn = moving_average if spec.method == MA else weighted_moving_average
    return np.column_stack([fn(series[:, j], spec.m) for j in range(series.shape[1])])


# --- windowing ---------------------------------------------------------------

def window_count(series_length: int, window_length: int, horizon: int, skip: int) -> int:
    """Closed-form count of feasible window starts 0, s, 2s, ..."""
    span = window_length + horizon
    if series_length < span:
        return 0
    return (series_length - span) // skip + 1


def generate_windows(
    series: np.ndarray,
    window_length: int,
    horizon: int,
    skip: int,
    target_index: int,
) -> tuple[SlidingWindow, ...]:
    """Slice a (T', k) smoothed series into strided (input, target) windows."""
    series = np.asarray(series, dtype=np.float64)
    if series.ndim == 1:
        series = series[:, None]
    if skip < 1:
        raise ValueError("skip must be >= 1")
    n = window_count(series.shape[0], window_length, horizon, skip)
    if n == 0:
        raise SeriesTooShortError(
            f"series of length {series.shape[0]} cannot fit one window of "
            f"{window_length}+{horizon} steps"
        )
    windows = []
    for t in range(n):
        start = t * skip
        windows.append(
            SlidingWindow(
                index=t,
                start=start,
                input=series[start : start + window_length],
                target=series[start + window_length : start + window_length + horizon, target_index],
            )
        )
    return tuple(windows)


def split_train_test(
    windows: Sequence[SlidingWindow], ratio: float = 0.8
) -> tuple[tuple[SlidingWindow, ...], tuple[SlidingWindow, ...]]:
    """Chronological split: first floor(ratio * N) windows train, rest test.

    No shuffling, so every training window precedes every test window in time.
    The boundary is clamped to leave at least one window on each side.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    n = len(windows)
    if n < 2:
        raise TooFewWindowsError(f"need at least 2 windows to split, got {n}")
    n_train = min(max(int(math.floor(ratio * n)), 1), n - 1)
    return tuple(windows[:n_train]), tuple(windows[n_train:])


def build_representation(
    dataset: TimeSeriesDataset,
    smoothing: SmoothingSpec,
    skip: int,
    config: TransformConfig,
) -> Representation:
    """Smooth every variable with one spec, then window with one skip length."""
    rep_id = representation_id(smoothing, skip)
    try:
        series = apply_smoothing(dataset.values, smoothing)
        windows = generate_windows(
            series, config.window_length, config.horizon, skip, dataset.target_index
        )
    except Exception as exc:
        raise RepresentationBuildError(rep_id, exc) from exc
    return Representation(id=rep_id, smoothing=smoothing, skip=skip, series=series, windows=windows)


def enumerate_representations(
    dataset: TimeSeriesDataset, config: TransformConfig
) -> tuple[Representation, ...]:
    """Cartesian product of smoothing specs and skips, in declaration order."""
    reps = []
    seen = set()
    for smoothing in config.smoothings:
        for skip in config.skips:
            rep = build_representation(dataset, smoothing, skip, config)
            if rep.id in seen:
                raise ValueError(f"duplicate representation id {rep.id!r}")
            seen.add(rep.id)
            reps.append(rep)
    return tuple(reps)


# --- normalization -----------------------------------------------------------

@dataclass(frozen=True)
class MinMaxNormalizer:
    """Per-variable min-max scaling fitted on the training partition only.

    Variables with zero range in the training data map to 0. The target
    variable's scaling inverts predictions back to original units.
    """

    mins: np.ndarray
    scales: np.ndarray  # max - min, zeros replaced by 1
    target_index: int

    @classmethod
    def fit(cls, train_windows: Sequence[SlidingWindow], target_index: int) -> "MinMaxNormalizer":
        if not train_windows:
            raise ValueError("cannot fit a normalizer on zero windows")
        stacked = np.concatenate([w.input for w in train_windows], axis=0)
        mins = stacked.min(axis=0)
        maxs = stacked.max(axis=0)
        targets = np.concatenate([w.target for w in train_windows])
        mins[target_index] = min(mins[target_index], targets.min())
        maxs[target_index] = max(maxs[target_index], targets.max())
        scales = maxs - mins
        scales[scales == 0.0] = 1.0
        return cls(mins=_frozen(mins), scales=_frozen(scales), target_index=target_index)

    def transform_window(self, window: SlidingWindow) -> SlidingWindow:
        return SlidingWindow(
            index=window.index,
            start=window.start,
            input=(window.input - self.mins) / self.scales,
            target=(window.target - self.mins[self.target_index]) / self.scales[self.target_index],
        )

    def transform_all(self, windows: Iterable[SlidingWindow]) -> tuple[SlidingWindow, ...]:
        return tuple(self.transform_window(w) for w in windows)

    def inverse_target(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values) * self.scales[self.target_index] + self.mins[self.target_index]
