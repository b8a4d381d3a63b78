"""Visualization data preparation.

Everything the views consume is computed here as plain arrays and small
dataclasses: the bivariate wedge quantizer, stripe max-pooling and layout,
partitioned correlation (mosaic) grids, horizon-band folding, and scatter
subsampling. No colors or geometry beyond data units are produced; rendering
is the frontend's concern.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConstantSeriesError, DegenerateRangeWarning, LengthMismatchError

# Wedge tree: bins available per uncertainty level, low to high metric2.
VSUP_TREE = (8, 4, 2, 1)
VSUP_LEVEL_OFFSETS = (0, 8, 12, 14)
VSUP_TOTAL_CELLS = 15


@dataclass(frozen=True)
class VSUPScheme:
    """Bivariate quantizer: metric1 into 8 ranges, metric2 into 4 ranges.

    Cell ids are 0..14, numbered level by level: level 0 (lowest metric2)
    owns ids 0-7, level 1 ids 8-11, level 2 ids 12-13, level 3 id 14. Higher
    metric2 suppresses metric1 resolution by halving the bin count per level.
    """

    dim1_edges: tuple[float, ...]  # 9 ascending values, 8 ranges
    dim2_edges: tuple[float, ...]  # 5 ascending values, 4 ranges

    def __post_init__(self):
        if len(self.dim1_edges) != 9 or len(self.dim2_edges) != 5:
            raise ValueError("scheme needs 9 metric1 edges and 5 metric2 edges")
        for edges in (self.dim1_edges, self.dim2_edges):
            if any(b <= a for a, b in zip(edges, edges[1:])):
                raise ValueError("edges must be strictly increasing")


def _equal_width_edges(lo: float, hi: float, bins: int, what: str) -> np.ndarray:
    if hi <= lo:
        warnings.warn(
            f"{what}: all values equal ({lo}); falling back to a single bin",
            DegenerateRangeWarning,
            stacklevel=3,
        )
        hi = lo + 1.0
    return np.linspace(lo, hi, bins + 1)


def build_vsup(
    metric1_values: np.ndarray,
    metric2_values: np.ndarray,
    metric1_range: tuple[float, float] | None = None,
) -> VSUPScheme:
    """Equal-width scheme over the observed metric ranges.

    metric1 spans its data range unless a fixed domain is given (pass
    (-1, 1) for correlations); metric2 spans [0, max], the error axis.
    """
    m1 = np.asarray(metric1_values, dtype=np.float64)
    m1 = m1[np.isfinite(m1)]
    m2 = np.asarray(metric2_values, dtype=np.float64)
    m2 = m2[np.isfinite(m2)]
    if m1.size == 0 or m2.size == 0:
        raise ValueError("need at least one finite value per metric")
    if metric1_range is not None:
        lo1, hi1 = metric1_range
        if hi1 <= lo1:
            raise ValueError("metric1_range must be increasing")
        dim1 = np.linspace(lo1, hi1, 9)
    else:
        dim1 = _equal_width_edges(float(m1.min()), float(m1.max()), 8, "metric1")
    if float(np.ptp(m2)) == 0.0:
        warnings.warn(
            f"metric2: all values equal ({float(m2.max())}); every pair falls in one bin",
            DegenerateRangeWarning,
            stacklevel=2,
        )
    dim2 = _equal_width_edges(0.0, float(m2.max()), 4, "metric2")
    return VSUPScheme(dim1_edges=tuple(dim1), dim2_edges=tuple(dim2))


def _bin_of(value: float, edges: Sequence[float]) -> int:
    """Half-open equal bins with out-of-range values clamped to the ends."""
    idx = int(np.searchsorted(edges, value, side="right")) - 1
    return min(max(idx, 0), len(edges) - 2)


def vsup_quantize(v1: float, v2: float, scheme: VSUPScheme) -> int:
    """Map a (metric1, metric2) pair to its wedge cell id.

    metric2 picks the suppression level; the metric1 bin is integer-halved
    once per level, so the highest-error level collapses to a single cell.
    """
    level = _bin_of(v2, scheme.dim2_edges)
    bin1 = _bin_of(v1, scheme.dim1_edges)
    return VSUP_LEVEL_OFFSETS[level] + (bin1 >> level)


def vsup_cell_table(scheme: VSUPScheme) -> list[dict]:
    """Every cell with its level, within-level bin, and covered value ranges.

    The legend payload: frontends draw the wedge from this table.
    """
    cells = []
    d1 = scheme.dim1_edges
    d2 = scheme.dim2_edges
    for level, bins in enumerate(VSUP_TREE):
        merge = 8 // bins
        for b in range(bins):
            cells.append(
                {
                    "cell": VSUP_LEVEL_OFFSETS[level] + b,
                    "level": level,
                    "bin": b,
                    "metric1_range": [d1[b * merge], d1[(b + 1) * merge]],
                    "metric2_range": [d2[level], d2[level + 1]],
                }
            )
    return cells


@dataclass(frozen=True)
class StripeRow:
    """One representation's pooled pixel stripe."""

    representation_id: str
    pixel_cells: tuple[int | None, ...]
    pixel_values: tuple[tuple[float, float] | None, ...]
    n_w: int  # windows pooled per pixel, floor(N_w / P); 0 means no pooling
    window_slices: tuple[tuple[int, int] | None, ...]  # [start, stop) window indexes


def aggregate_stripe(
    window_metrics: Sequence[tuple[float | None, float]],
    pixels: int,
    scheme: VSUPScheme,
    representation_id: str = "",
) -> StripeRow:
    """Max-pool per-window (metric1, metric2) pairs onto a pixel row.

    Each pixel takes the element-wise maximum of its contiguous chunk of
    floor(N_w / P) windows; leftover windows fold into the last pixel so the
    global maximum always survives. With N_w <= P each window gets its own
    pixel and trailing pixels stay empty. Absent metric1 values (None) are
    skipped by the max; a pixel whose chunk has no metric1 at all carries no
    cell id.
    """
    n_w = len(window_metrics)
    if n_w < 1 or pixels < 1:
        raise ValueError("need at least one window and one pixel")
    m1 = np.array(
        [np.nan if v1 is None else float(v1) for v1, _ in window_metrics], dtype=np.float64
    )
    m2 = np.array([float(v2) for _, v2 in window_metrics], dtype=np.float64)

    bounds = stripe_chunks(n_w, pixels)
    per_pixel = n_w // pixels
    cells: list[int | None] = []
    values: list[tuple[float, float] | None] = []
    for span in bounds:
        if span is None:
            cells.append(None)
            values.append(None)
            continue
        start, stop = span
        chunk1 = m1[start:stop]
        best2 = float(m2[start:stop].max())
        if np.isnan(chunk1).all():
            cells.append(None)
            values.append((float("nan"), best2))
            continue
        best1 = float(np.nanmax(chunk1))
        values.append((best1, best2))
        cells.append(vsup_quantize(best1, best2, scheme))
    return StripeRow(
        representation_id=representation_id,
        pixel_cells=tuple(cells),
        pixel_values=tuple(values),
        n_w=per_pixel,
        window_slices=tuple(bounds),
    )


def stripe_chunks(n_windows: int, pixels: int) -> tuple[tuple[int, int] | None, ...]:
    """Contiguous [start, stop) window chunks per pixel, shared by both stripe
    modes: floor(N_w / P) windows per pixel with the remainder folded into the
    last one, or one window per pixel (trailing pixels None) when N_w <= P."""
    if n_windows < 1 or pixels < 1:
        raise ValueError("need at least one window and one pixel")
    per_pixel = n_windows // pixels
    if per_pixel == 0:
        return tuple((i, i + 1) if i < n_windows else None for i in range(pixels))
    bounds: list[tuple[int, int] | None] = []
    for i in range(pixels):
        start = i * per_pixel
        stop = (i + 1) * per_pixel if i < pixels - 1 else n_windows
        bounds.append((start, stop))
    return tuple(bounds)


def aggregate_single_stripe(
    values: Sequence[float | None],
    pixels: int,
    edges: Sequence[float],
) -> tuple[tuple[int | None, ...], tuple[float | None, ...]]:
    """Single-metric stripe mode: max-pool one metric, quantize to 8 bins.

    Returns (cell ids, pooled values) per pixel; edges are the 9 boundaries of
    a sequential 8-bin colormap.
    """
    if len(edges) != 9:
        raise ValueError("single-metric mode uses 8 bins (9 edges)")
    pooled = np.array([np.nan if v is None else float(v) for v in values], dtype=np.float64)
    cells: list[int | None] = []
    outs: list[float | None] = []
    for span in stripe_chunks(len(values), pixels):
        if span is None:
            cells.append(None)
            outs.append(None)
            continue
        chunk = pooled[span[0] : span[1]]
        if np.isnan(chunk).all():
            cells.append(None)
            outs.append(None)
            continue
        best = float(np.nanmax(chunk))
        outs.append(best)
        cells.append(_bin_of(best, edges))
    return tuple(cells), tuple(outs)


def layout_windows(
    n_windows: int,
    skip: int,
    offset: int,
    axis_width: float,
    time_extent: int,
) -> tuple[tuple[float, float], ...]:
    """Skip-aligned stripe rectangles (x, width) on a shared timeline.

    Window t is drawn at the raw-time position of its start with width equal
    to the skip length, so rectangles never overlap even though the windows
    themselves do. ``offset`` shifts smoothed positions onto the raw
    timeline; ``axis_width`` rescales raw steps to pixels.
    """
    if time_extent < 1:
        raise ValueError("time_extent must be >= 1")
    unit = axis_width / time_extent
    return tuple(
        ((offset + t * skip) * unit, skip * unit) for t in range(n_windows)
    )


@dataclass(frozen=True)
class MosaicGrid:
    x_variable: str
    y_variable: str
    x_edges: tuple[float, ...]
    y_edges: tuple[float, ...]
    cell_counts: tuple[tuple[int, ...], ...]          # [y][x]
    cell_values: tuple[tuple[float | None, ...], ...]  # None where count is 0


def mosaic_matrix(
    x_values: np.ndarray,
    y_values: np.ndarray,
    color_values: np.ndarray | None = None,
    grid: int = 5,
    x_variable: str = "x",
    y_variable: str = "y",
) -> MosaicGrid:
    """Uniform grid over a variable pair, each cell holding the mean of the
    coloring quantity (or the point count when no quantity is given).

    Cells without points carry no value; identical x/y inputs therefore
    populate only the diagonal.
    """
    x = np.asarray(x_values, dtype=np.float64)
    y = np.asarray(y_values, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatchError(f"shapes {x.shape} and {y.shape} differ")
    if grid < 2:
        raise ValueError("grid must be >= 2")
    color = None
    if color_values is not None:
        color = np.asarray(color_values, dtype=np.float64)
        if color.shape != x.shape:
            raise LengthMismatchError("color values must match the point count")

    x_edges = _equal_width_edges(float(x.min()), float(x.max()), grid, f"mosaic x={x_variable}")
    y_edges = _equal_width_edges(float(y.min()), float(y.max()), grid, f"mosaic y={y_variable}")
    xi = np.clip(np.searchsorted(x_edges, x, side="right") - 1, 0, grid - 1)
    yi = np.clip(np.searchsorted(y_edges, y, side="right") - 1, 0, grid - 1)

    counts = np.zeros((grid, grid), dtype=np.int64)
    np.add.at(counts, (yi, xi), 1)
    sums = np.zeros((grid, grid), dtype=np.float64)
    np.add.at(sums, (yi, xi), color if color is not None else 1.0)

    values: list[tuple[float | None, ...]] = []
    for row in range(grid):
        row_vals: list[float | None] = []
        for col in range(grid):
            n = counts[row, col]
            if n == 0:
                row_vals.append(None)
            elif color is None:
                row_vals.append(float(n))
            else:
                row_vals.append(float(sums[row, col] / n))
        values.append(tuple(row_vals))
    return MosaicGrid(
        x_variable=x_variable,
        y_variable=y_variable,
        x_edges=tuple(x_edges),
        y_edges=tuple(y_edges),
        cell_counts=tuple(tuple(int(c) for c in row) for row in counts),
        cell_values=tuple(values),
    )


@dataclass(frozen=True)
class HorizonBands:
    """A series folded into 4 stacked bands of (band index, fractional fill)."""

    variable_id: str
    minimum: float
    band_height: float
    band_index: tuple[int, ...]
    fill: tuple[float, ...]

    BAND_COUNT = 4

    def reconstruct(self) -> np.ndarray:
        idx = np.asarray(self.band_index, dtype=np.float64)
        fill = np.asarray(self.fill, dtype=np.float64)
        return self.minimum + (idx + fill) * self.band_height


def horizon_bands(values: np.ndarray, variable_id: str = "") -> HorizonBands:
    """Fold a series into 4 equal value bands; lossless per reconstruct()."""
    x = np.asarray(values, dtype=np.float64)
    lo = float(x.min())
    hi = float(x.max())
    if hi <= lo:
        raise ConstantSeriesError("horizon bands undefined for a constant series")
    height = (hi - lo) / HorizonBands.BAND_COUNT
    scaled = (x - lo) / height
    idx = np.minimum(scaled.astype(np.int64), HorizonBands.BAND_COUNT - 1)
    fill = scaled - idx
    return HorizonBands(
        variable_id=variable_id,
        minimum=lo,
        band_height=height,
        band_index=tuple(int(i) for i in idx),
        fill=tuple(float(f) for f in fill),
    )


def sample_predictions(points: Sequence, n: int, seed: int) -> list:
    """Uniform, seeded subsample without replacement, original order kept.

    Uniformity keeps the sampled density proportional to the underlying
    density; at most n points come back, all of them when count <= n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(points) <= n:
        return list(points)
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(len(points), size=n, replace=False))
    return [points[i] for i in chosen]
