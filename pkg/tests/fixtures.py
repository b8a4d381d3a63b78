"""Synthetic dataset generators used across the tests.

The workbench ships without bundled data, so tests fabricate series with the
same shape as the real inputs: a monthly quasi-cyclic count series (sunspot
style) and an hourly six-variable pollutant table.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def sunspot_like_values(months: int, seed: int = 20230301) -> np.ndarray:
    """Non-negative monthly counts with a ~130-month activity cycle."""
    rng = np.random.default_rng(seed)
    t = np.arange(months, dtype=float)
    cycle = 1.0 + 0.9 * np.sin(2 * np.pi * t / 130.4 + rng.uniform(0, 2 * np.pi))
    short = 0.15 * np.sin(2 * np.pi * t / 13.0)
    base = 80.0 * cycle * (1.0 + short) + rng.normal(0.0, 9.0, months)
    return np.clip(base, 0.0, None)


def month_labels(months: int, start_year: int = 1983, start_month: int = 1) -> list[str]:
    labels = []
    year, month = start_year, start_month
    for _ in range(months):
        labels.append(f"{year:04d}-{month:02d}-01")
        month += 1
        if month > 12:
            month = 1
            year += 1
    return labels


def write_sunspot_csv(path: Path, months: int = 480, seed: int = 20230301) -> Path:
    values = sunspot_like_values(months, seed)
    lines = ["month,sunspots"]
    lines += [f"{ts},{v:.2f}" for ts, v in zip(month_labels(months), values)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_pollutant_csv(path: Path, hours: int = 400, seed: int = 404) -> Path:
    """Six-variable hourly table with the pollutant column as target."""
    rng = np.random.default_rng(seed)
    t = np.arange(hours, dtype=float)
    temp = 12 + 10 * np.sin(2 * np.pi * t / 24) + rng.normal(0, 1.5, hours)
    rh = np.clip(60 - 1.2 * (temp - 12) + rng.normal(0, 5, hours), 5, 100)
    psfc = 1010 + 4 * np.sin(2 * np.pi * t / 180) + rng.normal(0, 0.8, hours)
    wnd_dir = np.mod(180 + 90 * np.sin(2 * np.pi * t / 96) + rng.normal(0, 25, hours), 360)
    wnd_spd = np.clip(3 + 2 * np.sin(2 * np.pi * t / 48) + rng.normal(0, 0.7, hours), 0.1, None)
    pm = np.clip(
        70 - 1.5 * (temp - 12) + 0.4 * (rh - 60) - 6 * (wnd_spd - 3) + rng.normal(0, 8, hours),
        1,
        None,
    )
    lines = ["time,PM2.5,temp,rh,psfc,wnd_dir,wnd_spd"]
    for i in range(hours):
        day, hour = divmod(i, 24)
        stamp = f"2013-01-{day + 1:02d}T{hour:02d}:00:00"
        lines.append(
            f"{stamp},{pm[i]:.2f},{temp[i]:.2f},{rh[i]:.2f},{psfc[i]:.2f},"
            f"{wnd_dir[i]:.2f},{wnd_spd[i]:.2f}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
