"""On-disk run store: one immutable directory per pipeline sweep.

Layout:
    manifest.json                     index of everything below
    dataset/meta.json                 name, frequency, variables, timestamps
    dataset/values.bin + .json        raw (T, k) matrix
    catalog/catalog.json              plottable 1-D series (variables or
                                      smoothed variants) with timeline offsets
    catalog/series/<file>.bin/.json
    representations/<dir>/            dir = id with "/" replaced by "__"
        meta.json                     smoothing, skip, window geometry, split
        series.bin/.json              smoothed (T', k) matrix
        params.bin + params.json      model tensors, flat, little-endian
        training.json                 epoch losses and train/val RMSE
        stats.json                    ADF, ACF summary, variable importance
        window_metrics.json           per-window RMSE / CORR / SHAP rows
        predictions.bin/.json         (N_w, horizon) predictions
    shared/vsup_corr.json             wedge quantizer schemes
    shared/vsup_shap.json
    shared/horizon/<file>.json        precomputed horizon bands per catalog id
    shared/mosaic/<x>__<y>__g<g>.json default partition grids per series pair

Arrays are raw little-endian float64 in C order next to a JSON sidecar
holding dtype and shape. JSON is written canonically (sorted keys, no
whitespace, trailing newline) so a re-run with the same seed reproduces every
byte and a reload re-serializes identically.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from ..errors import StoreNotFoundError, UnknownRepresentationError

STORE_FORMAT_VERSION = 1

MANIFEST = "manifest.json"


def dump_json(obj) -> bytes:
    """Canonical JSON bytes: sorted keys, compact separators, one newline."""
    return (json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n").encode(
        "utf-8"
    )


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dump_json(obj))


def read_json(path: Path):
    with path.open("rb") as fh:
        return json.loads(fh.read().decode("utf-8"))


def write_array(base: Path, arr: np.ndarray) -> None:
    """Write <base>.bin (little-endian float64, C order) and <base>.json."""
    base.parent.mkdir(parents=True, exist_ok=True)
    data = np.ascontiguousarray(arr, dtype="<f8")
    base.with_suffix(".bin").write_bytes(data.tobytes(order="C"))
    write_json(base.with_suffix(".json"), {"dtype": "<f8", "order": "C", "shape": list(data.shape)})


def read_array(base: Path) -> np.ndarray:
    sidecar = read_json(base.with_suffix(".json"))
    raw = base.with_suffix(".bin").read_bytes()
    arr = np.frombuffer(raw, dtype=sidecar["dtype"]).reshape(sidecar["shape"])
    return arr.astype(np.float64)


def rep_dirname(rep_id: str) -> str:
    return rep_id.replace("/", "__")


def safe_filename(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


class RunStore:
    """Read-only view over a completed pipeline sweep."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        manifest_path = self.root / MANIFEST
        if not manifest_path.is_file():
            raise StoreNotFoundError(f"no run store at {self.root} (missing {MANIFEST})")
        self.manifest = read_json(manifest_path)

    # -- representations ----------------------------------------------------

    def representation_ids(self, ok_only: bool = True) -> list[str]:
        rows = self.manifest["representations"]
        return [r["id"] for r in rows if r["status"] == "ok" or not ok_only]

    def _rep_entry(self, rep_id: str) -> dict:
        for row in self.manifest["representations"]:
            if row["id"] == rep_id:
                return row
        raise UnknownRepresentationError(
            f"representation {rep_id!r} is not in this store; computing a new "
            "smoothing/skip combination requires a pipeline run"
        )

    def rep_dir(self, rep_id: str) -> Path:
        entry = self._rep_entry(rep_id)
        if entry["status"] != "ok":
            raise UnknownRepresentationError(
                f"representation {rep_id!r} failed during the pipeline run: {entry.get('error')}"
            )
        return self.root / "representations" / entry["dir"]

    def rep_meta(self, rep_id: str) -> dict:
        return read_json(self.rep_dir(rep_id) / "meta.json")

    def rep_training(self, rep_id: str) -> dict:
        return read_json(self.rep_dir(rep_id) / "training.json")

    def rep_stats(self, rep_id: str) -> dict:
        return read_json(self.rep_dir(rep_id) / "stats.json")

    def rep_window_metrics(self, rep_id: str) -> list[dict]:
        return read_json(self.rep_dir(rep_id) / "window_metrics.json")

    def rep_series(self, rep_id: str) -> np.ndarray:
        return read_array(self.rep_dir(rep_id) / "series")

    def rep_predictions(self, rep_id: str) -> np.ndarray:
        return read_array(self.rep_dir(rep_id) / "predictions")

    def rep_params(self, rep_id: str) -> tuple[dict, np.ndarray]:
        """Model parameters as (shape manifest, flat vector)."""
        rep = self.rep_dir(rep_id)
        spec = read_json(rep / "params.json")
        flat = np.frombuffer((rep / "params.bin").read_bytes(), dtype=spec["dtype"])
        return spec, flat.astype(np.float64)

    # -- shared artifacts ---------------------------------------------------

    def dataset_meta(self) -> dict:
        return read_json(self.root / "dataset" / "meta.json")

    def dataset_values(self) -> np.ndarray:
        return read_array(self.root / "dataset" / "values")

    def catalog(self) -> list[dict]:
        return read_json(self.root / "catalog" / "catalog.json")

    def catalog_entry(self, series_id: str) -> dict:
        for entry in self.catalog():
            if entry["id"] == series_id:
                return entry
        raise UnknownRepresentationError(f"series {series_id!r} is not in the catalog")

    def catalog_series(self, series_id: str) -> np.ndarray:
        entry = self.catalog_entry(series_id)
        return read_array(self.root / "catalog" / "series" / entry["file"])

    def vsup(self, metric: str) -> dict:
        path = self.root / "shared" / f"vsup_{metric}.json"
        if not path.is_file():
            raise UnknownRepresentationError(f"no quantizer for metric {metric!r}")
        return read_json(path)

    def horizon(self, series_id: str) -> dict:
        entry = self.catalog_entry(series_id)
        path = self.root / "shared" / "horizon" / f"{entry['file']}.json"
        if not path.is_file():
            raise UnknownRepresentationError(f"no horizon bands for {series_id!r}")
        return read_json(path)

    def mosaic_path(self, x_id: str, y_id: str, grid: int) -> Path:
        x_file = self.catalog_entry(x_id)["file"]
        y_file = self.catalog_entry(y_id)["file"]
        return self.root / "shared" / "mosaic" / f"{x_file}__{y_file}__g{grid}.json"

    def all_files(self) -> list[Path]:
        return sorted(p for p in self.root.rglob("*") if p.is_file())
