"""Read-only JSON API over a run store.

``StoreApi.dispatch`` is a pure function of (method, path, query, body) so
the routing logic is testable without sockets and identical queries always
produce identical bytes; ``serve`` wraps it in a threading HTTP server for
concurrent readers. Representation ids contain a slash, so path segments are
split before percent-decoding (clients request ``WMA-13%2FSk-3``).
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlsplit

import numpy as np

from .. import visprep
from ..errors import (
    MalformedPolygonError,
    PortInUseError,
    RepgridError,
    UnknownRepresentationError,
)
from .pipeline import mosaic_for_pair, mosaic_payload
from .store import RunStore, dump_json

_STRIPE_METRICS = ("corr", "shap")
_SINGLE_METRICS = ("corr", "shap", "rmse")


class BadRequest(RepgridError):
    pass


def points_in_polygon(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Even-odd rule membership test for an (N, 2) point set."""
    pts = np.asarray(points, dtype=np.float64)
    poly = np.asarray(polygon, dtype=np.float64)
    if poly.ndim != 2 or poly.shape[0] < 3 or poly.shape[1] != 2:
        raise MalformedPolygonError("a polygon needs at least 3 [x, y] vertices")
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    x1, y1 = poly[-1]
    for x2, y2 in poly:
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (x < x_at)
        x1, y1 = x2, y2
    return inside


def _scheme_from_payload(payload: dict) -> visprep.VSUPScheme:
    return visprep.VSUPScheme(
        dim1_edges=tuple(payload["dim1_edges"]), dim2_edges=tuple(payload["dim2_edges"])
    )


def _int_param(query: dict, name: str, default: int, lo: int, hi: int) -> int:
    raw = query.get(name, [str(default)])[0]
    try:
        value = int(raw)
    except ValueError:
        raise BadRequest(f"{name} must be an integer, got {raw!r}")
    if not lo <= value <= hi:
        raise BadRequest(f"{name} must lie in [{lo}, {hi}]")
    return value


class StoreApi:
    """Route table over one loaded store; every handler is a pure read."""

    def __init__(self, store: RunStore):
        self.store = store

    # -- payload builders ---------------------------------------------------

    def profile_rows(self) -> list[dict]:
        rows = []
        for entry in self.store.manifest["representations"]:
            row = {
                "id": entry["id"],
                "status": entry["status"],
                "error": entry["error"],
                "n_windows": entry["n_windows"],
                "method": None, "m": None, "skip": None, "n_train": None,
                "train_error": None, "val_error": None,
                "acf": None, "acf_lag": None,
                "adf_statistic": None, "stationary": None,
            }
            if entry["status"] == "ok":
                meta = self.store.rep_meta(entry["id"])
                training = self.store.rep_training(entry["id"])
                stats = self.store.rep_stats(entry["id"])
                row.update(
                    method=meta["method"], m=meta["m"], skip=meta["skip"],
                    n_train=meta["n_train"],
                    train_error=training["train_rmse"], val_error=training["val_rmse"],
                )
                if stats["acf"] is not None:
                    row.update(acf=stats["acf"]["value"], acf_lag=stats["acf"]["lag"])
                if stats["adf"] is not None:
                    row.update(
                        adf_statistic=stats["adf"]["statistic"],
                        stationary=stats["adf"]["stationary"],
                    )
            rows.append(row)
        return rows

    def stripe(self, rep_id: str, query: dict) -> dict:
        pixels = _int_param(query, "pixels", 800, 1, 100_000)
        metric = query.get("metric", ["corr"])[0]
        mode = query.get("mode", ["bivariate"])[0]
        meta = self.store.rep_meta(rep_id)
        metrics = self.store.rep_window_metrics(rep_id)
        time_extent = self.store.manifest["dataset"]["length"]

        if mode == "bivariate":
            if metric not in _STRIPE_METRICS:
                raise BadRequest(f"metric must be one of {_STRIPE_METRICS} in bivariate mode")
            scheme = _scheme_from_payload(self.store.vsup(metric))
            pairs = [(row[metric], row["rmse"]) for row in metrics]
            stripe = visprep.aggregate_stripe(pairs, pixels, scheme, representation_id=rep_id)
            cells = list(stripe.pixel_cells)
            values = [
                None if v is None else [None if np.isnan(v[0]) else v[0], v[1]]
                for v in stripe.pixel_values
            ]
            slices = stripe.window_slices
            n_w = stripe.n_w
        elif mode == "single":
            if metric not in _SINGLE_METRICS:
                raise BadRequest(f"metric must be one of {_SINGLE_METRICS} in single mode")
            if metric == "rmse":
                payload = self.store.vsup("corr")
                lo, hi = payload["dim2_edges"][0], payload["dim2_edges"][-1]
                edges = np.linspace(lo, hi, 9)
            else:
                edges = np.asarray(self.store.vsup(metric)["dim1_edges"])
            series = [row[metric] for row in metrics]
            cell_tuple, value_tuple = visprep.aggregate_single_stripe(series, pixels, edges)
            cells = list(cell_tuple)
            values = [None if v is None else [v] for v in value_tuple]
            slices = visprep.stripe_chunks(len(metrics), pixels)
            n_w = len(metrics) // pixels
        else:
            raise BadRequest("mode must be 'bivariate' or 'single'")

        rects = [
            None
            if span is None
            else [
                meta["offset"] + span[0] * meta["skip"],
                (span[1] - span[0]) * meta["skip"],
            ]
            for span in slices
        ]
        return {
            "representation_id": rep_id,
            "metric": metric,
            "mode": mode,
            "pixels": pixels,
            "n_w": n_w,
            "cells": cells,
            "values": values,
            "window_slices": [None if s is None else list(s) for s in slices],
            "rects": rects,
            "time_extent": time_extent,
        }

    def window_detail(self, rep_id: str, index: int) -> dict:
        meta = self.store.rep_meta(rep_id)
        if not 0 <= index < meta["n_windows"]:
            raise UnknownRepresentationError(
                f"window {index} outside [0, {meta['n_windows']}) for {rep_id!r}"
            )
        series = self.store.rep_series(rep_id)
        preds = self.store.rep_predictions(rep_id)
        rows = self.store.rep_window_metrics(rep_id)
        start = index * meta["skip"]
        wl, hz = meta["window_length"], meta["horizon"]
        target_index = meta["normalization"]["target_index"]
        return {
            "representation_id": rep_id,
            "index": index,
            "start": start,
            "time_start": meta["offset"] + start,
            "input": series[start : start + wl].tolist(),
            "target": series[start + wl : start + wl + hz, target_index].tolist(),
            "prediction": preds[index].tolist(),
            "metrics": rows[index],
        }

    def variables_payload(self) -> dict:
        dataset = self.store.dataset_meta()
        catalog = [
            {k: v for k, v in entry.items() if k != "file"} for entry in self.store.catalog()
        ]
        payload = {
            "target": dataset["target"],
            "k": len(dataset["variables"]),
            "variables": dataset["variables"],
            "catalog": catalog,
            "importance": None,
        }
        if len(dataset["variables"]) > 1:
            importance = {}
            for rep_id in self.store.representation_ids():
                ranked = self.store.rep_stats(rep_id)["variable_importance"]
                if ranked is not None:
                    importance[rep_id] = ranked
            payload["importance"] = importance
        return payload

    def matrix(self, query: dict) -> dict:
        x_id = query.get("x", [None])[0]
        y_id = query.get("y", [None])[0]
        if not x_id or not y_id:
            raise BadRequest("x and y series ids are required")
        grid = _int_param(query, "grid", self.store.manifest["shared"]["mosaic_grid"], 2, 50)
        precomputed = self.store.mosaic_path(x_id, y_id, grid)
        if precomputed.is_file():
            return json.loads(precomputed.read_bytes())
        xe = dict(self.store.catalog_entry(x_id))
        ye = dict(self.store.catalog_entry(y_id))
        xe["_values"] = self.store.catalog_series(x_id)
        ye["_values"] = self.store.catalog_series(y_id)
        dataset = self.store.dataset_meta()
        if len(dataset["variables"]) > 1:
            values = self.store.dataset_values()
            idx = [v["id"] for v in dataset["variables"]].index(dataset["target"])
            target_values = values[:, idx]
            color_label = dataset["target"]
        else:
            target_values = None
            color_label = "density"
        grid_obj = mosaic_for_pair(xe, ye, grid, target_values)
        n = int(sum(sum(row) for row in grid_obj.cell_counts))
        return mosaic_payload(grid_obj, grid, color_label, n)

    def prediction_points(self, query: dict, body: dict | None) -> dict:
        manifest = self.store.manifest
        axes = query.get("axes", ["corr"])[0]
        if axes not in _STRIPE_METRICS:
            raise BadRequest(f"axes must be one of {_STRIPE_METRICS}")
        reps_raw = query.get("reps", [None])[0]
        rep_ids = (
            self.store.representation_ids()
            if not reps_raw
            else [unquote(r) for r in reps_raw.split(",") if r]
        )
        n = _int_param(query, "n", manifest["sampling"]["default_n"], 1, 1_000_000)
        seed = _int_param(
            query, "seed", manifest["sampling"]["seed"], -(2**31), 2**31 - 1
        )
        scheme = _scheme_from_payload(self.store.vsup(axes))

        points = []
        for rep_id in rep_ids:
            for row in self.store.rep_window_metrics(rep_id):
                x = row[axes]
                if x is None:
                    continue  # corr-degenerate windows stay out of corr views
                points.append(
                    {
                        "rep": rep_id,
                        "index": row["index"],
                        "x": x,
                        "y": row["rmse"],
                        "cell": visprep.vsup_quantize(x, row["rmse"], scheme),
                        "split": row["split"],
                        "rmse": row["rmse"],
                        "corr": row["corr"],
                        "shap": row["shap"],
                        "start": row["start"],
                    }
                )

        polygons = []
        if body:
            polygons = body.get("polygons", [])
            if not isinstance(polygons, list):
                raise MalformedPolygonError("polygons must be a list of vertex lists")
        selected_rows = []
        if polygons:
            coords = np.array([[p["x"], p["y"]] for p in points], dtype=np.float64)
            chosen = np.zeros(len(points), dtype=bool)
            for polygon in polygons:
                chosen |= points_in_polygon(coords, np.asarray(polygon, dtype=np.float64))
            selected_rows = [p for p, keep in zip(points, chosen) if keep]

        sampled = visprep.sample_predictions(points, n, seed)
        return {
            "axes": {"x": axes, "y": "rmse"},
            "total": len(points),
            "points": sampled,
            "selected_rows": selected_rows,
            "polygons_applied": len(polygons),
        }

    # -- routing --------------------------------------------------------------

    def dispatch(self, method: str, path: str, body: bytes | None = None):
        """Return (status, payload) for one request; never mutates the store."""
        split = urlsplit(path)
        segments = [unquote(s) for s in split.path.split("/") if s]
        query = parse_qs(split.query)
        try:
            return 200, self._route(method, segments, query, body)
        except BadRequest as exc:
            return 400, {"code": "bad_request", "message": str(exc)}
        except MalformedPolygonError as exc:
            return 400, {"code": "malformed_polygon", "message": str(exc)}
        except UnknownRepresentationError as exc:
            return 404, {"code": "unknown_representation", "message": str(exc)}
        except _NotFound as exc:
            return 404, {"code": "not_found", "message": str(exc)}

    def _route(self, method: str, segments: list[str], query: dict, body: bytes | None):
        if method not in ("GET", "POST"):
            raise _NotFound(f"unsupported method {method}")
        if segments == ["predictions"]:
            parsed = None
            if method == "POST" and body:
                try:
                    parsed = json.loads(body.decode("utf-8"))
                except json.JSONDecodeError as exc:
                    raise BadRequest(f"request body is not valid JSON: {exc}")
            return self.prediction_points(query, parsed)
        if method != "GET":
            raise _NotFound("only /predictions accepts POST")

        match segments:
            case ["manifest"]:
                return self.store.manifest
            case ["representations"]:
                return self.profile_rows()
            case ["representations", rep_id]:
                return {
                    "meta": self.store.rep_meta(rep_id),
                    "training": self.store.rep_training(rep_id),
                    "stats": self.store.rep_stats(rep_id),
                }
            case ["representations", rep_id, "stripe"]:
                return self.stripe(rep_id, query)
            case ["representations", rep_id, "windows", raw_index]:
                try:
                    index = int(raw_index)
                except ValueError:
                    raise BadRequest(f"window index must be an integer, got {raw_index!r}")
                return self.window_detail(rep_id, index)
            case ["schemes"]:
                return {metric: self.store.vsup(metric) for metric in _STRIPE_METRICS}
            case ["variables"]:
                return self.variables_payload()
            case ["variables", "matrix"]:
                return self.matrix(query)
            case ["variables", series_id, "horizon"]:
                return self.store.horizon(series_id)
            case _:
                raise _NotFound(f"no route for /{'/'.join(segments)}")


class _NotFound(RepgridError):
    pass


class _Handler(BaseHTTPRequestHandler):
    api: StoreApi  # set on the server class

    def _respond(self, body: bytes | None = None):
        method = self.command
        length = int(self.headers.get("Content-Length") or 0)
        payload = self.rfile.read(length) if length else None
        status, obj = self.server.api.dispatch(method, self.path, payload)
        data = dump_json(obj)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        self._respond()

    def do_POST(self):
        self._respond()

    def log_message(self, fmt, *args):
        import logging

        logging.getLogger("repgrid.api").debug(fmt, *args)


class ApiServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, api: StoreApi):
        self.api = api
        super().__init__(address, _Handler)


def serve(store: RunStore | str | Path, port: int, host: str = "127.0.0.1") -> ApiServer:
    """Bind the read-only API; call ``serve_forever`` on the result."""
    if not isinstance(store, RunStore):
        store = RunStore(store)
    api = StoreApi(store)
    try:
        return ApiServer((host, port), api)
    except OSError as exc:
        if exc.errno in (48, 98):
            raise PortInUseError(f"port {port} on {host} is already in use") from exc
        raise
