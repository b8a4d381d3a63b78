import concurrent.futures
import hashlib
import json
import threading
import urllib.request

import numpy as np
import pytest
from shapely.geometry import Point, Polygon

from repgrid.core import SmoothingSpec, TransformConfig, load_dataset
from repgrid.errors import (
    MalformedPolygonError,
    PortInUseError,
    StoreNotFoundError,
)
from repgrid.forecaster import ModelConfig
from repgrid.service import (
    RunStore,
    StoreApi,
    dump_json,
    points_in_polygon,
    read_array,
    run_pipeline,
    serve,
    write_array,
)



def store_digest(store, skip=()):
    digest = hashlib.sha256()
    for path in store.all_files():
        rel = path.relative_to(store.root).as_posix()
        if rel in skip:
            continue
        digest.update(rel.encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()


class TestPersistence:
    def test_round_trip_byte_identical(self, small_store):
        for path in small_store.all_files():
            raw = path.read_bytes()
            if path.suffix == ".json":
                assert dump_json(json.loads(raw.decode())) == raw, path
            elif path.suffix == ".bin":
                base = path.with_suffix("")
                if base.with_suffix(".json").exists() and "params" not in path.name:
                    arr = read_array(base)
                    assert arr.astype("<f8").tobytes(order="C") == raw, path

    def test_rerun_byte_identical(self, small_store, tmp_path):
        meta = small_store.dataset_meta()
        manifest = small_store.manifest
        # rebuild the same sweep from the manifest config into a new directory
        values = small_store.dataset_values()
        lines = ["t," + ",".join(v["id"] for v in meta["variables"])]
        for ts, row in zip(meta["timestamps"], values):
            lines.append(ts + "," + ",".join(repr(float(v)) for v in row))
        csv_path = tmp_path / "rebuild.csv"
        csv_path.write_text("\n".join(lines) + "\n")
        dataset = load_dataset(csv_path, target=meta["target"], name=meta["name"])

        cfg = manifest["config"]
        transform = TransformConfig(
            smoothings=tuple(
                SmoothingSpec(s["method"], s["m"]) for s in cfg["transform"]["smoothings"]
            ),
            skips=tuple(cfg["transform"]["skips"]),
            window_length=cfg["transform"]["window_length"],
            horizon=cfg["transform"]["horizon"],
            split_ratio=cfg["transform"]["split_ratio"],
        )
        model_config = ModelConfig(**cfg["model"])
        rebuilt = run_pipeline(
            dataset, transform, model_config, tmp_path / "store2",
            shap_segments=cfg["shap"]["segments"] or 12,
            progress=lambda _m: None,
        )
        assert store_digest(rebuilt) == store_digest(small_store)

    def test_manifest_completeness(self, small_store):
        manifest = small_store.manifest
        for row in manifest["representations"]:
            if row["status"] != "ok":
                continue
            rep_dir = small_store.root / "representations" / row["dir"]
            for name in (
                "meta.json", "series.bin", "series.json", "params.bin", "params.json",
                "training.json", "stats.json", "window_metrics.json",
                "predictions.bin", "predictions.json",
            ):
                assert (rep_dir / name).is_file(), name
            metrics = small_store.rep_window_metrics(row["id"])
            assert len(metrics) == row["n_windows"]
        for series_id in manifest["shared"]["catalog"]:
            assert small_store.catalog_series(series_id).ndim == 1
        for series_id in manifest["shared"]["horizon"]:
            assert small_store.horizon(series_id)["id"] == series_id

    def test_store_not_found(self, tmp_path):
        with pytest.raises(StoreNotFoundError):
            RunStore(tmp_path / "nothing")

    def test_params_round_trip(self, small_store):
        rep_id = small_store.representation_ids()[0]
        spec, flat = small_store.rep_params(rep_id)
        assert spec["total"] == flat.size
        sizes = [t["size"] for t in spec["tensors"]]
        assert sum(sizes) == flat.size
        assert [t["name"] for t in spec["tensors"]] == [
            "conv_w", "conv_b", "lstm_wx", "lstm_wh", "lstm_b",
            "dense_w", "dense_b", "out_w", "out_b",
        ]

    def test_write_read_array(self, tmp_path):
        arr = np.arange(12.0).reshape(3, 4)
        write_array(tmp_path / "x", arr)
        assert np.array_equal(read_array(tmp_path / "x"), arr)


class TestProfileEndpoint:
    def test_rows(self, small_store):
        api = StoreApi(small_store)
        status, rows = api.dispatch("GET", "/representations")
        assert status == 200
        assert len(rows) == 4
        ok_rows = [r for r in rows if r["status"] == "ok"]
        for row in ok_rows:
            assert row["train_error"] is not None
            assert row["val_error"] is not None
            assert row["acf"] is not None
            assert isinstance(row["stationary"], bool)

    def test_manifest_endpoint(self, small_store):
        api = StoreApi(small_store)
        status, manifest = api.dispatch("GET", "/manifest")
        assert status == 200
        assert manifest == small_store.manifest


class TestStripeEndpoint:
    def test_length_contract(self, small_store):
        api = StoreApi(small_store)
        rep_id = small_store.representation_ids()[0]
        quoted = rep_id.replace("/", "%2F")
        status, payload = api.dispatch(
            "GET", f"/representations/{quoted}/stripe?pixels=800&metric=corr"
        )
        assert status == 200
        assert payload["pixels"] == 800
        assert len(payload["cells"]) == 800
        assert len(payload["values"]) == 800
        assert len(payload["rects"]) == 800
        assert payload["time_extent"] == small_store.manifest["dataset"]["length"]

    def test_pooled_when_fewer_pixels(self, small_store):
        api = StoreApi(small_store)
        rep_id = small_store.representation_ids()[0]
        quoted = rep_id.replace("/", "%2F")
        n_windows = small_store.rep_meta(rep_id)["n_windows"]
        pixels = max(1, n_windows // 3)
        _, payload = api.dispatch(
            "GET", f"/representations/{quoted}/stripe?pixels={pixels}&metric=shap"
        )
        assert payload["n_w"] == n_windows // pixels
        assert all(c is not None for c in payload["cells"])
        covered = payload["window_slices"][-1][1]
        assert covered == n_windows

    def test_rects_disjoint_and_time_aligned(self, small_store):
        api = StoreApi(small_store)
        for rep_id in small_store.representation_ids():
            quoted = rep_id.replace("/", "%2F")
            meta = small_store.rep_meta(rep_id)
            _, payload = api.dispatch(
                "GET", f"/representations/{quoted}/stripe?pixels=64&metric=corr"
            )
            rects = [r for r in payload["rects"] if r is not None]
            assert rects[0][0] == meta["offset"]
            for (x1, w1), (x2, _) in zip(rects, rects[1:]):
                assert x1 + w1 <= x2 + 1e-9

    def test_single_metric_mode(self, small_store):
        api = StoreApi(small_store)
        rep_id = small_store.representation_ids()[1]
        quoted = rep_id.replace("/", "%2F")
        status, payload = api.dispatch(
            "GET", f"/representations/{quoted}/stripe?pixels=40&metric=rmse&mode=single"
        )
        assert status == 200
        cells = [c for c in payload["cells"] if c is not None]
        assert cells and all(0 <= c <= 7 for c in cells)

    def test_bad_metric(self, small_store):
        api = StoreApi(small_store)
        rep_id = small_store.representation_ids()[0].replace("/", "%2F")
        status, body = api.dispatch(
            "GET", f"/representations/{rep_id}/stripe?pixels=10&metric=rmse"
        )
        assert status == 400
        assert body["code"] == "bad_request"

    def test_unknown_rep(self, small_store):
        api = StoreApi(small_store)
        status, body = api.dispatch("GET", "/representations/Nope%2FSk-9/stripe?pixels=10")
        assert status == 404
        assert body["code"] == "unknown_representation"


class TestWindowEndpoint:
    def test_detail(self, small_store):
        api = StoreApi(small_store)
        rep_id = small_store.representation_ids()[0]
        quoted = rep_id.replace("/", "%2F")
        meta = small_store.rep_meta(rep_id)
        status, payload = api.dispatch("GET", f"/representations/{quoted}/windows/3")
        assert status == 200
        assert payload["index"] == 3
        assert payload["start"] == 3 * meta["skip"]
        assert len(payload["input"]) == meta["window_length"]
        assert len(payload["target"]) == meta["horizon"]
        assert len(payload["prediction"]) == meta["horizon"]
        assert payload["metrics"]["index"] == 3

    def test_out_of_range(self, small_store):
        api = StoreApi(small_store)
        rep_id = small_store.representation_ids()[0].replace("/", "%2F")
        status, _ = api.dispatch("GET", f"/representations/{rep_id}/windows/99999")
        assert status == 404


class TestVariablesEndpoints:
    def test_variables(self, small_store):
        api = StoreApi(small_store)
        status, payload = api.dispatch("GET", "/variables")
        assert status == 200
        assert payload["k"] == 1
        ids = [entry["id"] for entry in payload["catalog"]]
        assert "Raw" in ids and "MA-3" in ids

    def test_matrix_precomputed_matches_on_the_fly(self, small_store):
        api = StoreApi(small_store)
        _, pre = api.dispatch("GET", "/variables/matrix?x=Raw&y=MA-3&grid=5")
        _, fresh = api.dispatch("GET", "/variables/matrix?x=Raw&y=MA-3&grid=7")
        assert pre["grid"] == 5 and fresh["grid"] == 7
        assert sum(sum(r) for r in pre["cell_counts"]) == sum(
            sum(r) for r in fresh["cell_counts"]
        )

    def test_matrix_diagonal_same_series(self, small_store):
        api = StoreApi(small_store)
        _, payload = api.dispatch("GET", "/variables/matrix?x=Raw&y=Raw&grid=5")
        counts = payload["cell_counts"]
        for r in range(5):
            for c in range(5):
                if r != c:
                    assert counts[r][c] == 0

    def test_matrix_unknown_series(self, small_store):
        api = StoreApi(small_store)
        status, _ = api.dispatch("GET", "/variables/matrix?x=Raw&y=Bogus")
        assert status == 404

    def test_horizon(self, small_store):
        api = StoreApi(small_store)
        status, payload = api.dispatch("GET", "/variables/Raw/horizon")
        assert status == 200
        assert len(payload["band_index"]) == len(payload["fill"])
        assert set(payload["band_index"]) <= {0, 1, 2, 3}

    def test_horizon_unknown(self, small_store):
        api = StoreApi(small_store)
        status, _ = api.dispatch("GET", "/variables/Bogus/horizon")
        assert status == 404


class TestSchemesEndpoint:
    def test_both_quantizers_served(self, small_store):
        api = StoreApi(small_store)
        status, payload = api.dispatch("GET", "/schemes")
        assert status == 200
        assert set(payload) == {"corr", "shap"}
        for scheme in payload.values():
            assert len(scheme["dim1_edges"]) == 9
            assert len(scheme["dim2_edges"]) == 5
            assert scheme["tree"] == [8, 4, 2, 1]
            assert len(scheme["cells"]) == 15
        assert payload["corr"]["dim1_edges"][0] == -1.0
        assert payload["corr"]["dim1_edges"][-1] == 1.0


class TestPredictionsEndpoint:
    def test_full_sample_when_small(self, small_store):
        api = StoreApi(small_store)
        status, payload = api.dispatch("GET", "/predictions?axes=corr&n=100000")
        assert status == 200
        assert len(payload["points"]) == payload["total"]
        assert payload["selected_rows"] == []

    def test_sampling_deterministic(self, small_store):
        api = StoreApi(small_store)
        _, a = api.dispatch("GET", "/predictions?axes=corr&n=50&seed=3")
        _, b = api.dispatch("GET", "/predictions?axes=corr&n=50&seed=3")
        assert a == b
        assert len(a["points"]) == 50

    def test_axes_switch(self, small_store):
        api = StoreApi(small_store)
        _, corr = api.dispatch("GET", "/predictions?axes=corr&n=10")
        _, shap = api.dispatch("GET", "/predictions?axes=shap&n=10")
        assert corr["axes"]["x"] == "corr"
        assert shap["axes"]["x"] == "shap"
        # shap view keeps corr-degenerate windows, corr view drops them
        assert shap["total"] >= corr["total"]

    def test_rep_filter(self, small_store):
        api = StoreApi(small_store)
        rep_id = small_store.representation_ids()[0]
        quoted = rep_id.replace("/", "%2F")
        _, payload = api.dispatch("GET", f"/predictions?reps={quoted}&axes=shap&n=100000")
        assert {p["rep"] for p in payload["points"]} == {rep_id}
        assert payload["total"] == small_store.rep_meta(rep_id)["n_windows"]

    def test_whole_plane_polygon_selects_all(self, small_store):
        api = StoreApi(small_store)
        body = json.dumps(
            {"polygons": [[[-1e9, -1e9], [1e9, -1e9], [1e9, 1e9], [-1e9, 1e9]]]}
        ).encode()
        status, payload = api.dispatch("POST", "/predictions?axes=shap", body)
        assert status == 200
        assert len(payload["selected_rows"]) == payload["total"]

    def test_union_matches_shapely_oracle(self, small_store):
        api = StoreApi(small_store)
        _, base = api.dispatch("GET", "/predictions?axes=shap&n=1000000")
        coords = [(p["x"], p["y"]) for p in base["points"]]
        xs = [c[0] for c in coords]
        ys = [c[1] for c in coords]
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)

        rng = np.random.default_rng(17)

        def random_polygon():
            cx = rng.uniform(x_lo, x_hi)
            cy = rng.uniform(y_lo, y_hi)
            r_x = rng.uniform(0.1, 0.6) * (x_hi - x_lo)
            r_y = rng.uniform(0.1, 0.6) * (y_hi - y_lo)
            angles = np.sort(rng.uniform(0, 2 * np.pi, 7))
            return [
                [cx + r_x * np.cos(a), cy + r_y * np.sin(a)] for a in angles
            ]

        for _ in range(10):
            polys = [random_polygon(), random_polygon()]
            body = json.dumps({"polygons": polys}).encode()
            _, payload = api.dispatch("POST", "/predictions?axes=shap&n=1000000", body)
            got = {(p["rep"], p["index"]) for p in payload["selected_rows"]}
            shapely_polys = [Polygon(p) for p in polys]
            expected = {
                (p["rep"], p["index"])
                for p in base["points"]
                if any(sp.contains(Point(p["x"], p["y"])) for sp in shapely_polys)
            }
            assert got == expected

    def test_malformed_polygon(self, small_store):
        api = StoreApi(small_store)
        body = json.dumps({"polygons": [[[0, 0], [1, 1]]]}).encode()
        status, payload = api.dispatch("POST", "/predictions", body)
        assert status == 400
        assert payload["code"] == "malformed_polygon"

    def test_unknown_rep_in_filter(self, small_store):
        api = StoreApi(small_store)
        status, _ = api.dispatch("GET", "/predictions?reps=Missing%2FSk-1")
        assert status == 404


class TestPurityAndConcurrency:
    def test_identical_concurrent_gets(self, small_store):
        api = StoreApi(small_store)
        heavy = [
            "/representations",
            "/predictions?axes=corr&n=40",
            f"/representations/{small_store.representation_ids()[0].replace('/', '%2F')}"
            "/stripe?pixels=120&metric=corr",
        ]
        # 10 000 requests total: the cheap manifest route carries the volume,
        # the heavier routes still run a few hundred times each
        workload = ["/manifest"] * (10_000 - 3 * 300) + heavy * 300
        reference = {p: dump_json(api.dispatch("GET", p)[1]) for p in set(workload)}

        def worker(path):
            status, obj = api.dispatch("GET", path)
            return status == 200 and dump_json(obj) == reference[path]

        with concurrent.futures.ThreadPoolExecutor(max_workers=16) as pool:
            results = list(pool.map(worker, workload, chunksize=100))
        assert len(results) == 10_000 and all(results)

    def test_store_files_untouched_by_reads(self, small_store):
        before = store_digest(small_store)
        api = StoreApi(small_store)
        for path in ("/manifest", "/representations", "/variables",
                     "/predictions?axes=shap&n=10"):
            api.dispatch("GET", path)
        assert store_digest(small_store) == before


class TestHttpServer:
    def test_live_server(self, small_store):
        server = serve(small_store, port=0)
        port = server.server_address[1]
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            with urllib.request.urlopen(f"http://127.0.0.1:{port}/manifest") as resp:
                assert resp.status == 200
                assert resp.headers["Content-Type"] == "application/json"
                body = json.loads(resp.read().decode())
                assert body == small_store.manifest
            rep_id = small_store.representation_ids()[0].replace("/", "%2F")
            url = f"http://127.0.0.1:{port}/representations/{rep_id}/stripe?pixels=16&metric=corr"
            with urllib.request.urlopen(url) as resp:
                payload = json.loads(resp.read().decode())
                assert payload["pixels"] == 16
            bad = urllib.request.Request(f"http://127.0.0.1:{port}/representations/zzz")
            with pytest.raises(urllib.error.HTTPError) as err:
                urllib.request.urlopen(bad)
            assert err.value.code == 404
        finally:
            server.shutdown()
            server.server_close()

    def test_port_in_use(self, small_store):
        server = serve(small_store, port=0)
        port = server.server_address[1]
        try:
            with pytest.raises(PortInUseError):
                serve(small_store, port=port)
        finally:
            server.server_close()


class TestPolygonGeometry:
    def test_square(self):
        square = np.array([[0, 0], [2, 0], [2, 2], [0, 2]], dtype=float)
        pts = np.array([[1, 1], [3, 1], [-0.5, 1], [1.5, 1.99]])
        assert points_in_polygon(pts, square).tolist() == [True, False, False, True]

    def test_concave(self):
        # a "U" shape: the notch interior is outside
        poly = np.array(
            [[0, 0], [4, 0], [4, 3], [3, 3], [3, 1], [1, 1], [1, 3], [0, 3]], dtype=float
        )
        pts = np.array([[2, 0.5], [2, 2], [0.5, 2], [3.5, 2]])
        assert points_in_polygon(pts, poly).tolist() == [True, False, True, True]

    def test_too_few_vertices(self):
        with pytest.raises(MalformedPolygonError):
            points_in_polygon(np.zeros((1, 2)), np.array([[0, 0], [1, 1]], dtype=float))

    def test_matches_shapely_on_random_data(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            pts = rng.uniform(-5, 5, (200, 2))
            angles = np.sort(rng.uniform(0, 2 * np.pi, 9))
            radius = rng.uniform(1, 4)
            poly = np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])
            mine = points_in_polygon(pts, poly)
            sp = Polygon(poly)
            expected = np.array([sp.contains(Point(*p)) for p in pts])
            assert (mine == expected).all()
