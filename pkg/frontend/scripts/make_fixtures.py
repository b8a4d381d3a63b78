"""Record API responses from a small 28-representation run store.

The frontend tests run against these canned payloads; they are schema-equal
to live /manifest, /representations, /schemes, stripe, horizon, matrix and
prediction responses. Regenerate with:

    python scripts/make_fixtures.py
"""

import json
import sys
import tempfile
from pathlib import Path

from repgrid.core import SmoothingSpec, TransformConfig, load_dataset
from repgrid.forecaster import ModelConfig
from repgrid.service import StoreApi, run_pipeline

HERE = Path(__file__).resolve().parent
FIXTURES = HERE.parent / "tests" / "fixtures"
PKG_TESTS = Path("/root/pkg/tests")

sys.path.insert(0, str(PKG_TESTS))
from fixtures import write_sunspot_csv  # noqa: E402


def get(api, path):
    status, payload = api.dispatch("GET", path)
    assert status == 200, (path, payload)
    return payload


def main():
    workdir = Path(tempfile.mkdtemp(prefix="frontend_fixture_"))
    csv_path = write_sunspot_csv(workdir / "sunspots.csv", months=140, seed=31)
    dataset = load_dataset(csv_path, target="sunspots")
    smoothings = (SmoothingSpec("raw"),) + tuple(
        SmoothingSpec(method, m) for method in ("ma", "wma") for m in (3, 6, 13)
    )
    transform = TransformConfig(
        smoothings=smoothings, skips=(1, 3, 6, 13), window_length=30, horizon=10
    )
    model_config = ModelConfig(
        horizon=10, seed=8, conv_filters=4, conv_kernel=3, lstm_units=6,
        dense_units=6, epochs=1, batch_size=32,
    )
    store = run_pipeline(
        dataset, transform, model_config, workdir / "store",
        shap_segments=6, progress=lambda msg: print(" ", msg),
    )
    api = StoreApi(store)
    FIXTURES.mkdir(parents=True, exist_ok=True)

    out = {
        "manifest.json": get(api, "/manifest"),
        "profile.json": get(api, "/representations"),
        "schemes.json": get(api, "/schemes"),
        "variables.json": get(api, "/variables"),
        "predictions_corr.json": get(api, "/predictions?axes=corr&n=400"),
        "predictions_shap.json": get(api, "/predictions?axes=shap&n=400"),
        "matrix_raw_ma3.json": get(api, "/variables/matrix?x=Raw&y=MA-3&grid=5"),
    }
    rep_ids = store.representation_ids()
    assert len(rep_ids) == 28, len(rep_ids)
    stripes = {}
    for rep_id in rep_ids:
        quoted = rep_id.replace("/", "%2F")
        stripes[rep_id] = get(
            api, f"/representations/{quoted}/stripe?pixels=160&metric=corr"
        )
    out["stripes_corr.json"] = stripes
    horizons = {}
    for series_id in store.manifest["shared"]["horizon"]:
        horizons[series_id] = get(api, f"/variables/{series_id}/horizon")
    out["horizons.json"] = horizons
    first = rep_ids[0].replace("/", "%2F")
    out["window_detail.json"] = get(api, f"/representations/{first}/windows/0")

    for name, payload in out.items():
        (FIXTURES / name).write_text(json.dumps(payload, sort_keys=True, indent=1))
        print(f"wrote {name}")


if __name__ == "__main__":
    main()
