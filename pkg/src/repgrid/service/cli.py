"""Command-line entry points: run a sweep, serve a store, export the profile.

Examples:
    repgrid run --data sunspots.csv --target sunspots --out runs/sunspots \\
        --seed 7 --smoothing raw,ma:3,wma:13 --skips 1,3 --window 240 --horizon 40
    repgrid serve --store runs/sunspots --port 8765
    repgrid report --store runs/sunspots --format csv
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

from ..core import SmoothingSpec, TransformConfig, load_dataset
from ..forecaster import ModelConfig
from .api import StoreApi, serve
from .pipeline import run_pipeline
from .store import RunStore


def parse_smoothing(text: str) -> tuple[SmoothingSpec, ...]:
    """Parse 'raw,ma:3,wma:13' into smoothing specs."""
    specs = []
    for token in text.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token == "raw":
            specs.append(SmoothingSpec(method="raw"))
            continue
        if ":" not in token:
            raise argparse.ArgumentTypeError(
                f"bad smoothing {token!r}; use raw, ma:<m>, or wma:<m>"
            )
        method, _, span = token.partition(":")
        if method not in ("ma", "wma"):
            raise argparse.ArgumentTypeError(f"unknown smoothing method {method!r}")
        try:
            m = int(span)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad span in {token!r}")
        specs.append(SmoothingSpec(method=method, m=m))
    if not specs:
        raise argparse.ArgumentTypeError("at least one smoothing spec required")
    return tuple(specs)


def parse_skips(text: str) -> tuple[int, ...]:
    try:
        skips = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"skips must be integers, got {text!r}")
    if not skips:
        raise argparse.ArgumentTypeError("at least one skip required")
    return skips


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repgrid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full pipeline sweep into a store")
    run.add_argument("--data", required=True, help="input CSV path")
    run.add_argument("--target", required=True, help="target variable column name")
    run.add_argument("--out", required=True, help="output store directory")
    run.add_argument("--seed", required=True, type=int, help="sweep seed (mandatory)")
    run.add_argument("--smoothing", type=parse_smoothing, default=parse_smoothing("raw"),
                     help="comma list: raw, ma:<m>, wma:<m>")
    run.add_argument("--skips", type=parse_skips, default=(1,), help="comma list of skip lengths")
    run.add_argument("--window", type=int, required=True, help="input window length W")
    run.add_argument("--horizon", type=int, required=True, help="forecast length")
    run.add_argument("--split-ratio", type=float, default=0.8)
    run.add_argument("--conv-filters", type=int, default=32)
    run.add_argument("--conv-kernel", type=int, default=3)
    run.add_argument("--lstm-units", type=int, default=50)
    run.add_argument("--dense-units", type=int, default=32)
    run.add_argument("--learning-rate", type=float, default=1e-3)
    run.add_argument("--epochs", type=int, default=100)
    run.add_argument("--batch-size", type=int, default=32)
    run.add_argument("--shap-segments", type=int, default=12,
                     help="lag segments for univariate attribution")
    run.add_argument("--mosaic-grid", type=int, default=5)

    srv = sub.add_parser("serve", help="serve a store over HTTP/JSON")
    srv.add_argument("--store", required=True)
    srv.add_argument("--port", type=int, default=8765)
    srv.add_argument("--host", default="127.0.0.1")

    rep = sub.add_parser("report", help="export the profile table")
    rep.add_argument("--store", required=True)
    rep.add_argument("--format", choices=("csv", "json"), default="csv")
    rep.add_argument("--out", help="output file (default stdout)")
    return parser


def _cmd_run(args) -> int:
    dataset = load_dataset(args.data, target=args.target)
    transform = TransformConfig(
        smoothings=args.smoothing,
        skips=args.skips,
        window_length=args.window,
        horizon=args.horizon,
        split_ratio=args.split_ratio,
    )
    model_config = ModelConfig(
        horizon=args.horizon,
        seed=args.seed,
        conv_filters=args.conv_filters,
        conv_kernel=args.conv_kernel,
        lstm_units=args.lstm_units,
        dense_units=args.dense_units,
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch_size=args.batch_size,
    )
    store = run_pipeline(
        dataset,
        transform,
        model_config,
        args.out,
        shap_segments=args.shap_segments,
        mosaic_grid=args.mosaic_grid,
        progress=lambda msg: print(msg, file=sys.stderr),
    )
    ok = store.representation_ids()
    failed = [r for r in store.manifest["representations"] if r["status"] != "ok"]
    print(f"store written to {store.root} ({len(ok)} ok, {len(failed)} failed)")
    return 0 if not failed else 1


def _cmd_serve(args) -> int:
    server = serve(args.store, args.port, args.host)
    print(f"serving {args.store} at http://{args.host}:{args.port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def _cmd_report(args) -> int:
    api = StoreApi(RunStore(args.store))
    rows = api.profile_rows()
    if args.format == "json":
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    else:
        columns = [
            "id", "status", "method", "m", "skip", "n_windows", "n_train",
            "train_error", "val_error", "acf", "acf_lag", "adf_statistic", "stationary",
        ]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "serve":
        return _cmd_serve(args)
    return _cmd_report(args)


if __name__ == "__main__":
    raise SystemExit(main())
