from .api import ApiServer, StoreApi, points_in_polygon, serve
from .pipeline import run_pipeline
from .store import RunStore, dump_json, read_array, read_json, write_array, write_json

__all__ = [
    "ApiServer",
    "RunStore",
    "StoreApi",
    "dump_json",
    "points_in_polygon",
    "read_array",
    "read_json",
    "run_pipeline",
    "serve",
    "write_array",
    "write_json",
]
