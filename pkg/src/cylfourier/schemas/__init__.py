"""JSON schemas for every document the command line emits."""

import json
from importlib import resources

NAMES = ("sgh_report", "certificate", "solve_report", "transform_report",
         "diagnose_report", "error", "demo_report")


def load_schema(name: str) -> dict:
    if name not in NAMES:
        raise KeyError(f"unknown schema {name!r}")
    return json.loads(resources.files(__name__).joinpath(f"{name}.json").read_text())
