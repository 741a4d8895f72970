"""Water heater detection and disaggregation on half-hourly load curves."""

import json

from . import _core
from ._core import (
    AlignmentError,
    CwhError,
    SchemaError,
    anonymize,
    density,
    disaggregate,
    first_local_minimum,
    interval_confusion,
    scott_bandwidth,
    simulate,
)

__all__ = [
    "AlignmentError",
    "CwhError",
    "SchemaError",
    "anonymize",
    "density",
    "detect",
    "disaggregate",
    "first_local_minimum",
    "interval_confusion",
    "run_batch",
    "scott_bandwidth",
    "simulate",
]


def detect(csv_text, offpeak, **kwargs):
    """Run detection on a load curve given as CSV text; returns a dict."""
    return json.loads(_core.detect(csv_text, list(offpeak), **kwargs))


def run_batch(dataset_dir, metadata_json, workers=1, tz=""):
    """Batch summary of a directory of <id>.csv curves, as a dict."""
    return json.loads(_core.run_batch(str(dataset_dir), metadata_json, workers, tz))
