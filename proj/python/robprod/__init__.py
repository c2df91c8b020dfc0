"""Robust production-function estimation with pruned minimum spanning trees."""

from ._core import (
    DataError,
    NumericalError,
    Panel,
    __version__,
    build_mst,
    classify,
    critical_length,
    decontaminate,
    estimate,
    run_pipeline,
    simulate,
    trim,
)

__all__ = [
    "DataError",
    "NumericalError",
    "Panel",
    "__version__",
    "build_mst",
    "classify",
    "critical_length",
    "decontaminate",
    "estimate",
    "run_pipeline",
    "simulate",
    "trim",
]
