"""Maximal reachability probabilities of rectangular automata with random clocks."""

from ._core import (
    AnalysisError,
    DegenerateBoundsError,
    Model,
    ModelError,
    default_tau,
    interval_mass,
    tighten_bounds,
    truncation_error,
)

__all__ = [
    "AnalysisError",
    "DegenerateBoundsError",
    "Model",
    "ModelError",
    "default_tau",
    "interval_mass",
    "tighten_bounds",
    "truncation_error",
]
