"""Desk-scale matroid censuses: sparse paving families, biased-graph lifts,
excluded-minor generators and boundary-ratio tables."""

from .kernel import (
    Matroid,
    SetFamily,
    RankedFlat,
    make_matroid,
    uniform,
    direct_sum,
    is_excluded_minor,
)

__all__ = [
    "Matroid",
    "SetFamily",
    "RankedFlat",
    "make_matroid",
    "uniform",
    "direct_sum",
    "is_excluded_minor",
]
