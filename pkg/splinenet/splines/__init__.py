"""
Splines module - canonical form and classical interpolants
"""
from splinenet.splines.canonical import (
    CanonicalSpline,
    eval_spline,
    spline_derivative,
    spline_seminorm,
)
from splinenet.splines.interpolants import connect_the_dots, natural_cubic

__all__ = [
    "CanonicalSpline",
    "eval_spline",
    "spline_derivative",
    "spline_seminorm",
    "connect_the_dots",
    "natural_cubic",
]
