"""Exact computations in the Urysohn universal metric space over dyadic rationals."""

from .dyadic import Dyadic
from .interval import Interval
from .space import EMPTY, Store
from .extend import CountableMetricSpace, DyadicUrysohn, PartialIsometry, back_and_forth, ext_d, extend_isometry
from .completion import ApproxReal, UPoint, ext_complete
from .metricio import load_space, parse_space

__all__ = [
    "Dyadic",
    "Interval",
    "EMPTY",
    "Store",
    "CountableMetricSpace",
    "DyadicUrysohn",
    "PartialIsometry",
    "back_and_forth",
    "ext_d",
    "extend_isometry",
    "ApproxReal",
    "UPoint",
    "ext_complete",
    "load_space",
    "parse_space",
]
