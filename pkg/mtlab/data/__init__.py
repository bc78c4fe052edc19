"""Bundled curve data and the on-disk symbol-space cache."""

from .cache import SpaceCache
from .curve_db import find_curve, parse_curve_file, parse_curve_line

__all__ = ["SpaceCache", "find_curve", "parse_curve_file", "parse_curve_line"]
