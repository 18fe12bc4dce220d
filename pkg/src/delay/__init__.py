"""
Delay Measures
==============

Finite delay measures on [0, delta] and the grid approximation of H.
"""

from .measure import DelayMeasure, HistorySegment, grid_lag_count, GRID_TOLERANCE

__all__ = [
    "DelayMeasure",
    "HistorySegment",
    "grid_lag_count",
    "GRID_TOLERANCE",
]
