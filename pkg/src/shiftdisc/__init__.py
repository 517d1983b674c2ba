"""Low-discrepancy colorings of k-subsets built from shift-graph colorings."""

__version__ = "0.1.0"
