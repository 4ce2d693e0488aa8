"""unimaps: exact enumeration and bijections for unicellular maps on surfaces."""

__version__ = "0.1.0"
