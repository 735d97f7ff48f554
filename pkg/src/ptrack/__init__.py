"""Front tracking for the p-system with general convex pressure laws."""

__version__ = "0.1.0"
