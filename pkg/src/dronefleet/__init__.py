"""Multi-center drone delivery district simulator and fleet controllers."""

__version__ = "0.1.0"
