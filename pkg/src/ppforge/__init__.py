"""Prime path and test path generation for control-flow graphs."""

__version__ = "0.1.0"
