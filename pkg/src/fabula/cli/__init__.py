"""Command Line Interface for fabula."""

__version__ = "0.1.0"
