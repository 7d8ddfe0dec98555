"""ramclass: ramification-driven class group statistics at desk scale."""

__version__ = "0.1.0"
