"""Simulator and learners for a STAR-RIS assisted UAV virtual antenna array."""

__version__ = "0.1.0"
