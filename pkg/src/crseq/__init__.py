"""Dynamically corrected cross-resonance sequences: synthesis, benchmarking, simulation."""

__version__ = "0.1.0"
