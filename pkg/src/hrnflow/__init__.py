"""Data-flow error analysis for hierarchical recurrent networks."""

__version__ = "0.1.0"
