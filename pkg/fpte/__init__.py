"""First-passage-time moments for one-dimensional diffusions with entrance boundaries."""

__version__ = "0.1.0"
