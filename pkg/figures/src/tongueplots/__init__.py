"""Figure rendering for the frequency-locking pipeline's CSV outputs."""

__version__ = "0.1.0"
