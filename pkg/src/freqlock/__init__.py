"""Frequency-locking structure of a driven Lienard oscillator.

Perturbative plateau widths (first and second order) for the resonantly
driven oscillator used in injection-locked frequency dividers, cross-checked
against direct stroboscopic simulation.
"""

__version__ = "0.1.0"
