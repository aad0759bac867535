"""Synthetic test signals."""

from .synthetic import SIGNAL_JUMPS, SIGNALS, bessel_signal, generate_series, heavisine, vector_signal

__all__ = ["SIGNALS", "SIGNAL_JUMPS", "bessel_signal", "heavisine", "vector_signal", "generate_series"]
