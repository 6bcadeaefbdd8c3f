"""Numerical laboratory for approximate quantum state sharing over random
unitary channels: exact generalized-Pauli encryption baselines, Haar-sampled
approximate channels, the two-receiver and multiparty sharing protocols, and
Monte Carlo checkers for the associated security bounds.
"""

__version__ = "0.1.0"

from . import analysis, channels, cli, linalg, protocol, random

__all__ = ["analysis", "channels", "cli", "linalg", "protocol", "random", "__version__"]
