"""OFDM joint communication and sensing: range/velocity/angle tracking simulation."""

__version__ = "0.1.0"
