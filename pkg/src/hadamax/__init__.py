"""Complex Hadamard matrices from mutually unbiased bases."""

__version__ = "0.1.0"
