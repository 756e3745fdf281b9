"""Exact verification of quantization and minimal-substitution obstructions."""

__version__ = "0.1.0"
ENGINE_VERSION = __version__
