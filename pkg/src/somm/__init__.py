"""Memory-model simulation by second-order model checking over event structures."""

__version__ = "0.1.0"
