"""Multi-class parallel quantum classifier on a dense statevector simulator."""

__version__ = "0.1.0"
