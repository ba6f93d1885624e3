"""Regular symmetry patterns for parameterised systems."""

__version__ = "0.1.0"
