"""Structure theory and constant terms of real spherical spaces."""

__version__ = "0.1.0"
