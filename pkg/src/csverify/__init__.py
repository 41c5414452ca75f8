"""Exact verification of the computations behind the classification of
four-dimensional conical symplectic hypersurfaces."""

__version__ = "0.1.0"
