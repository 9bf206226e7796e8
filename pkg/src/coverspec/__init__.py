"""Spectra and modified harmonics on Riemannian coverings of E^3."""

from .rational import CoveringParameter, classify, make_covering_parameter, parse_k

__version__ = "0.1.0"

__all__ = ["CoveringParameter", "classify", "make_covering_parameter", "parse_k", "__version__"]
