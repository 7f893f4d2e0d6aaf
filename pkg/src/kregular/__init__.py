"""Exact k-regularity analysis of polynomial systems at singular zeros."""
from .polysys import PolyMap, parse
from .iteration import analyze, lift

__version__ = "0.1.0"

__all__ = ["PolyMap", "parse", "analyze", "lift", "__version__"]
