"""Exact invariants of tame Langlands parameter moduli and brute-force checks over finite fields."""

from .errors import LangParamsError, SizeGuardError

__version__ = "0.1.0"

__all__ = ["LangParamsError", "SizeGuardError", "__version__"]
