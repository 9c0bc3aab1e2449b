"""Continent and popularity bias tooling for collaborative-filtering lists.

Thin wrapper around the compiled core: dataset ingestion, baseline
recommenders, visibility/exposure bias measures, and the MFAIR two-phase
greedy re-ranking.
"""

from mfair._core import *  # noqa: F401,F403
from mfair._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
