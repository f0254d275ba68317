"""Simplicial connectivity tools, integer homology and homological stability bookkeeping."""

__version__ = "0.1.0"
