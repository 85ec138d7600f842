"""Exact flag complexes over iterated Laurent series fields."""
