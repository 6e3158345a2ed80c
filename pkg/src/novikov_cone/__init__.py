"""Exact computations around conical Novikov homology."""
