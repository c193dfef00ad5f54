"""Overloads of the generic pairings for the boundary datum types."""
