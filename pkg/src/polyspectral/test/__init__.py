"""Tests for the polyspectral library."""
