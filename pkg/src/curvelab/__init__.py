"""Curve graphs of the torus with marked points."""
