"""Discretization of planar geometric cover problems into set cover."""
