"""Numerical companion for sharp Hardy-Sobolev type inequalities in Euclidean and hyperbolic space."""

__version__ = "0.1.0"
