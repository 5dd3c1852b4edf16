"""Superform calculus for convex geometry.

Exact exterior algebra of superforms, positivity cones, mixed volumes and
discriminants, Monge-Ampere measures of piecewise linear functions, surface
area measures, valuations and a discretised Alexandrov operator.
"""

__version__ = "0.1.0"
