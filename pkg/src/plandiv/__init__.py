"""Sublinear r-pseudodivision oracles for embedded planar graphs, additive
Lipschitz parameter estimation, and a space-accounted MPC simulator."""

__version__ = "0.1.0"
