"""Exact computations with hermitian lattices over a ramified quadratic extension
of Q_p: invariants, overlattice enumeration, local densities and their central
derivatives, lattice-indicator Schwartz functions, and brute-force oracles."""

from .efield import FieldConfig, FieldElement
from .lattice import HermLattice, HermSpace, Invariants

__all__ = ["FieldConfig", "FieldElement", "HermLattice", "HermSpace", "Invariants"]
__version__ = "0.1.0"
