"""Roots of X^2 + 1 modulo n in sectors: lattice enumeration, Weyl sums,
smooth cutoffs, special functions, a non-spherical Selberg test function and
Poincare series cross-checks."""

__version__ = "0.1.0"
