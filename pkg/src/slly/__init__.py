"""Exact constructors and verification tools for N bosons on a line with
pairwise contact interactions, and for the N=2 supersymmetric extension of
that system.

Submodules
----------
piecewise : exact calculus for piecewise-exponential functions on the
            ordering chambers of R^N
bethe     : Bethe-ansatz collision states, bound-state families, S-matrix
fock      : finite fermionic Fock space, ladder/number/Klein/gamma operators
susy      : supercharges, sector Hamiltonians, zero modes, Witten census
lattice   : independent finite-difference eigenvalue oracle on a Dirichlet box
cli       : command-line driver emitting machine-readable reports
"""

__version__ = "0.1.0"
