"""Exact-arithmetic construction and verification of type D ASEP models.

Modules:

  exactq       Laurent polynomials over Q, the field Q(q), exact matrices
  qgroup       root data and the fundamental representation of U_q(so_2n)
  pairing      Borel pairing, word bases, dual elements
  central      central-element assembly, realization, centrality checks
  hamiltonian  two-site Hamiltonians, kernels, derived Markov generators
  processes    the five particle processes and their symmetry dualities
  asep         the type D ASEP proper: rates, dualities, simulation
  classical    undeformed Casimir generator and the Type-m Parallel SSEP
  cli          verification suites and command-line entry point
"""

__version__ = "1.0.0"
