"""Spinor geometry of 2D Riemannian and Lorentzian spin manifolds, evaluated on
truncated Taylor jets: Dirac operator, its first- and second-order symmetry
operators, and separation of variables on Liouville surfaces."""

__version__ = "0.1.0"
