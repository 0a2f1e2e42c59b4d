"""Hyperbolic-polynomial spectral discrepancy toolkit.

Computes hyperbolic spectra (eigenvalues, norm, trace, rank), builds
interlacing families and mixed characteristic polynomials, verifies the
operator identities and barrier root bounds numerically, and runs the
blocked coefficient-oracle search against brute-force baselines, all at
desk scale over an exact-rational or binary64 backend.
"""

__version__ = "0.1.0"
