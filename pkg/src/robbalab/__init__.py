"""robbalab: a verification laboratory for cyclotomic (phi, Gamma)-operators
over truncated Robba rings with Qp / extension / dual-number coefficients.

The package computes, exactly where possible and to tracked p-adic precision
otherwise: the Amice/Colmez dictionary, character twists m_delta and the
involution w_* on psi = 0 elements, finite-dimensional semigroup modules,
Koszul and Lie cohomology complexes with their dimension tables, and the
projective-line gluing of rank-1 modules with its GL_2(Qp) relation checks.
"""

from .coefficients import CoeffElement, CoeffRing, PAdic, INF

__all__ = ["CoeffElement", "CoeffRing", "PAdic", "INF"]

__version__ = "0.1.0"
