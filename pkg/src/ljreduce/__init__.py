"""Exact verification of Poisson and Lie-Jordan reductions.

Smooth functions are modelled by polynomials over the rationals, so every
closure, ideal and Jacobi condition becomes a finite linear-algebra question
that is decided exactly.
"""

from ljreduce.exactalg import GaussianRational, Monomial, Polynomial, parse_polynomial
from ljreduce.poisson import PoissonBivector, PolyVectorField, Trivector

__all__ = [
    "GaussianRational",
    "Monomial",
    "Polynomial",
    "parse_polynomial",
    "PoissonBivector",
    "PolyVectorField",
    "Trivector",
]

__version__ = "0.1.0"
