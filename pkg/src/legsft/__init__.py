"""Cyclic tensor-algebra calculus for Legendrian homology algebras.

Exact (rational) computation of the complexes M^cyc and M^bal, the
contraction calculus on balanced monomials, the Hamiltonians H^1_q, and
the product and BV-operator they induce on homology.
"""
from .algebra_core import AlgebraError, Element, Gen, Monomial, Presentation
from .presentation_io import PresentationError, format_element, parse_element, parse_presentation

__all__ = [
    "AlgebraError",
    "Element",
    "Gen",
    "Monomial",
    "Presentation",
    "PresentationError",
    "format_element",
    "parse_element",
    "parse_presentation",
]
