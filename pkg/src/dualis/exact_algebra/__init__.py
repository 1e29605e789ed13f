"""Exact arithmetic and ideal-theoretic decision procedures."""

from .modules import ModulePresentation, lift, syzygy_module
from .polynomials import Poly, PolynomialSyntaxError
from .rings import (
    AlgebraError,
    Ideal,
    NotFiniteError,
    RegularityResult,
    RingMap,
    RingPresentation,
    base_change_ring,
    colon_and_regularity,
    field_ring,
    groebner_basis,
    monomial_basis,
    normal_form,
    polynomial_ring,
    quotient_ring,
)
from .scalars import GF, QQ, FieldError, Mod, PrimeField, RationalField, format_scalar

__all__ = [
    "AlgebraError", "FieldError", "GF", "Ideal", "Mod", "ModulePresentation",
    "NotFiniteError", "Poly", "PolynomialSyntaxError", "PrimeField", "QQ",
    "RationalField", "RegularityResult", "RingMap", "RingPresentation",
    "base_change_ring", "colon_and_regularity", "field_ring", "format_scalar",
    "groebner_basis", "lift", "monomial_basis", "normal_form", "polynomial_ring",
    "quotient_ring", "syzygy_module",
]
