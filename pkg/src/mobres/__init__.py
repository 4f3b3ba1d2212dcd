"""Strong desingularization over Q driven by mobiles and their resolution invariant."""
from .poly import Polynomial, SubstitutionMap, parse_polynomial, format_polynomial
from .ideal import Ideal, groebner_basis
from .handicap import HandicapRule, Tag
from .mobile import Mobile, build_setup
from .resolver import resolve_mobile, resolve_scheme, separate_components

__all__ = ["Polynomial", "SubstitutionMap", "parse_polynomial", "format_polynomial",
           "Ideal", "groebner_basis", "HandicapRule", "Tag", "Mobile", "build_setup",
           "resolve_mobile", "resolve_scheme", "separate_components"]
__version__ = "0.1.0"
