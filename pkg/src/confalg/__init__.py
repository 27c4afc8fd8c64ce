"""Exact symbolic computations with conformal algebras."""

__version__ = "0.1.0"

from .core import (ASSOCIATIVE, LIE, CheckReport, Element, GeneratorInfo, InputError,
                   Presentation, check_conformal_associativity, check_conformal_jacobi,
                   check_quasi_symmetry, element_locality, is_central, nth_product,
                   validate_presentation)
from .constructions import (FiniteAlgebra, affinize, builtin, commutator_algebra,
                            loop_algebra, quotient)
from .embed import Bounds, build_enveloping, hypothesis_scan, verify_embedding
from .locality import dong_bound_check, locality_function

__all__ = [
    "ASSOCIATIVE", "LIE", "CheckReport", "Element", "GeneratorInfo", "InputError",
    "Presentation", "check_conformal_associativity", "check_conformal_jacobi",
    "check_quasi_symmetry", "element_locality", "is_central", "nth_product",
    "validate_presentation", "FiniteAlgebra", "affinize", "builtin",
    "commutator_algebra", "loop_algebra", "quotient", "Bounds", "build_enveloping",
    "hypothesis_scan", "verify_embedding", "dong_bound_check", "locality_function",
]
