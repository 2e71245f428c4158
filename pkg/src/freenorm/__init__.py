"""Exact group-algebra arithmetic and certified operator-norm bounds for
free products of finitely generated free groups, plus the quantitative
retraction and Cayley-tree machinery built on top of it."""

from .algebra import AlgebraElement, canonical_hash, combine, convolve, parse_element, power
from .errors import (
    BudgetExceededError,
    CoefficientLimitError,
    ContextMismatchError,
    FreenormError,
    HypothesisViolationError,
    ParseError,
)
from .norms import (
    NormCertificate,
    RapidDecayBound,
    certify_norm,
    haagerup_upper,
    power_lower,
    vector_lower,
)
from .selfless import (
    Retraction,
    RetractionFamily,
    SubstitutionMap,
    apply,
    build_retraction,
    check_injectivity,
    fiber_statistics,
    growth_profile,
    product_nontriviality,
    transfer_experiment,
)
from .treegeo import (
    Axis,
    CascadeReport,
    ConstantProvider,
    admissible_path_check,
    constant_cascade,
    displacement_by_ball_scan,
    elementary_membership,
    minimal_exponent_search,
    projection_diameter,
    stable_length,
    translation_length,
)
from .words import GroupContext, Word, enumerate_ball, parse_word

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "Axis",
    "BudgetExceededError",
    "CascadeReport",
    "CoefficientLimitError",
    "ConstantProvider",
    "ContextMismatchError",
    "FreenormError",
    "GroupContext",
    "HypothesisViolationError",
    "NormCertificate",
    "ParseError",
    "RapidDecayBound",
    "Retraction",
    "RetractionFamily",
    "SubstitutionMap",
    "Word",
    "admissible_path_check",
    "apply",
    "build_retraction",
    "canonical_hash",
    "certify_norm",
    "check_injectivity",
    "combine",
    "constant_cascade",
    "convolve",
    "displacement_by_ball_scan",
    "elementary_membership",
    "enumerate_ball",
    "fiber_statistics",
    "growth_profile",
    "haagerup_upper",
    "minimal_exponent_search",
    "parse_element",
    "parse_word",
    "power",
    "power_lower",
    "product_nontriviality",
    "projection_diameter",
    "stable_length",
    "transfer_experiment",
    "translation_length",
    "vector_lower",
]
