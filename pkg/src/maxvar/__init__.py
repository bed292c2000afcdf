"""Sharp maximum variance of bounded finite datasets, and summary-statistics audits."""

from .core import (
    BoundsSpec,
    Dataset,
    ExtremalStructure,
    InfeasibleInstanceError,
    ProblemSpec,
    Semantics,
    SemanticsError,
    bhatia_davis,
    cv_squared_max,
    envelope,
    extremal_structure,
    max_variance,
    max_variance_unit,
    sum_squares_bound,
    witness_dataset,
)
from .numbers import (
    DomainError,
    Interval,
    MaxVarError,
    ParseError,
    RoundedValue,
    frac_part,
    to_rational,
)

__version__ = "0.1.0"

__all__ = [
    "BoundsSpec",
    "Dataset",
    "DomainError",
    "ExtremalStructure",
    "InfeasibleInstanceError",
    "Interval",
    "MaxVarError",
    "ParseError",
    "ProblemSpec",
    "RoundedValue",
    "Semantics",
    "SemanticsError",
    "bhatia_davis",
    "cv_squared_max",
    "envelope",
    "extremal_structure",
    "frac_part",
    "max_variance",
    "max_variance_unit",
    "sum_squares_bound",
    "to_rational",
    "witness_dataset",
]
