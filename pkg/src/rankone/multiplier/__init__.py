"""Multiplier expressions, derivative jets and Mikhlin-Hormander constants."""
from .expr import (
    ComplexJet,
    MultiplierExpr,
    MultiplierSyntaxError,
    Node,
    SingularityError,
    UnknownIdentifierError,
    eval_jet,
    parse_multiplier,
)

__all__ = [
    "ComplexJet",
    "MultiplierExpr",
    "MultiplierSyntaxError",
    "Node",
    "SingularityError",
    "UnknownIdentifierError",
    "eval_jet",
    "parse_multiplier",
]
from .mikhlin import (
    BranchDiscontinuityWarning,
    EvennessError,
    GridSpec,
    MHResult,
    check_even,
    mh_constant,
    mh_outer_constant,
    mikhlin_real_line,
)

__all__ += [
    "BranchDiscontinuityWarning",
    "EvennessError",
    "GridSpec",
    "MHResult",
    "check_even",
    "mh_constant",
    "mh_outer_constant",
    "mikhlin_real_line",
]
