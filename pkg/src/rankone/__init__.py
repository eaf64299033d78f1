"""Spherical Fourier multipliers on rank-one symmetric spaces: numerics and certificates."""
from .multiplier import MultiplierExpr, parse_multiplier
from .opnorms import CertificateConfig, CertificateReport, theorem_certificate
from .space import PRESETS, SpaceParams, preset

__version__ = "0.1.0"

__all__ = [
    "SpaceParams",
    "PRESETS",
    "preset",
    "MultiplierExpr",
    "parse_multiplier",
    "CertificateConfig",
    "CertificateReport",
    "theorem_certificate",
    "__version__",
]
