"""Operator norms on the line, transference integrals and the certificate engine."""
from .certificate import (
    DIVERGENT,
    NOT_APPLICABLE,
    STABLE,
    VARIANTS,
    CertificateConfig,
    CertificateReport,
    Gate,
    Quantity,
    theorem_certificate,
)
from .line import (
    AliasingWarning,
    LineOperator,
    LipResult,
    MelCheck,
    cv2_argmax,
    cv2_norm,
    cvp_bound,
    cvp_lower,
    cvp_upper,
    l1_norm,
    lip_norm,
    mel_product_bound,
    mellin_transform,
    worker_count,
)
from .transference import line_grid, transference_bound
