"""Kernel synthesis, cutoffs, splittings and the reweighted kernels on ``A``."""
from .cutoffs import chi_cutoff, eta_cutoff, psi, smoothstep
from .ledger import (
    EtaLedger,
    PsiLedger,
    eta_ledger,
    eta_weight,
    eta_weight_norm,
    psi_ledger,
    psi_v,
    psi_v_norm,
    varphi_norm,
    varphi_weight,
)
from .splitting import SKernelSample, approximating_kernels, kernel_on_s, splitting_kernels
from .synthesis import (
    DivergenceError,
    OutOfGridError,
    QuadratureError,
    RadialKernel,
    default_grid,
    forward_constant,
    kappa_q,
    lambda_extent,
    shifted_synthesis,
    spherical_transform,
    split_local_global,
    synthesize_kernel,
)
