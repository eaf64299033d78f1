"""c-function, Harish-Chandra expansion and spherical functions of rank-one spaces."""
from .cfunction import (
    HarishChandraC,
    PoleError,
    c_check_inverse,
    c_check_inverse_jet,
    c_function,
    c_inverse,
    loggamma_jet,
    plancherel_density,
)
from .expansion import (
    MAX_TERMS,
    GammaCoeffs,
    RegimeWarning,
    SingularRecursionError,
    gamma_coeffs,
    gamma_recursion,
    gamma_table,
    hc_series,
    omega_remainder,
    series_terms_needed,
)
from .radial import (
    CrossoverMismatchError,
    crossover_discrepancy,
    phi_hypergeometric,
    phi_ode,
    phi_taylor,
    radial_operator_coefficient,
    spherical_function,
    spherical_table,
)
from .estimates import (
    GammaFit,
    SupremumCheck,
    gamma_mikhlin_fit,
    gamma_mikhlin_norms,
    hcest_suprema,
    omega_derivative_suprema,
)
