"""Abel averages of linear operators and holomorphic maps on the unit ball.

The library computes the resolvent-type average
A_alpha = (1-alpha)(I - alpha T)^(-1) of matrices and its nonlinear
counterpart Phi_alpha = (I - alpha h)^(-1) o ((1-alpha omega) I) of
holomorphic maps on the Euclidean unit ball of C^n, classifies the power
convergence of both from spectral data, iterates the nonlinear average to
holomorphic retractions, and certifies omega-dissipativity by
numerical-range sampling.
"""

from .dissipativity import (
    DissipativityReport,
    NumericalRadiusEstimate,
    harris_norm_limit,
    numerical_radius,
    numerical_range_samples,
    omega_dissipative_estimate,
)
from .errors import (
    AbelavError,
    AuditFailure,
    DomainEscape,
    EigensolverFailure,
    InputError,
    NoConvergence,
    OriginNotFixed,
    OutsideBall,
    Overflow,
    SingularJacobian,
    SingularResolvent,
)
from .gallery import (
    B2Example,
    FisherKppGrid,
    b2_map,
    b2_omega_zero_phi,
    b2_phi_closed_form,
    b2_phi_n_closed_form,
    b2_retraction_closed_form,
    fisher_kpp_grid,
    fisher_kpp_map,
    fisher_kpp_nested_resolvent,
)
from .linear import (
    SpectralReport,
    abel_linear,
    abel_series,
    as_complex_matrix,
    classify_linear,
    is_dissipative_linear,
    numerical_rank,
    power_limit,
    spectral_projection,
)
from .maps import (
    BoundednessScan,
    HoloMap,
    boundedness_scan,
    compose_affine_perturbation,
    constant_map,
    eval_map,
    identity_map,
    jacobian,
    linear_map,
    mobius_translate,
    poincare_distance,
    polynomial_map,
    spectrum_at_zero,
)
from .nonlinear import (
    AbelConfig,
    IterationTrace,
    RegionVerdict,
    RetractionAudit,
    abel_average_map,
    classify_convergence,
    in_q_omega,
    iterate_to_retraction,
    phi_derivative_at_zero,
    pseudo_contractive_probe,
    retraction_audit,
    small_alpha_limit_check,
    solve_abel,
)

__version__ = "0.1.0"
