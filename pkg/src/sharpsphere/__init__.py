"""sharpsphere - numerical checks of sharp interpolation inequalities on the sphere.

Usage:
    from sharpsphere import Exponent, NodalFn, quadrature_rule, quotient_Qp

    rule = quadrature_rule(3)
    f = NodalFn.from_callable(rule, lambda x: 1 + x)
    quotient_Qp(f, Exponent(4, 3))   # ~1.3506

    # Command line
    sharpsphere certify --d 3 --p 4 --beta 1
"""

from .certificates import (
    DiscriminantReport,
    SosSplit,
    alpha_improved,
    critical_exponents,
    discriminant,
    feasibility_boundary,
    figure_curves,
    find_beta,
    h_density,
    improved_constant,
    pointwise_h,
    quadratic_form_determinant,
    sos_check,
    sos_split,
)
from .config import RunConfig, SolverConfig, get_config, reset_config
from .errors import (
    ConfigError,
    ConstantInputError,
    DegreeOverflowError,
    DimensionMismatchError,
    DomainError,
    EmptyWindowError,
    PositivityError,
    SharpSphereError,
    StepSizeError,
    SymmetryError,
)
from .flows import (
    auxiliary_poincare,
    beckner_chain_check,
    decay_rate,
    default_time_grid,
    entropy_production_gap,
    gross_monotonicity_check,
    hypercontractivity_run,
    improved_decay_check,
    mean_derivative,
    nelson_exponent,
    run_heat_flow,
    run_nonlinear_flow,
)
from .functionals import (
    Exponent,
    el_residual,
    entropy_F,
    fisher_form,
    fisher_I,
    logsob_ratio,
    onofri_deficit,
    poincare_ratio,
    polynomial_corpus,
    quotient_Qp,
)
from .measure import NodalFn, QuadratureRule, integrate, moment, norm, normalization_Zd, quadrature_rule
from .minimizer import MinimizeResult, minimize_logsob, minimize_quotient, perturbation_sharpness
from .schemas import (
    BecknerChainReport,
    DecayReport,
    FlowTrace,
    GrossReport,
    HyperReport,
)
from .spectral import (
    Basis,
    FineSamples,
    SpectralFn,
    apply_L,
    basis_for,
    build_basis,
    commutator_defect,
    derivative,
    eigenvalue,
    gamma2_sides,
    heat_semigroup,
    l_gamma_sides,
    oversampled,
    second_derivative,
    to_nodal,
    to_spectral,
)

__all__ = [
    # measure
    "QuadratureRule",
    "NodalFn",
    "normalization_Zd",
    "quadrature_rule",
    "integrate",
    "norm",
    "moment",
    # spectral
    "Basis",
    "SpectralFn",
    "eigenvalue",
    "build_basis",
    "basis_for",
    "to_spectral",
    "to_nodal",
    "derivative",
    "second_derivative",
    "apply_L",
    "heat_semigroup",
    "commutator_defect",
    "gamma2_sides",
    "l_gamma_sides",
    "oversampled",
    "FineSamples",
    # functionals
    "Exponent",
    "quotient_Qp",
    "logsob_ratio",
    "onofri_deficit",
    "entropy_F",
    "fisher_I",
    "el_residual",
    "fisher_form",
    "poincare_ratio",
    "polynomial_corpus",
    # certificates
    "DiscriminantReport",
    "SosSplit",
    "critical_exponents",
    "discriminant",
    "find_beta",
    "feasibility_boundary",
    "alpha_improved",
    "improved_constant",
    "sos_split",
    "quadratic_form_determinant",
    "h_density",
    "pointwise_h",
    "sos_check",
    "figure_curves",
    # flows
    "FlowTrace",
    "DecayReport",
    "HyperReport",
    "BecknerChainReport",
    "GrossReport",
    "default_time_grid",
    "run_heat_flow",
    "run_nonlinear_flow",
    "decay_rate",
    "entropy_production_gap",
    "mean_derivative",
    "auxiliary_poincare",
    "improved_decay_check",
    "hypercontractivity_run",
    "beckner_chain_check",
    "nelson_exponent",
    "gross_monotonicity_check",
    # minimizer
    "MinimizeResult",
    "minimize_quotient",
    "minimize_logsob",
    "perturbation_sharpness",
    # config / errors
    "SolverConfig",
    "RunConfig",
    "get_config",
    "reset_config",
    "SharpSphereError",
    "DomainError",
    "ConstantInputError",
    "PositivityError",
    "DegreeOverflowError",
    "DimensionMismatchError",
    "StepSizeError",
    "EmptyWindowError",
    "SymmetryError",
    "ConfigError",
]
