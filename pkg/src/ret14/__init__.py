"""Causal 14-field relativistic extended-thermodynamics closures.

Builds divergence-type closures for the 14-field relativistic theory from
user-supplied state equations and transport coefficients, and verifies
numerically that compatible closures reproduce the Eckart
(Navier-Stokes-Fourier) equations in the first Maxwellian iterate, that
entropy-principle symmetrization makes the compatibility constraint
automatic, and that the classical limit of the coefficients behaves as
expected.
"""

from .bessel import (
    BesselDomainError,
    BesselOrderError,
    bessel_k,
    bessel_k_scaled,
    bessel_ratio_g,
    bessel_ratio_g_prime,
)
from .classical_limit import (
    ClassicalCoefficients,
    classical_coefficients,
    classical_compatibility_residual,
    default_c_sequence,
    fit_convergence_order,
    richardson_extrapolate,
)
from .closure import (
    CallableClosure,
    ClosureValues,
    EquilibriumClosure,
    GerochLindblomClosure,
    MissingModelError,
    MonatomicJuttnerClosure,
    PerturbedClosure,
    PolyatomicAcprClosure,
    PolyatomicPrClosure,
    ProductionCoefficients,
    SingularDerivativeError,
    TransportCoefficients,
    a_from_b,
    builtin_closure,
    compatibility_residual,
    heatflux_condition_residuals,
    lmr_symbol_map,
    monatomic_production_closed_form,
    polyatomic_production_closed_form,
    production_coefficients,
)
from .covariant import (
    METRIC,
    ConstraintError,
    NoneqFields,
    NormalizationError,
    assemble_equilibrium_tensors,
    assemble_full_symmetric_triple,
    assemble_production,
    boost_x,
    dev3,
    dev4,
    dev4_last_pair,
    entropy_production,
    four_velocity,
    lower,
    projector,
    sym2_pack,
    sym2_unpack,
)
from .eckart_check import (
    DegeneracyError,
    EckartFields,
    FieldPoint,
    GaussianBumpField,
    MaterialDerivatives,
    ProjectionResiduals,
    eckart_constitutive,
    eliminate_material_derivatives,
    projection_residuals,
    random_field_points,
    residual_norms,
)
from .main_field import (
    ConvexityReport,
    MainFieldEq,
    PotentialCoefficients,
    a_from_gamma1,
    chain_rule_derivatives,
    equilibrium_main_field,
    euler_convexity,
    potential_coefficients,
)
from .state_models import (
    EvaluationError,
    IntegrabilityError,
    JuttnerModel,
    PhysicalConstants,
    PolyatomicModel,
    StateEvaluation,
    StateModel,
    ThermalState,
    UserModel,
    evaluate,
    gibbs_entropy,
    model_from_config,
)

__version__ = "0.1.0"
