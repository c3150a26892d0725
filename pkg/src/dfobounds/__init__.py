"""Interpolation models for derivative-free optimization.

Construction and certification of linear, quadratic, and minimum-norm
interpolation models on sample sets in a ball, the error-bound constants
that govern their accuracy, and empirical verification of those bounds on
test functions.
"""

from .ball import (
    BallExtremum,
    extremize_on_ball,
    grid_oracle,
    lipschitz_on_ball,
    max_abs_on_ball,
)
from .bounds import (
    BoundInputs,
    BoundKind,
    BoundReport,
    c_delta_max,
    closed_form_bounds,
    constants_from_lambda,
    error_bounds,
    hessian_bound_mfn,
)
from .geometry import (
    MatrixKind,
    NotPoisedError,
    PoisednessCertificate,
    PoisednessKind,
    SampleSet,
    design_matrix,
    generate_poised_set,
    interpolation_matrix,
    lagrange_determined,
    lagrange_mfn,
    lambda_poisedness,
    mfn_lambda_vector,
    mfn_poised,
    mfn_system_matrix,
    normalized_points,
)
from .models import (
    FitResult,
    ModelKind,
    RelaxationError,
    RelaxationSpec,
    fit_model,
    fit_relaxed,
    interpolation_residual,
)
from .poly import (
    BasisPart,
    BasisSelector,
    QuadraticPolynomial,
    basis_matrix,
    natural_basis,
    space_dim,
    weighted_sum,
)
from .verify import (
    CSV_COLUMNS,
    CampaignReport,
    InequalityCheck,
    TestFunction,
    TrialConfig,
    TrialResult,
    basis_floor_checks,
    builtin_functions,
    check_theory,
    expand_config,
    quadratic_function,
    quartic_function,
    resolve_function,
    rosenbrock_function,
    run_campaign,
    run_trial,
)

__version__ = "0.1.0"

__all__ = [
    "CSV_COLUMNS",
    "BallExtremum",
    "BasisPart",
    "BasisSelector",
    "BoundInputs",
    "BoundKind",
    "BoundReport",
    "CampaignReport",
    "FitResult",
    "InequalityCheck",
    "MatrixKind",
    "ModelKind",
    "NotPoisedError",
    "PoisednessCertificate",
    "PoisednessKind",
    "QuadraticPolynomial",
    "RelaxationError",
    "RelaxationSpec",
    "SampleSet",
    "TestFunction",
    "TrialConfig",
    "TrialResult",
    "basis_floor_checks",
    "basis_matrix",
    "builtin_functions",
    "c_delta_max",
    "check_theory",
    "closed_form_bounds",
    "constants_from_lambda",
    "design_matrix",
    "error_bounds",
    "expand_config",
    "extremize_on_ball",
    "fit_model",
    "fit_relaxed",
    "generate_poised_set",
    "grid_oracle",
    "hessian_bound_mfn",
    "interpolation_matrix",
    "interpolation_residual",
    "lagrange_determined",
    "lagrange_mfn",
    "lambda_poisedness",
    "lipschitz_on_ball",
    "max_abs_on_ball",
    "mfn_lambda_vector",
    "mfn_poised",
    "mfn_system_matrix",
    "natural_basis",
    "normalized_points",
    "quadratic_function",
    "quartic_function",
    "resolve_function",
    "rosenbrock_function",
    "run_campaign",
    "run_trial",
    "space_dim",
    "weighted_sum",
]
