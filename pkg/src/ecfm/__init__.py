"""Two formulations of deterministic PDE inverse problems: squared-error
data misfit and explicit constraint forces, with spectral Galerkin
discretizations and batch experiment drivers."""

from .basis import (
    BasisFamily,
    BasisKind,
    QuadratureRule,
    clamped_beam_sine,
    eval_basis,
    eval_basis_dx,
    eval_basis_dxx,
    eval_constraint_shape,
    gauss_legendre,
    gaussian_rbf,
    hat_1d,
    shifted_legendre,
    sine_1d,
    tensor_sine_2d,
)
from .errors import (
    ConfigError,
    EcfmError,
    InconsistentInitialDataError,
    InfeasibleError,
    MaxIterationsError,
    NonFiniteGradientError,
    SingularAugmentedSystemError,
    SingularJacobianError,
    SolverError,
)
from .operators import (
    BeamOperatorSet,
    DiscreteOperatorSet,
    assemble_beam,
    assemble_burgers,
    assemble_kpp,
    indicator_load_vector,
    project_l2,
    residual_burgers,
    residual_burgers_jac,
    residual_kpp,
    residual_kpp_jac_eps,
    residual_kpp_jac_lam,
    residual_kpp_jac_theta,
)
from .optimize import AdamConfig, NLPProblem, OptResult, adam_minimize, penalty_minimize, solve_nlp
from .pce import (
    MeasurementReplicates,
    StochasticGramian,
    StochasticSystem,
    VarianceFloorWarning,
    assemble_stochastic_galerkin,
    calibrated_h0,
    corrected_stiffness_field,
    critical_load,
    evaluate_expansion,
    grad_pseudo_likelihood,
    legendre_gramians,
    moments,
    pseudo_log_likelihood,
    stochastic_sensitivity,
)
from .sensitivity import (
    SensitivityTrajectory,
    grad_objective_ecfm,
    grad_objective_standard,
    march_sensitivity_ecfm,
    march_sensitivity_standard,
    objective_ecfm,
    objective_standard,
)
from .solvers import (
    NewtonConfig,
    NewtonResult,
    TimeGrid,
    Trajectory,
    march_burgers_ecfm,
    march_burgers_standard,
    newton_solve,
    solve_kpp_equilibrium,
)
from .stats import (
    ConfidenceBounds,
    NoiseModel,
    chi2_cdf,
    chi2_quantile,
    confidence_bounds,
    normal_cdf,
    normal_quantile,
    sample_moments,
    sample_noise,
    sample_uniform,
)

__version__ = "0.1.0"
