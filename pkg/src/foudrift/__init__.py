"""Fractional Ornstein-Uhlenbeck drift estimation and second-order
expansion densities, with exact fractional-noise simulation and the
quadrature machinery for the expansion's limit constants."""

from .constants import ExpansionConstants, assemble_constants, internal_consistency_check
from .density import DensityModel, expansion_cdf, expansion_moment, expansion_pdf, hermite
from .estimator import (
    BetaSpec,
    EstimationError,
    EstimatorResult,
    ParamSpace,
    bias_corrected_estimate,
    moment_estimate,
    mu,
    q_exponent,
)
from .fgn import (
    FgnSample,
    FgnSimulationError,
    SampleGrid,
    SamplePath,
    cumulate_to_fbm,
    default_steps,
    fgn_autocovariance,
    simulate_fgn,
    spawn_rng,
)
from .fou import FouPath, FouSimulationError, ModelParams, integrate_q, simulate_fou
from .kernels import (
    KernelParams,
    cu2_closed_form,
    cu2_quadrature,
    cu3_importance_mc,
    cu3_quadrature,
    gamma2_finite_T,
    half_line_kernel_A,
    kernel_a,
    truncated_kernel_aT,
)
from .montecarlo import (
    McConfig,
    McSummary,
    VarianceReport,
    empirical_variance_check,
    ks_statistic,
    run_experiment,
)
from .quadrature import QuadratureError, QuadratureSpec, QuadValue, adaptive_quadrature

__version__ = "0.1.0"

__all__ = [
    "BetaSpec",
    "DensityModel",
    "EstimationError",
    "EstimatorResult",
    "ExpansionConstants",
    "FgnSample",
    "FgnSimulationError",
    "FouPath",
    "FouSimulationError",
    "KernelParams",
    "McConfig",
    "McSummary",
    "ModelParams",
    "ParamSpace",
    "QuadratureError",
    "QuadratureSpec",
    "QuadValue",
    "SampleGrid",
    "SamplePath",
    "VarianceReport",
    "adaptive_quadrature",
    "assemble_constants",
    "bias_corrected_estimate",
    "cu2_closed_form",
    "cu2_quadrature",
    "cu3_importance_mc",
    "cu3_quadrature",
    "cumulate_to_fbm",
    "default_steps",
    "empirical_variance_check",
    "expansion_cdf",
    "expansion_moment",
    "expansion_pdf",
    "fgn_autocovariance",
    "gamma2_finite_T",
    "half_line_kernel_A",
    "hermite",
    "internal_consistency_check",
    "integrate_q",
    "kernel_a",
    "ks_statistic",
    "moment_estimate",
    "mu",
    "q_exponent",
    "run_experiment",
    "simulate_fgn",
    "simulate_fou",
    "spawn_rng",
    "truncated_kernel_aT",
    "__version__",
]
