"""Effective dimension and asymptotic model-selection scores for Bayesian
networks with hidden variables."""

from .network import (
    DISCRETE,
    LINEAR_GAUSSIAN,
    SIGMOID,
    NetworkModel,
    ParameterPoint,
    StateIndexer,
    Variable,
    build_model,
    load_model,
    load_point,
    model_from_json,
    model_to_json,
    observable_parameter_count,
    parameter_count,
    point_from_json,
    point_to_json,
    sample_parameters,
    save_model,
    save_point,
    validate,
    validate_point,
)
from .observable import (
    GaussianMoments,
    Jacobian,
    JointTable,
    StateSpaceCapError,
    discrete_joint,
    gaussian_moments,
    jacobian,
    sigmoid_joint,
)
from .rank import (
    RegularRankReport,
    check_naive_bayes_rank_bounds,
    finite_difference_jacobian,
    rank_exact,
    rank_numeric,
    regular_rank,
)
from .inference import (
    Dataset,
    EMResult,
    SufficientStatistics,
    complete_counts,
    completed_statistics,
    em_fit,
    expected_counts,
    load_csv,
    loglik,
    sample_data,
    save_csv,
)
from .scoring import (
    PriorSpec,
    ScoreReport,
    bic_complete,
    bic_latent,
    ch_marginal_loglik,
    cs_corrected,
    cs_score,
    multinomial_hessian,
    prior_counts,
    projected_entropy,
)

__version__ = "0.1.0"
